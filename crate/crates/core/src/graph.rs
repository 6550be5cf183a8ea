//! Finite simple connected symmetric digraphs.
//!
//! Arcs are stored in canonical order: grouped by terminus ascending, and by
//! origin ascending inside each group. The arcs ending at `u` (the set `X_u`)
//! therefore form the contiguous index range [`Graph::x_range`], and every
//! dense operator built on top of a `Graph` is reproducible bit-for-bit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::ops::Range;

use crate::error::{Result, WalkError};

/// A directed arc `o(a) → t(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub origin: usize,
    pub terminus: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n_vertices: usize,
    /// Undirected support edges as `(min, max)`, sorted.
    edges: Vec<(usize, usize)>,
    arcs: Vec<Arc>,
    inv: Vec<usize>,
    /// `X_u = x_offsets[u]..x_offsets[u + 1]`.
    x_offsets: Vec<usize>,
    torus_side: Option<usize>,
}

impl Graph {
    /// Builds a graph on vertices `0..n` from undirected edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if edges.is_empty() {
            return Err(WalkError::EmptyGraph);
        }
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(WalkError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(WalkError::SelfLoop { line: 0, vertex: u });
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(WalkError::DuplicateEdge { u, v });
            }
        }
        let edges: Vec<_> = set.into_iter().collect();

        let components = count_components(n, &edges);
        if components != 1 {
            return Err(WalkError::Disconnected { components });
        }

        let mut arcs: Vec<Arc> = edges
            .iter()
            .flat_map(|&(u, v)| {
                [
                    Arc {
                        origin: u,
                        terminus: v,
                    },
                    Arc {
                        origin: v,
                        terminus: u,
                    },
                ]
            })
            .collect();
        arcs.sort_by_key(|a| (a.terminus, a.origin));

        let index: BTreeMap<Arc, usize> = arcs.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let inv = arcs
            .iter()
            .map(|a| {
                index[&Arc {
                    origin: a.terminus,
                    terminus: a.origin,
                }]
            })
            .collect();

        let mut x_offsets = vec![0usize; n + 1];
        for a in &arcs {
            x_offsets[a.terminus + 1] += 1;
        }
        for u in 0..n {
            x_offsets[u + 1] += x_offsets[u];
        }

        Ok(Self {
            n_vertices: n,
            edges,
            arcs,
            inv,
            x_offsets,
            torus_side: None,
        })
    }

    /// Path graph `P_n`.
    pub fn path(n: usize) -> Result<Self> {
        check_min("path length", n, 2)?;
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Self::from_edges(n, &edges)
    }

    /// Cycle graph `C_n`.
    pub fn cycle(n: usize) -> Result<Self> {
        check_min("cycle length", n, 3)?;
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Result<Self> {
        check_min("complete graph order", n, 2)?;
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self::from_edges(n, &edges)
    }

    /// Star `K_{1,leaves}` with centre `0`.
    pub fn star(leaves: usize) -> Result<Self> {
        check_min("star leaf count", leaves, 1)?;
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Self::from_edges(leaves + 1, &edges)
    }

    /// Periodic cubic lattice `Z_m^3`. Vertex `(x1, x2, x3)` has index
    /// `x1 + m*x2 + m^2*x3`.
    pub fn torus3d(m: usize) -> Result<Self> {
        // m = 2 would make x + e_j and x - e_j the same neighbour.
        check_min("torus side", m, 3)?;
        let idx = |x: [usize; 3]| x[0] + m * x[1] + m * m * x[2];
        let mut edges = Vec::with_capacity(3 * m * m * m);
        for x3 in 0..m {
            for x2 in 0..m {
                for x1 in 0..m {
                    let x = [x1, x2, x3];
                    for j in 0..3 {
                        let mut y = x;
                        y[j] = (y[j] + 1) % m;
                        edges.push((idx(x), idx(y)));
                    }
                }
            }
        }
        let mut g = Self::from_edges(m * m * m, &edges)?;
        g.torus_side = Some(m);
        Ok(g)
    }

    /// Parses the edge-list text format: one `u v` pair per line, `#` starts a
    /// comment. Vertex ids are compacted to `0..n` preserving numeric order.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut raw = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(WalkError::Parse {
                    line: line_no,
                    msg: format!("expected two vertex ids, found {} fields", fields.len()),
                });
            }
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| WalkError::Parse {
                    line: line_no,
                    msg: format!("`{s}` is not a nonnegative integer"),
                })
            };
            let (u, v) = (parse(fields[0])?, parse(fields[1])?);
            if u == v {
                return Err(WalkError::SelfLoop {
                    line: line_no,
                    vertex: u,
                });
            }
            raw.push((u, v));
        }
        let ids: BTreeSet<usize> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
        let compact: BTreeMap<usize, usize> =
            ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let edges: Vec<_> = raw
            .iter()
            .map(|&(u, v)| (compact[&u], compact[&v]))
            .collect();
        Self::from_edges(ids.len(), &edges).map_err(|e| match e {
            // report duplicates with the ids the user wrote
            WalkError::DuplicateEdge { u, v } => WalkError::DuplicateEdge {
                u: *ids.iter().nth(u).unwrap(),
                v: *ids.iter().nth(v).unwrap(),
            },
            e => e,
        })
    }

    /// Canonical serialization: edges `(min, max)` sorted lexicographically.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, a: usize) -> Arc {
        self.arcs[a]
    }

    /// The inverse arc `ā`.
    pub fn inverse_arc(&self, a: usize) -> Result<usize> {
        self.inv.get(a).copied().ok_or(WalkError::ArcOutOfRange {
            index: a,
            len: self.arcs.len(),
        })
    }

    /// The full involution `a ↦ ā` as a slice.
    pub fn inverse_table(&self) -> &[usize] {
        &self.inv
    }

    /// Index range of `X_u`, the arcs with terminus `u`.
    pub fn x_range(&self, u: usize) -> Range<usize> {
        self.x_offsets[u]..self.x_offsets[u + 1]
    }

    pub fn x_offsets(&self) -> &[usize] {
        &self.x_offsets
    }

    pub fn degree(&self, u: usize) -> usize {
        self.x_offsets[u + 1] - self.x_offsets[u]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n_vertices).map(|u| self.degree(u)).collect()
    }

    pub fn find_arc(&self, origin: usize, terminus: usize) -> Option<usize> {
        if terminus >= self.n_vertices {
            return None;
        }
        let range = self.x_range(terminus);
        self.arcs[range.clone()]
            .binary_search_by_key(&origin, |a| a.origin)
            .ok()
            .map(|i| range.start + i)
    }

    pub fn torus_side(&self) -> Option<usize> {
        self.torus_side
    }

    /// For a torus graph, the signed direction label `±j` (`j = 1, 2, 3`) of
    /// arc `a`: `+j` when `o(a) = t(a) - e_j`, `-j` when `o(a) = t(a) + e_j`.
    pub fn torus_direction(&self, a: usize) -> Option<i8> {
        let m = self.torus_side?;
        let Arc { origin, terminus } = *self.arcs.get(a)?;
        let coords = |v: usize| [v % m, (v / m) % m, v / (m * m)];
        let (o, t) = (coords(origin), coords(terminus));
        (0..3).find_map(|j| {
            let mut minus = t;
            minus[j] = (t[j] + m - 1) % m;
            let mut plus = t;
            plus[j] = (t[j] + 1) % m;
            if o == minus {
                Some(j as i8 + 1)
            } else if o == plus {
                Some(-(j as i8 + 1))
            } else {
                None
            }
        })
    }
}

fn check_min(what: &'static str, value: usize, min: usize) -> Result<()> {
    if value < min {
        Err(WalkError::SizeTooSmall { what, value, min })
    } else {
        Ok(())
    }
}

fn count_components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = n;
    for &(u, v) in edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            components -= 1;
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_structure(g: &Graph) {
        let inv = g.inverse_table();
        for a in 0..g.n_arcs() {
            assert_ne!(inv[a], a);
            assert_eq!(inv[inv[a]], a);
            let (x, y) = (g.arc(a), g.arc(inv[a]));
            assert_eq!(x.origin, y.terminus);
            assert_eq!(x.terminus, y.origin);
        }
        assert_eq!(g.n_arcs(), 2 * g.edges().len());
        assert_eq!(g.degrees().iter().sum::<usize>(), g.n_arcs());
        for u in 0..g.n_vertices() {
            for a in g.x_range(u) {
                assert_eq!(g.arc(a).terminus, u);
            }
        }
        for w in g.arcs().windows(2) {
            assert!((w[0].terminus, w[0].origin) < (w[1].terminus, w[1].origin));
        }
    }

    #[test]
    fn single_edge() {
        let g = Graph::parse_edge_list("0 1").unwrap();
        assert_eq!(g.n_vertices(), 2);
        assert_eq!(g.degrees(), vec![1, 1]);
        // X_0 = {1→0}, X_1 = {0→1}
        assert_eq!(
            g.arc(0),
            Arc {
                origin: 1,
                terminus: 0
            }
        );
        assert_eq!(
            g.arc(1),
            Arc {
                origin: 0,
                terminus: 1
            }
        );
        assert_eq!(g.inverse_arc(0).unwrap(), 1);
        assert_eq!(g.inverse_arc(1).unwrap(), 0);
        check_structure(&g);
    }

    #[test]
    fn triangle() {
        let g = Graph::parse_edge_list("0 1\n1 2\n2 0").unwrap();
        assert_eq!(g.n_arcs(), 6);
        assert_eq!(g.degrees(), vec![2, 2, 2]);
        let a = g.find_arc(0, 1).unwrap();
        let b = g.find_arc(1, 0).unwrap();
        assert_eq!(g.inverse_arc(a).unwrap(), b);
        check_structure(&g);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Graph::parse_edge_list("0 0"),
            Err(WalkError::SelfLoop { line: 1, vertex: 0 })
        ));
        assert!(matches!(
            Graph::parse_edge_list("0 1\n1 0"),
            Err(WalkError::DuplicateEdge { .. })
        ));
        assert_eq!(
            Graph::parse_edge_list("0 1\n2 3\n4 5"),
            Err(WalkError::Disconnected { components: 3 })
        );
        assert!(matches!(
            Graph::parse_edge_list("0 x"),
            Err(WalkError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Graph::parse_edge_list("0 1 2"),
            Err(WalkError::Parse { .. })
        ));
        assert_eq!(
            Graph::parse_edge_list("# nothing\n"),
            Err(WalkError::EmptyGraph)
        );
    }

    #[test]
    fn comments_whitespace_and_compaction() {
        let g = Graph::parse_edge_list("# header\n  10   30 # trailing\n\n30\t20\n").unwrap();
        assert_eq!(g.n_vertices(), 3);
        assert_eq!(g.edges(), &[(0, 2), (1, 2)]);
    }

    #[test]
    fn inverse_arc_out_of_range() {
        let g = Graph::path(2).unwrap();
        assert_eq!(
            g.inverse_arc(2),
            Err(WalkError::ArcOutOfRange { index: 2, len: 2 })
        );
    }

    #[test]
    fn torus_counts() {
        let g = Graph::torus3d(3).unwrap();
        assert_eq!(g.n_vertices(), 27);
        assert_eq!(g.edges().len(), 81);
        assert_eq!(g.n_arcs(), 162);
        assert!(g.degrees().iter().all(|&d| d == 6));
        check_structure(&g);

        let g4 = Graph::torus3d(4).unwrap();
        assert_eq!(g4.n_vertices(), 64);
        assert!(g4.degrees().iter().all(|&d| d == 6));

        assert!(Graph::torus3d(2).is_err());
    }

    #[test]
    fn torus_directions_cover_each_vertex() {
        let g = Graph::torus3d(3).unwrap();
        for u in 0..g.n_vertices() {
            let mut dirs: Vec<i8> = g
                .x_range(u)
                .map(|a| g.torus_direction(a).unwrap())
                .collect();
            dirs.sort();
            assert_eq!(dirs, vec![-3, -2, -1, 1, 2, 3]);
        }
        for a in 0..g.n_arcs() {
            let b = g.inverse_arc(a).unwrap();
            assert_eq!(g.torus_direction(a), g.torus_direction(b).map(|d| -d));
        }
        assert_eq!(Graph::cycle(4).unwrap().torus_direction(0), None);
    }

    #[test]
    fn builtin_families() {
        for g in [
            Graph::path(4).unwrap(),
            Graph::cycle(5).unwrap(),
            Graph::complete(4).unwrap(),
            Graph::star(3).unwrap(),
        ] {
            check_structure(&g);
        }
        assert_eq!(Graph::star(3).unwrap().degree(0), 3);
        assert_eq!(Graph::complete(4).unwrap().n_arcs(), 12);
        assert!(Graph::cycle(2).is_err());
        assert!(Graph::path(1).is_err());
    }

    fn connected_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (2usize..9).prop_flat_map(|n| {
            // random spanning tree plus extra edges
            let tree = proptest::collection::vec(any::<prop::sample::Index>(), n - 1);
            let extra = proptest::collection::vec((0..n, 0..n), 0..10);
            (Just(n), tree, extra).prop_map(|(n, tree, extra)| {
                let mut set = BTreeSet::new();
                for (v, pick) in tree.iter().enumerate() {
                    let v = v + 1;
                    let u = pick.index(v);
                    set.insert((u, v));
                }
                for (u, v) in extra {
                    if u != v {
                        set.insert((u.min(v), u.max(v)));
                    }
                }
                (n, set.into_iter().collect())
            })
        })
    }

    proptest! {
        #[test]
        fn constructed_graphs_are_well_formed((n, edges) in connected_graph()) {
            let g = Graph::from_edges(n, &edges).unwrap();
            check_structure(&g);
        }

        #[test]
        fn edge_list_round_trip((n, edges) in connected_graph()) {
            let g = Graph::from_edges(n, &edges).unwrap();
            let text = g.to_edge_list();
            let h = Graph::parse_edge_list(&text).unwrap();
            prop_assert_eq!(&g, &h);
            prop_assert_eq!(h.to_edge_list(), text);
        }
    }
}
