//! Coin families and the boundary operator.
//!
//! A coin family fixes, for each vertex `u`, an orthonormal family
//! `ξ_u^(1..p_u)` in `C^{X_u}`. It determines the projection
//! `Π_u = Σ_j ξ_u^(j) ξ_u^(j)*`, the local coin `C_u = 2Π_u − I`, and the
//! boundary operator `d : ℓ²(A) → ℓ²(Ṽ)` with `(dψ)(u;j) = ⟨ξ_u^(j), ψ|X_u⟩`.
//! The identities `dd* = I` and `C = 2d*d − I` hold for every family built
//! here.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Result, WalkError};
use crate::graph::Graph;
use crate::{ArcState, CMatrix, VertexState, C64};

/// Gram-matrix tolerance for user supplied families.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinKind {
    Grover,
    Basis,
    Hamiltonian,
    Lattice3d,
}

impl CoinKind {
    pub fn name(self) -> &'static str {
        match self {
            CoinKind::Grover => "grover",
            CoinKind::Basis => "basis",
            CoinKind::Hamiltonian => "hamiltonian",
            CoinKind::Lattice3d => "lattice3d",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoinFamily {
    kind: CoinKind,
    /// Per vertex a `deg(u) × p_u` matrix whose columns are `ξ_u^(j)`, i.e. `K_u*`.
    xi: Vec<CMatrix>,
    /// Arc offsets of the underlying graph: `X_u = x_offsets[u]..x_offsets[u+1]`.
    x_offsets: Vec<usize>,
    /// Block offsets into `Ṽ`: `f[u] = f[v_offsets[u]..v_offsets[u+1]]`.
    v_offsets: Vec<usize>,
    /// Vertices with `deg(u) > 1` and `p_u = deg(u)`, where `C_u = I`.
    identity_vertices: Vec<usize>,
    /// Largest eigenvalue of the source Hamiltonian, for Hamiltonian coins.
    lambda_max: Option<f64>,
}

impl CoinFamily {
    fn from_blocks(g: &Graph, kind: CoinKind, xi: Vec<CMatrix>) -> Result<Self> {
        if xi.len() != g.n_vertices() {
            return Err(WalkError::DimensionMismatch {
                expected: g.n_vertices(),
                found: xi.len(),
            });
        }
        let mut v_offsets = Vec::with_capacity(xi.len() + 1);
        v_offsets.push(0);
        let mut identity_vertices = Vec::new();
        for (u, block) in xi.iter().enumerate() {
            let (deg, p) = block.shape();
            if deg != g.degree(u) {
                return Err(WalkError::RowLength {
                    vertex: u,
                    expected: g.degree(u),
                    found: deg,
                });
            }
            if p == 0 || p > deg {
                return Err(WalkError::InvalidRank {
                    vertex: u,
                    rank: p,
                    degree: deg,
                });
            }
            if p == deg && deg > 1 {
                identity_vertices.push(u);
            }
            let residual = crate::linalg::orthonormality_defect(block);
            if residual > ORTHONORMAL_TOL {
                return Err(WalkError::NonOrthonormal {
                    vertex: u,
                    residual,
                });
            }
            v_offsets.push(v_offsets[u] + p);
        }
        Ok(Self {
            kind,
            xi,
            x_offsets: g.x_offsets().to_vec(),
            v_offsets,
            identity_vertices,
            lambda_max: None,
        })
    }

    /// `p_u = 1`, `ξ_u = deg(u)^{-1/2} (1, …, 1)`, so `C_u = Gr(deg(u))`.
    pub fn grover(g: &Graph) -> Self {
        let xi = (0..g.n_vertices())
            .map(|u| {
                let deg = g.degree(u);
                CMatrix::from_element(deg, 1, C64::new(1.0 / (deg as f64).sqrt(), 0.0))
            })
            .collect();
        Self::from_blocks(g, CoinKind::Grover, xi).expect("grover family is orthonormal")
    }

    /// Family given as rows: `rows[u]` holds `p_u` vectors of length `deg(u)`
    /// in canonical `X_u` order.
    pub fn from_rows(g: &Graph, rows: &[Vec<Vec<C64>>]) -> Result<Self> {
        if rows.len() != g.n_vertices() {
            return Err(WalkError::CoinFile(format!(
                "expected rows for {} vertices, got {}",
                g.n_vertices(),
                rows.len()
            )));
        }
        let mut xi = Vec::with_capacity(rows.len());
        for (u, vecs) in rows.iter().enumerate() {
            let deg = g.degree(u);
            if vecs.is_empty() || vecs.len() > deg {
                return Err(WalkError::InvalidRank {
                    vertex: u,
                    rank: vecs.len(),
                    degree: deg,
                });
            }
            for r in vecs {
                if r.len() != deg {
                    return Err(WalkError::RowLength {
                        vertex: u,
                        expected: deg,
                        found: r.len(),
                    });
                }
            }
            xi.push(CMatrix::from_fn(deg, vecs.len(), |a, j| vecs[j][a]));
        }
        Self::from_blocks(g, CoinKind::Basis, xi)
    }

    /// Parses a basis file and builds the family.
    ///
    /// Format: for each vertex a stanza `v <u> <p_u>` followed by `p_u` lines
    /// of `deg(u)` whitespace-separated complex numbers `re,im`. `#` starts a
    /// comment.
    pub fn parse_basis_file(g: &Graph, text: &str) -> Result<Self> {
        let mut rows: Vec<Option<Vec<Vec<C64>>>> = vec![None; g.n_vertices()];
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line: usize, msg: String| WalkError::Parse { line, msg };
        while let Some((line, header)) = lines.next() {
            let fields: Vec<&str> = header.split_whitespace().collect();
            if fields.len() != 3 || fields[0] != "v" {
                return Err(err(
                    line,
                    format!("expected `v <vertex> <p>`, got `{header}`"),
                ));
            }
            let u: usize = fields[1]
                .parse()
                .map_err(|_| err(line, format!("bad vertex id `{}`", fields[1])))?;
            let p: usize = fields[2]
                .parse()
                .map_err(|_| err(line, format!("bad rank `{}`", fields[2])))?;
            if u >= g.n_vertices() {
                return Err(WalkError::VertexOutOfRange {
                    vertex: u,
                    n: g.n_vertices(),
                });
            }
            if rows[u].is_some() {
                return Err(err(line, format!("vertex {u} given twice")));
            }
            let mut vecs = Vec::with_capacity(p);
            for _ in 0..p {
                let (line, body) = lines
                    .next()
                    .ok_or_else(|| WalkError::CoinFile(format!("vertex {u}: missing rows")))?;
                let row = body
                    .split_whitespace()
                    .map(|tok| {
                        parse_complex(tok).ok_or_else(|| err(line, format!("bad complex `{tok}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                vecs.push(row);
            }
            rows[u] = Some(vecs);
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(u, r)| r.ok_or_else(|| WalkError::CoinFile(format!("no stanza for vertex {u}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(g, &rows)
    }

    /// Serializes in the basis-file format.
    pub fn to_basis_file(&self) -> String {
        let mut out = String::new();
        for (u, block) in self.xi.iter().enumerate() {
            out.push_str(&format!("v {u} {}\n", block.ncols()));
            for j in 0..block.ncols() {
                let row: Vec<String> = block
                    .column(j)
                    .iter()
                    .map(|z| format!("{:e},{:e}", z.re, z.im))
                    .collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out
    }

    /// Coin induced by a nonnegative real symmetric Hamiltonian supported on
    /// the adjacency of `g`, with `ξ_u(a) = sqrt(H[u,o(a)] ν(o(a)) / (λ ν(u)))`
    /// where `(λ, ν)` is the Perron pair. The discriminant becomes `H / λ`.
    pub fn from_hamiltonian(g: &Graph, ham: &DMatrix<f64>) -> Result<Self> {
        let n = g.n_vertices();
        if ham.shape() != (n, n) {
            return Err(WalkError::Hamiltonian(format!(
                "matrix is {}×{}, graph has {n} vertices",
                ham.nrows(),
                ham.ncols()
            )));
        }
        for r in 0..n {
            for c in 0..n {
                let h = ham[(r, c)];
                if !h.is_finite() {
                    return Err(WalkError::Hamiltonian(format!(
                        "entry ({r},{c}) is not finite"
                    )));
                }
                if h < 0.0 {
                    return Err(WalkError::Hamiltonian(format!(
                        "negative entry {h} at ({r},{c}); only nonnegative matrices are supported"
                    )));
                }
                if (h - ham[(c, r)]).abs() > 1e-12 * (1.0 + h.abs()) {
                    return Err(WalkError::Hamiltonian(format!(
                        "not symmetric at ({r},{c})"
                    )));
                }
                let adjacent = r != c && g.find_arc(r, c).is_some();
                if adjacent != (h > 0.0) {
                    return Err(WalkError::Hamiltonian(format!(
                        "support mismatch at ({r},{c}): entry {h}, adjacent = {adjacent}"
                    )));
                }
            }
        }
        let eig = SymmetricEigen::new(ham.clone());
        let imax = eig.eigenvalues.imax();
        let lambda = eig.eigenvalues[imax];
        let mut nu: DVector<f64> = eig.eigenvectors.column(imax).into_owned();
        if nu.sum() < 0.0 {
            nu.neg_mut();
        }
        if let Some(u) = nu.iter().position(|&x| x <= 0.0) {
            return Err(WalkError::Hamiltonian(format!(
                "Perron vector not strictly positive at vertex {u}"
            )));
        }
        let xi: Vec<CMatrix> = (0..n)
            .map(|u| {
                let range = g.x_range(u);
                CMatrix::from_fn(range.len(), 1, |i, _| {
                    let o = g.arc(range.start + i).origin;
                    C64::new((ham[(u, o)] * nu[o] / (lambda * nu[u])).sqrt(), 0.0)
                })
            })
            .collect();
        for (u, block) in xi.iter().enumerate() {
            let norm = block.norm();
            if (norm - 1.0).abs() > ORTHONORMAL_TOL {
                return Err(WalkError::Hamiltonian(format!(
                    "internal: |ξ_{u}| = {norm}, expected 1"
                )));
            }
        }
        let mut cf = Self::from_blocks(g, CoinKind::Hamiltonian, xi)?;
        cf.lambda_max = Some(lambda);
        Ok(cf)
    }

    /// The `p_u = 2` coin on a 3d torus with rows
    /// `6^{-1/2}(1, 1, ω, ω, ω², ω²)` and `6^{-1/2}(1, 1, ω², ω², ω, ω)` in the
    /// direction order `(+1, −1, +2, −2, +3, −3)`, `ω = e^{2πi/3}`.
    pub fn lattice3d(g: &Graph) -> Result<Self> {
        if g.torus_side().is_none() {
            return Err(WalkError::NotTorus);
        }
        let omega = C64::from_polar(1.0, 2.0 * PI / 3.0);
        let s = 1.0 / 6f64.sqrt();
        let phase = |dir: i8, row: usize| -> C64 {
            let k = (dir.unsigned_abs() - 1) as u32; // 0, 1, 2
            let k = if row == 0 { k } else { (3 - k) % 3 };
            omega.powu(k) * s
        };
        let xi = (0..g.n_vertices())
            .map(|u| {
                let range = g.x_range(u);
                let mut block = CMatrix::zeros(range.len(), 2);
                for (i, a) in range.enumerate() {
                    let dir = g.torus_direction(a).ok_or(WalkError::NotTorus)?;
                    block[(i, 0)] = phase(dir, 0);
                    block[(i, 1)] = phase(dir, 1);
                }
                Ok(block)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_blocks(g, CoinKind::Lattice3d, xi)
    }

    pub fn kind(&self) -> CoinKind {
        self.kind
    }

    pub fn n_vertices(&self) -> usize {
        self.xi.len()
    }

    pub fn n_arcs(&self) -> usize {
        *self.x_offsets.last().unwrap()
    }

    pub fn rank(&self, u: usize) -> usize {
        self.xi[u].ncols()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.xi.iter().map(|b| b.ncols()).collect()
    }

    /// `|Ṽ| = Σ_u p_u`.
    pub fn vertex_dim(&self) -> usize {
        *self.v_offsets.last().unwrap()
    }

    pub fn block_offset(&self, u: usize) -> usize {
        self.v_offsets[u]
    }

    /// Flattened index of `(u; j)` in `Ṽ` (`j` zero-based).
    pub fn vtilde_index(&self, u: usize, j: usize) -> usize {
        self.v_offsets[u] + j
    }

    /// `deg(u) × p_u` matrix whose columns are the family at `u`.
    pub fn xi(&self, u: usize) -> &CMatrix {
        &self.xi[u]
    }

    /// Vertices of degree above one whose coin block is the identity.
    pub fn identity_vertices(&self) -> &[usize] {
        &self.identity_vertices
    }

    pub fn lambda_max(&self) -> Option<f64> {
        self.lambda_max
    }

    fn terminus_of(&self, a: usize) -> usize {
        self.x_offsets.partition_point(|&off| off <= a) - 1
    }

    /// `w_a ∈ C^{p_{t(a)}}`, the conjugated `a`-row of the family at `t(a)`.
    pub fn w(&self, a: usize) -> DVector<C64> {
        let u = self.terminus_of(a);
        let local = a - self.x_offsets[u];
        self.xi[u].row(local).transpose().map(|z| z.conj())
    }

    /// True when every block is the normalized all-ones vector.
    pub fn is_grover(&self) -> bool {
        self.xi.iter().all(|b| {
            let s = 1.0 / (b.nrows() as f64).sqrt();
            b.ncols() == 1 && b.iter().all(|z| (z - C64::new(s, 0.0)).norm() < 1e-12)
        })
    }

    /// `dψ`, blockwise `(dψ)[u] = K_u ψ|X_u`.
    pub fn boundary_apply(&self, psi: &ArcState) -> Result<VertexState> {
        check_dim(self.n_arcs(), psi.len())?;
        let mut out = VertexState::zeros(self.vertex_dim());
        for (u, block) in self.xi.iter().enumerate() {
            let local = psi.rows(self.x_offsets[u], block.nrows());
            let image = block.ad_mul(&local);
            out.rows_mut(self.v_offsets[u], block.ncols())
                .copy_from(&image);
        }
        Ok(out)
    }

    /// `d*f`, blockwise `(d*f)|X_u = K_u* f[u]`, i.e. `(d*f)(a) = ⟨w_a, f[t(a)]⟩`.
    pub fn coboundary_apply(&self, f: &VertexState) -> Result<ArcState> {
        check_dim(self.vertex_dim(), f.len())?;
        let mut out = ArcState::zeros(self.n_arcs());
        for (u, block) in self.xi.iter().enumerate() {
            let local = f.rows(self.v_offsets[u], block.ncols());
            let image = block * local;
            out.rows_mut(self.x_offsets[u], block.nrows())
                .copy_from(&image);
        }
        Ok(out)
    }

    /// `C` apply, blockwise `C_u = 2Π_u − I`.
    pub fn coin_apply(&self, psi: &ArcState) -> Result<ArcState> {
        check_dim(self.n_arcs(), psi.len())?;
        let mut out = psi.clone();
        for (u, block) in self.xi.iter().enumerate() {
            let start = self.x_offsets[u];
            let local = psi.rows(start, block.nrows());
            let proj = block * block.ad_mul(&local);
            let mut dst = out.rows_mut(start, block.nrows());
            dst.copy_from(&(proj * C64::new(2.0, 0.0) - local));
        }
        Ok(out)
    }

    /// Dense `d` (`|Ṽ| × |A|`).
    pub fn boundary_matrix(&self) -> CMatrix {
        let mut d = CMatrix::zeros(self.vertex_dim(), self.n_arcs());
        for (u, block) in self.xi.iter().enumerate() {
            d.view_mut(
                (self.v_offsets[u], self.x_offsets[u]),
                (block.ncols(), block.nrows()),
            )
            .copy_from(&block.adjoint());
        }
        d
    }

    /// Dense block-diagonal coin assembled from `C_u = 2Π_u − I`.
    pub fn assemble_coin(&self) -> CMatrix {
        let n = self.n_arcs();
        let mut c = CMatrix::zeros(n, n);
        for (u, block) in self.xi.iter().enumerate() {
            let deg = block.nrows();
            let cu = block * block.adjoint() * C64::new(2.0, 0.0) - CMatrix::identity(deg, deg);
            let s = self.x_offsets[u];
            c.view_mut((s, s), (deg, deg)).copy_from(&cu);
        }
        c
    }

    /// Local coin block `C_u`.
    pub fn local_coin(&self, u: usize) -> CMatrix {
        let block = &self.xi[u];
        let deg = block.nrows();
        block * block.adjoint() * C64::new(2.0, 0.0) - CMatrix::identity(deg, deg)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(WalkError::DimensionMismatch { expected, found })
    }
}

/// Parses `re,im` (or a bare real `re`).
pub fn parse_complex(tok: &str) -> Option<C64> {
    match tok.split_once(',') {
        Some((re, im)) => Some(C64::new(re.trim().parse().ok()?, im.trim().parse().ok()?)),
        None => Some(C64::new(tok.parse().ok()?, 0.0)),
    }
}

/// Parses a real square matrix given as whitespace separated rows.
pub fn parse_real_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let row = body
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>().map_err(|_| WalkError::Parse {
                    line: i + 1,
                    msg: format!("`{t}` is not a number"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(WalkError::Hamiltonian(format!(
            "row {bad} has {} entries, expected {n}",
            rows[bad].len()
        )));
    }
    Ok(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_vector, to_complex, MaxModulus};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn coisometry_defects(cf: &CoinFamily) -> (f64, f64, f64) {
        let d = cf.boundary_matrix();
        let n = cf.n_arcs();
        let ddstar = &d * d.adjoint() - CMatrix::identity(cf.vertex_dim(), cf.vertex_dim());
        let coin = cf.assemble_coin();
        let via_d = d.adjoint() * &d * c(2.0) - CMatrix::identity(n, n);
        let sq = &coin * &coin - CMatrix::identity(n, n);
        (
            ddstar.max_modulus(),
            (&coin - via_d).max_modulus(),
            sq.max_modulus(),
        )
    }

    #[test]
    fn grover_families() {
        let k3 = Graph::complete(3).unwrap();
        let cf = CoinFamily::grover(&k3);
        for u in 0..3 {
            assert_eq!(cf.rank(u), 1);
            assert!(cf
                .xi(u)
                .iter()
                .all(|z| (z - c(0.5f64.sqrt())).norm() < 1e-15));
        }
        let p2 = Graph::path(2).unwrap();
        let cf = CoinFamily::grover(&p2);
        assert_eq!(cf.local_coin(0), CMatrix::identity(1, 1));
        let star = Graph::star(3).unwrap();
        let cf = CoinFamily::grover(&star);
        assert!(cf
            .xi(0)
            .iter()
            .all(|z| (z - c(1.0 / 3f64.sqrt())).norm() < 1e-15));
        assert!(cf.is_grover());
        assert!(cf.identity_vertices().is_empty());
    }

    #[test]
    fn grover_blocks() {
        let k4 = Graph::complete(4).unwrap();
        let cf = CoinFamily::grover(&k4);
        let gr3 = cf.local_coin(0);
        for r in 0..3 {
            for s in 0..3 {
                let expect = if r == s { -1.0 / 3.0 } else { 2.0 / 3.0 };
                assert!((gr3[(r, s)] - c(expect)).norm() < 1e-15);
            }
        }
        let c4 = Graph::cycle(4).unwrap();
        let gr2 = CoinFamily::grover(&c4).local_coin(0);
        assert!(
            (gr2 - CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])).max_modulus()
                < 1e-15
        );
    }

    #[test]
    fn basis_rows_reproduce_grover() {
        let g = Graph::cycle(5).unwrap();
        let grover = CoinFamily::grover(&g);
        let text = grover.to_basis_file();
        let parsed = CoinFamily::parse_basis_file(&g, &text).unwrap();
        assert_eq!(parsed.kind(), CoinKind::Basis);
        assert!((parsed.assemble_coin() - grover.assemble_coin()).max_modulus() < 1e-15);
        assert!(parsed.is_grover());
    }

    #[test]
    fn basis_identity_flagged() {
        let g = Graph::cycle(4).unwrap();
        let mut rows: Vec<Vec<Vec<C64>>> = (0..4)
            .map(|_| vec![vec![c(0.5f64.sqrt()), c(0.5f64.sqrt())]])
            .collect();
        rows[2] = vec![vec![c(1.0), c(0.0)], vec![c(0.0), c(1.0)]];
        let cf = CoinFamily::from_rows(&g, &rows).unwrap();
        assert_eq!(cf.identity_vertices(), &[2]);
        assert_eq!(cf.local_coin(2), CMatrix::identity(2, 2));
    }

    #[test]
    fn basis_antisymmetric_row() {
        // 2ξξ* − I with ξ = (1, −1)/√2 equals [[0, −1], [−1, 0]]
        let g = Graph::cycle(4).unwrap();
        let s = 0.5f64.sqrt();
        let rows: Vec<Vec<Vec<C64>>> = (0..4).map(|_| vec![vec![c(s), c(-s)]]).collect();
        let cf = CoinFamily::from_rows(&g, &rows).unwrap();
        let expect = CMatrix::from_row_slice(2, 2, &[c(0.0), c(-1.0), c(-1.0), c(0.0)]);
        assert!((cf.local_coin(1) - expect).max_modulus() < 1e-15);
    }

    #[test]
    fn basis_errors() {
        let g = Graph::cycle(3).unwrap();
        let bad = "v 0 1\n1,0 1,0\nv 1 1\n0.7071067811865476,0 0.7071067811865476,0\nv 2 1\n0.7071067811865476,0 0.7071067811865476,0\n";
        match CoinFamily::parse_basis_file(&g, bad) {
            Err(WalkError::NonOrthonormal {
                vertex: 0,
                residual,
            }) => assert!((residual - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let short = "v 0 1\n1,0\nv 1 1\n1,0 0,0\nv 2 1\n1,0 0,0\n";
        assert!(matches!(
            CoinFamily::parse_basis_file(&g, short),
            Err(WalkError::RowLength {
                vertex: 0,
                expected: 2,
                found: 1
            })
        ));
        let missing = "v 0 1\n1,0 0,0\n";
        assert!(matches!(
            CoinFamily::parse_basis_file(&g, missing),
            Err(WalkError::CoinFile(_))
        ));
        assert!(matches!(
            CoinFamily::parse_basis_file(&g, "v 0 1\n1,0 zz\n"),
            Err(WalkError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn hamiltonian_p2() {
        let g = Graph::path(2).unwrap();
        let ham = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let cf = CoinFamily::from_hamiltonian(&g, &ham).unwrap();
        assert!((cf.lambda_max().unwrap() - 1.0).abs() < 1e-14);
        assert!((cf.xi(0)[(0, 0)] - c(1.0)).norm() < 1e-14);
        assert!((cf.xi(1)[(0, 0)] - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn hamiltonian_k3_is_grover() {
        let g = Graph::complete(3).unwrap();
        let ham = DMatrix::from_fn(3, 3, |r, s| if r == s { 0.0 } else { 1.0 });
        let cf = CoinFamily::from_hamiltonian(&g, &ham).unwrap();
        assert!((cf.lambda_max().unwrap() - 2.0).abs() < 1e-13);
        assert!(
            (cf.assemble_coin() - CoinFamily::grover(&g).assemble_coin()).max_modulus() < 1e-12
        );
    }

    #[test]
    fn hamiltonian_rejections() {
        let g = Graph::complete(3).unwrap();
        let neg = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 1.0, -1.0, 0.0, 1.0, 1.0, 1.0, 0.0]);
        assert!(
            matches!(CoinFamily::from_hamiltonian(&g, &neg), Err(WalkError::Hamiltonian(m)) if m.contains("negative"))
        );
        let p3 = Graph::path(3).unwrap();
        let full = DMatrix::from_fn(3, 3, |r, s| if r == s { 0.0 } else { 1.0 });
        assert!(
            matches!(CoinFamily::from_hamiltonian(&p3, &full), Err(WalkError::Hamiltonian(m)) if m.contains("support"))
        );
        let asym = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0]);
        assert!(CoinFamily::from_hamiltonian(&g, &asym).is_err());
    }

    #[test]
    fn lattice_rows_and_w_vectors() {
        let g = Graph::torus3d(3).unwrap();
        let cf = CoinFamily::lattice3d(&g).unwrap();
        let omega = C64::from_polar(1.0, 2.0 * PI / 3.0);
        let s = c(1.0 / 6f64.sqrt());
        for a in 0..g.n_arcs() {
            let w = cf.w(a);
            let expect = match g.torus_direction(a).unwrap().abs() {
                1 => [s, s],
                2 => [omega * omega * s, omega * s],
                _ => [omega * s, omega * omega * s],
            };
            assert!((w[0] - expect[0]).norm() < 1e-15 && (w[1] - expect[1]).norm() < 1e-15);
        }
        assert!(matches!(
            CoinFamily::lattice3d(&Graph::cycle(4).unwrap()),
            Err(WalkError::NotTorus)
        ));
    }

    #[test]
    fn lattice_coin_is_minus_sigma_grover() {
        let g = Graph::torus3d(3).unwrap();
        let cf = CoinFamily::lattice3d(&g).unwrap();
        for u in [0, 13, 26] {
            let cu = cf.local_coin(u);
            let dirs: Vec<i8> = g
                .x_range(u)
                .map(|a| g.torus_direction(a).unwrap())
                .collect();
            // (−σ Gr(6))_{ab} = −1/3 + [dir(b) = −dir(a)]
            for (i, &da) in dirs.iter().enumerate() {
                for (k, &db) in dirs.iter().enumerate() {
                    let expect = -1.0 / 3.0 + if db == -da { 1.0 } else { 0.0 };
                    assert!((cu[(i, k)] - c(expect)).norm() < 1e-12);
                }
            }
            assert!((&cu * &cu - CMatrix::identity(6, 6)).max_modulus() < 1e-12);
        }
    }

    #[test]
    fn boundary_examples() {
        let g = Graph::complete(4).unwrap();
        let cf = CoinFamily::grover(&g);
        // ξ_u embedded on X_u maps to δ_u
        let u = 2;
        let mut psi = ArcState::zeros(g.n_arcs());
        for a in g.x_range(u) {
            psi[a] = c(1.0 / 3f64.sqrt());
        }
        let f = cf.boundary_apply(&psi).unwrap();
        for v in 0..4 {
            let expect = if v == u { 1.0 } else { 0.0 };
            assert!((f[v] - c(expect)).norm() < 1e-15);
        }
        // orthogonal to every ξ_u
        let mut psi = ArcState::zeros(g.n_arcs());
        let r = g.x_range(1);
        psi[r.start] = c(1.0);
        psi[r.start + 1] = c(-1.0);
        assert!(cf.boundary_apply(&psi).unwrap().max_modulus() < 1e-15);
        // coboundary of δ_u is deg^{-1/2} 1_{X_u}
        let mut f = VertexState::zeros(4);
        f[3] = c(1.0);
        let back = cf.coboundary_apply(&f).unwrap();
        for a in 0..g.n_arcs() {
            let expect = if g.arc(a).terminus == 3 {
                1.0 / 3f64.sqrt()
            } else {
                0.0
            };
            assert!((back[a] - c(expect)).norm() < 1e-15);
        }
        let p2 = Graph::path(2).unwrap();
        let cf = CoinFamily::grover(&p2);
        let mut delta = ArcState::zeros(2);
        delta[1] = c(1.0);
        let f = cf.boundary_apply(&delta).unwrap();
        assert_eq!(f[1], c(1.0));
        assert_eq!(f[0], c(0.0));
    }

    #[test]
    fn boundary_dimension_errors() {
        let g = Graph::cycle(3).unwrap();
        let cf = CoinFamily::grover(&g);
        assert!(matches!(
            cf.boundary_apply(&ArcState::zeros(5)),
            Err(WalkError::DimensionMismatch {
                expected: 6,
                found: 5
            })
        ));
        assert!(matches!(
            cf.coboundary_apply(&VertexState::zeros(2)),
            Err(WalkError::DimensionMismatch {
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn adjointness_and_coisometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
        let families = [
            CoinFamily::grover(&Graph::star(3).unwrap()),
            CoinFamily::lattice3d(&Graph::torus3d(3).unwrap()).unwrap(),
        ];
        for cf in &families {
            for _ in 0..5 {
                let psi = random_vector(&mut rng, cf.n_arcs());
                let f = random_vector(&mut rng, cf.vertex_dim());
                let lhs = cf.boundary_apply(&psi).unwrap().dotc(&f);
                let rhs = psi.dotc(&cf.coboundary_apply(&f).unwrap());
                assert!((lhs - rhs).norm() < 1e-12);
                let round = cf
                    .boundary_apply(&cf.coboundary_apply(&f).unwrap())
                    .unwrap();
                assert!((round - &f).max_modulus() < 1e-13);
                let via_matrix = cf.assemble_coin() * &psi;
                assert!((cf.coin_apply(&psi).unwrap() - via_matrix).max_modulus() < 1e-13);
            }
            let (a, b, s) = coisometry_defects(cf);
            assert!(a < 1e-12 && b < 1e-12 && s < 1e-12, "{a} {b} {s}");
            let coin = cf.assemble_coin();
            assert!((&coin - coin.adjoint()).max_modulus() < 1e-15);
        }
    }

    #[test]
    fn real_matrix_parsing() {
        let m = parse_real_matrix("0 1\n# c\n1 0\n").unwrap();
        assert_eq!(to_complex(&m)[(0, 1)], c(1.0));
        assert!(parse_real_matrix("0 1\n1\n").is_err());
        assert_eq!(parse_complex("1.5,-2"), Some(C64::new(1.5, -2.0)));
        assert_eq!(parse_complex("3"), Some(c(3.0)));
        assert_eq!(parse_complex("a,b"), None);
    }
}
