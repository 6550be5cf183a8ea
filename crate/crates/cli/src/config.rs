//! Resolution of command-line graph, coin and state specifications.

use std::fmt;
use std::path::Path;

use szegedy_core::coin::{parse_complex, parse_real_matrix};
use szegedy_core::{
    ArcState, CoinFamily, Graph, VertexState, WalkOperators, C64, DENSE_ARC_BUDGET,
};

/// Configuration problems; reported with exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<szegedy_core::WalkError> for UsageError {
    fn from(e: szegedy_core::WalkError) -> Self {
        UsageError(e.to_string())
    }
}

fn read(path: &str) -> Result<String, UsageError> {
    std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {path}: {e}")))
}

const BUILTINS: [&str; 5] = ["path", "cycle", "complete", "star", "torus3d"];

/// A builtin family name with `--size`, or a path to an edge list.
pub fn build_graph(spec: &str, size: Option<usize>) -> Result<(Graph, String), UsageError> {
    if BUILTINS.contains(&spec) {
        let n = size
            .ok_or_else(|| UsageError(format!("--size is required for builtin graph `{spec}`")))?;
        let g = match spec {
            "path" => Graph::path(n),
            "cycle" => Graph::cycle(n),
            "complete" => Graph::complete(n),
            "star" => Graph::star(n),
            _ => Graph::torus3d(n),
        }?;
        return Ok((g, format!("{spec}({n})")));
    }
    if !Path::new(spec).exists() {
        return Err(UsageError(format!(
            "`{spec}` is neither a builtin graph ({}) nor an existing file",
            BUILTINS.join(", ")
        )));
    }
    if size.is_some() {
        return Err(UsageError("--size only applies to builtin graphs".into()));
    }
    Ok((Graph::parse_edge_list(&read(spec)?)?, spec.to_string()))
}

/// `grover`, `lattice3d`, `basis:<path>` or `hamiltonian:<path>`.
pub fn build_coin(spec: &str, g: &Graph) -> Result<CoinFamily, UsageError> {
    match spec.split_once(':') {
        None if spec == "grover" => Ok(CoinFamily::grover(g)),
        None if spec == "lattice3d" => CoinFamily::lattice3d(g)
            .map_err(|_| UsageError("the lattice3d coin requires a torus3d graph".into())),
        Some(("basis", path)) => Ok(CoinFamily::parse_basis_file(g, &read(path)?)?),
        Some(("hamiltonian", path)) => {
            let h = parse_real_matrix(&read(path)?)?;
            Ok(CoinFamily::from_hamiltonian(g, &h)?)
        }
        _ => Err(UsageError(format!(
            "unknown coin `{spec}`; expected grover, lattice3d, basis:<path> or hamiltonian:<path>"
        ))),
    }
}

/// Operators with dense forms when the graph fits the budget.
pub fn build_operators(g: Graph, coin: CoinFamily) -> Result<WalkOperators, UsageError> {
    if g.n_arcs() <= DENSE_ARC_BUDGET {
        Ok(WalkOperators::with_dense(g, coin)?)
    } else {
        Ok(WalkOperators::new(g, coin)?)
    }
}

/// `arc:<i>`, `vertex:<u>` (the lift `d*δ_u`, first component) or
/// `file:<path>` with one `re,im` amplitude per line.
pub fn build_state(spec: &str, ops: &WalkOperators) -> Result<ArcState, UsageError> {
    let n = ops.n_arcs();
    let (kind, arg) = spec.split_once(':').ok_or_else(|| {
        UsageError(format!(
            "bad state `{spec}`; expected arc:<i>, vertex:<u> or file:<path>"
        ))
    })?;
    let index = || {
        arg.parse::<usize>()
            .map_err(|_| UsageError(format!("bad index `{arg}` in state `{spec}`")))
    };
    match kind {
        "arc" => {
            let i = index()?;
            if i >= n {
                return Err(UsageError(format!("arc {i} out of range for {n} arcs")));
            }
            let mut psi = ArcState::zeros(n);
            psi[i] = C64::new(1.0, 0.0);
            Ok(psi)
        }
        "vertex" => {
            let u = index()?;
            let g = ops.graph();
            if u >= g.n_vertices() {
                return Err(UsageError(format!(
                    "vertex {u} out of range for {} vertices",
                    g.n_vertices()
                )));
            }
            let mut f = VertexState::zeros(ops.vertex_dim());
            f[ops.coin().block_offset(u)] = C64::new(1.0, 0.0);
            Ok(ops.coin().coboundary_apply(&f)?)
        }
        "file" => {
            let text = read(arg)?;
            let amps = text
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .enumerate()
                .map(|(i, l)| {
                    parse_complex(l)
                        .ok_or_else(|| UsageError(format!("state entry {i}: bad amplitude `{l}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if amps.len() != n {
                return Err(UsageError(format!(
                    "state file has {} amplitudes, graph has {n} arcs",
                    amps.len()
                )));
            }
            Ok(ArcState::from_vec(amps))
        }
        _ => Err(UsageError(format!("bad state kind `{kind}`"))),
    }
}

/// Comma-separated step counts.
pub fn parse_n_list(text: &str) -> Result<Vec<usize>, UsageError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| UsageError(format!("bad step count `{t}` in --n-list")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_graphs() {
        let (g, name) = build_graph("cycle", Some(4)).unwrap();
        assert_eq!((g.n_vertices(), g.n_arcs()), (4, 8));
        assert_eq!(name, "cycle(4)");
        assert!(build_graph("cycle", None).is_err());
        assert!(build_graph("no-such-graph", Some(3)).is_err());
    }

    #[test]
    fn coins_and_states() {
        let (g, _) = build_graph("cycle", Some(4)).unwrap();
        assert!(build_coin("lattice3d", &g).is_err());
        assert!(build_coin("magic", &g).is_err());
        let coin = build_coin("grover", &g).unwrap();
        let ops = build_operators(g, coin).unwrap();
        let psi = build_state("vertex:0", &ops).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-15);
        assert_eq!(build_state("arc:3", &ops).unwrap()[3], C64::new(1.0, 0.0));
        assert!(build_state("arc:8", &ops).is_err());
        assert!(build_state("vertex", &ops).is_err());
    }

    #[test]
    fn n_lists() {
        assert_eq!(parse_n_list("16, 32,64").unwrap(), vec![16, 32, 64]);
        assert!(parse_n_list("16,x").is_err());
    }
}
