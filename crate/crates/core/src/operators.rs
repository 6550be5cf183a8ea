//! Shift, step, Hamiltonian, discriminant and lifted operators.
//!
//! Every operator has a matrix-free application on [`ArcState`]s. Dense forms
//! are assembled once by [`WalkOperators::with_dense`] for graphs within
//! [`DENSE_ARC_BUDGET`] arcs.

use crate::coin::CoinFamily;
use crate::error::{Result, WalkError};
use crate::graph::Graph;
use crate::linalg::{hstack, HermitianEigen};
use crate::{ArcState, CMatrix, VertexState, C64};

/// Largest arc count for which dense matrices are assembled.
pub const DENSE_ARC_BUDGET: usize = 4096;

const I: C64 = C64::new(0.0, 1.0);

/// An element `(f₁, f₂)` of `Ṽ ⊕ Ṽ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPair {
    pub first: VertexState,
    pub second: VertexState,
}

impl LiftedPair {
    pub fn new(first: VertexState, second: VertexState) -> Self {
        Self { first, second }
    }

    pub fn from_stacked(v: &VertexState) -> Self {
        let n = v.len() / 2;
        Self {
            first: v.rows(0, n).into_owned(),
            second: v.rows(n, n).into_owned(),
        }
    }

    pub fn stacked(&self) -> VertexState {
        let n = self.first.len();
        let mut out = VertexState::zeros(n + self.second.len());
        out.rows_mut(0, n).copy_from(&self.first);
        out.rows_mut(n, self.second.len()).copy_from(&self.second);
        out
    }
}

/// Dense forms, built once.
#[derive(Debug, Clone)]
pub struct DenseOperators {
    pub flip_flop: CMatrix,
    pub coin: CMatrix,
    /// `d`, `|Ṽ| × |A|`.
    pub boundary: CMatrix,
    pub hamiltonian: CMatrix,
    pub discriminant: CMatrix,
    /// `L = [d*, S_o d*]`, `|A| × 2|Ṽ|`.
    pub lifted: CMatrix,
    pub tilde_t: CMatrix,
    pub hamiltonian_eigen: HermitianEigen,
}

#[derive(Debug, Clone)]
pub struct WalkOperators {
    graph: Graph,
    coin: CoinFamily,
    dense: Option<DenseOperators>,
}

pub fn check_epsilon(eps: f64) -> Result<()> {
    if eps.is_finite() && (0.0..=1.0).contains(&eps) {
        Ok(())
    } else {
        Err(WalkError::EpsilonOutOfRange(eps))
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(WalkError::DimensionMismatch { expected, found })
    }
}

impl WalkOperators {
    /// Matrix-free operators.
    pub fn new(graph: Graph, coin: CoinFamily) -> Result<Self> {
        check_dim(graph.n_arcs(), coin.n_arcs())?;
        check_dim(graph.n_vertices(), coin.n_vertices())?;
        for u in 0..graph.n_vertices() {
            check_dim(graph.degree(u), coin.xi(u).nrows())?;
        }
        Ok(Self {
            graph,
            coin,
            dense: None,
        })
    }

    /// Operators with all dense forms assembled.
    pub fn with_dense(graph: Graph, coin: CoinFamily) -> Result<Self> {
        let mut ops = Self::new(graph, coin)?;
        let arcs = ops.graph.n_arcs();
        if arcs > DENSE_ARC_BUDGET {
            return Err(WalkError::DenseBudget {
                arcs,
                budget: DENSE_ARC_BUDGET,
            });
        }
        let flip_flop = flip_flop_matrix(&ops.graph);
        let coin = ops.coin.assemble_coin();
        let boundary = ops.coin.boundary_matrix();
        let hamiltonian = (&flip_flop + &coin * &flip_flop * &coin) * C64::new(0.5, 0.0);
        let discriminant = ops.discriminant_assemble();
        let dstar = boundary.adjoint();
        let lifted = hstack(arcs, &[&dstar, &(&flip_flop * &dstar)]);
        let tilde_t = tilde_t_from(&discriminant);
        let hamiltonian_eigen = HermitianEigen::new(&hamiltonian);
        ops.dense = Some(DenseOperators {
            flip_flop,
            coin,
            boundary,
            hamiltonian,
            discriminant,
            lifted,
            tilde_t,
            hamiltonian_eigen,
        });
        Ok(ops)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn coin(&self) -> &CoinFamily {
        &self.coin
    }

    pub fn n_arcs(&self) -> usize {
        self.graph.n_arcs()
    }

    pub fn vertex_dim(&self) -> usize {
        self.coin.vertex_dim()
    }

    pub fn dense(&self) -> Result<&DenseOperators> {
        self.dense
            .as_ref()
            .ok_or(if self.n_arcs() > DENSE_ARC_BUDGET {
                WalkError::DenseBudget {
                    arcs: self.n_arcs(),
                    budget: DENSE_ARC_BUDGET,
                }
            } else {
                WalkError::DenseUnavailable
            })
    }

    /// `(S_o ψ)(a) = ψ(ā)`.
    pub fn flip_flop_apply(&self, psi: &ArcState) -> Result<ArcState> {
        check_dim(self.n_arcs(), psi.len())?;
        let inv = self.graph.inverse_table();
        Ok(ArcState::from_fn(psi.len(), |a, _| psi[inv[a]]))
    }

    /// `S(ε)ψ = √(1−ε²) ψ + iε S_o ψ`.
    pub fn shift_apply(&self, eps: f64, psi: &ArcState) -> Result<ArcState> {
        check_epsilon(eps)?;
        let flipped = self.flip_flop_apply(psi)?;
        let stay = C64::new((1.0 - eps * eps).sqrt(), 0.0);
        Ok(psi * stay + flipped * (I * eps))
    }

    /// `U(ε)ψ = S(ε) C ψ`.
    pub fn step_apply(&self, eps: f64, psi: &ArcState) -> Result<ArcState> {
        check_epsilon(eps)?;
        let coined = self.coin.coin_apply(psi)?;
        self.shift_apply(eps, &coined)
    }

    /// `Hψ = ½(S_o + C S_o C)ψ` without assembling `H`.
    pub fn hamiltonian_apply(&self, psi: &ArcState) -> Result<ArcState> {
        let so = self.flip_flop_apply(psi)?;
        let csoc = self
            .coin
            .coin_apply(&self.flip_flop_apply(&self.coin.coin_apply(psi)?)?)?;
        Ok((so + csoc) * C64::new(0.5, 0.0))
    }

    /// Dense `H = ½(S_o + C S_o C)`.
    pub fn hamiltonian(&self) -> Result<&CMatrix> {
        Ok(&self.dense()?.hamiltonian)
    }

    /// Dense `U(ε) = S(ε) C`.
    pub fn step_matrix(&self, eps: f64) -> Result<CMatrix> {
        check_epsilon(eps)?;
        let d = self.dense()?;
        let n = self.n_arcs();
        let shift = CMatrix::identity(n, n) * C64::new((1.0 - eps * eps).sqrt(), 0.0)
            + &d.flip_flop * (I * eps);
        Ok(shift * &d.coin)
    }

    /// Discriminant `T = d S_o d*` on `Ṽ`, accumulated arc by arc as
    /// `P_v T P_u = Σ_{a: u→v} w_a w_ā*`.
    pub fn discriminant_assemble(&self) -> CMatrix {
        let n = self.coin.vertex_dim();
        let mut t = CMatrix::zeros(n, n);
        for (a, arc) in self.graph.arcs().iter().enumerate() {
            let abar = self.graph.inverse_table()[a];
            let block = self.coin.w(a) * self.coin.w(abar).adjoint();
            let (r0, c0) = (
                self.coin.block_offset(arc.terminus),
                self.coin.block_offset(arc.origin),
            );
            let mut view = t.view_mut((r0, c0), block.shape());
            view += &block;
        }
        t
    }

    /// `L(f₁, f₂) = d*f₁ + S_o d*f₂`.
    pub fn lifted_apply(&self, pair: &LiftedPair) -> Result<ArcState> {
        let a = self.coin.coboundary_apply(&pair.first)?;
        let b = self.coin.coboundary_apply(&pair.second)?;
        Ok(a + self.flip_flop_apply(&b)?)
    }

    pub fn lifted_matrix(&self) -> Result<&CMatrix> {
        Ok(&self.dense()?.lifted)
    }

    pub fn tilde_t(&self) -> Result<&CMatrix> {
        Ok(&self.dense()?.tilde_t)
    }
}

/// Dense flip-flop shift.
pub fn flip_flop_matrix(g: &Graph) -> CMatrix {
    let n = g.n_arcs();
    let mut s = CMatrix::zeros(n, n);
    for (a, &b) in g.inverse_table().iter().enumerate() {
        s[(a, b)] = C64::new(1.0, 0.0);
    }
    s
}

/// `T̃ = [[T, 2T²], [0, −T]]`.
pub fn tilde_t_from(t: &CMatrix) -> CMatrix {
    let n = t.nrows();
    let mut out = CMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(t);
    out.view_mut((0, n), (n, n))
        .copy_from(&(t * t * C64::new(2.0, 0.0)));
    out.view_mut((n, n), (n, n)).copy_from(&(-t));
    out
}
