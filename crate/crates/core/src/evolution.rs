//! Discrete- and continuous-time evolution and the checks relating them.
//!
//! The discrete walk applies `U(ε/2)²` per step. With `ε = t/N` it approaches
//! `e^{itH}` at rate `O(1/N)`; [`convergence_scan`] measures that rate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, WalkError};
use crate::linalg::{matrix_power, random_unit_vector, spectral_norm, HermitianEigen};
use crate::operators::{check_epsilon, LiftedPair, WalkOperators};
use crate::{ArcState, CMatrix, VertexState, C64};

/// Default seed for probe states and random test inputs.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Number of random unit states used by the state-probe metric.
pub const PROBE_STATES: usize = 8;

const I: C64 = C64::new(0.0, 1.0);

/// `ψ_N` with `ψ_{n+1} = U(ε/2)² ψ_n`, applied matrix-free.
pub fn discrete_evolve(
    ops: &WalkOperators,
    psi0: &ArcState,
    eps: f64,
    steps: usize,
) -> Result<ArcState> {
    check_epsilon(eps)?;
    let half = eps / 2.0;
    let mut psi = psi0.clone();
    for _ in 0..2 * steps {
        psi = ops.step_apply(half, &psi)?;
    }
    if steps == 0 {
        // dimension check still applies
        ops.flip_flop_apply(&psi)?;
    }
    Ok(psi)
}

/// `e^{itH} φ₀` by Hermitian eigendecomposition of the dense `H`.
pub fn continuous_evolve(ops: &WalkOperators, phi0: &ArcState, t: f64) -> Result<ArcState> {
    let dense = ops.dense()?;
    if phi0.len() != ops.n_arcs() {
        return Err(WalkError::DimensionMismatch {
            expected: ops.n_arcs(),
            found: phi0.len(),
        });
    }
    if t == 0.0 {
        return Ok(phi0.clone());
    }
    Ok(dense.hamiltonian_eigen.exp_i(t) * phi0)
}

/// `e^{itH} φ₀` by a Taylor series in matrix-free `H` applications. Since
/// `‖H‖ ≤ 1` the time is split into pieces of length at most ½ and each
/// series is summed until the terms drop below machine precision.
pub fn continuous_evolve_matrix_free(
    ops: &WalkOperators,
    phi0: &ArcState,
    t: f64,
) -> Result<ArcState> {
    let pieces = (t.abs() / 0.5).ceil().max(1.0) as usize;
    let dt = t / pieces as f64;
    let mut phi = phi0.clone();
    for _ in 0..pieces {
        let mut term = phi.clone();
        let mut sum = phi.clone();
        for k in 1..=60 {
            term = ops.hamiltonian_apply(&term)? * (I * (dt / k as f64));
            sum += &term;
            if term.norm() <= 1e-18 * sum.norm().max(1.0) {
                break;
            }
        }
        phi = sum;
    }
    Ok(phi)
}

/// Dense `U(t/2N)^{2N}`.
pub fn discrete_propagator(ops: &WalkOperators, t: f64, steps: usize) -> Result<CMatrix> {
    if steps == 0 {
        let n = ops.n_arcs();
        ops.dense()?;
        return Ok(CMatrix::identity(n, n));
    }
    let u = ops.step_matrix(t / (2.0 * steps as f64))?;
    Ok(matrix_power(&u, 2 * steps))
}

/// How the distance between `e^{itH}` and `U(t/2N)^{2N}` is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMetric {
    /// Spectral norm of the dense difference.
    OperatorNorm,
    /// Largest state error over [`PROBE_STATES`] seeded random unit states,
    /// fully matrix-free.
    StateProbe { seed: u64 },
}

impl ErrorMetric {
    pub fn name(self) -> &'static str {
        match self {
            ErrorMetric::OperatorNorm => "operator_norm",
            ErrorMetric::StateProbe { .. } => "state_probe",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub t: f64,
    pub n_values: Vec<usize>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `ln error` against `ln N`; `None` with fewer
    /// than two positive errors.
    pub fitted_slope: Option<f64>,
    /// `max_N N·error`.
    pub c0_estimate: f64,
    /// True when the errors vanish identically (`t = 0`).
    pub exact: bool,
    pub metric: String,
    pub graph: String,
    pub coin: String,
}

impl ConvergenceRecord {
    /// `N·error` per entry.
    pub fn scaled_errors(&self) -> Vec<f64> {
        self.n_values
            .iter()
            .zip(&self.errors)
            .map(|(&n, &e)| n as f64 * e)
            .collect()
    }

    /// True when `error(N_{k+1}) < error(N_k)` for all entries with `N_k ≥ from`.
    pub fn is_monotone_from(&self, from: usize) -> bool {
        self.n_values
            .windows(2)
            .zip(self.errors.windows(2))
            .filter(|(n, _)| n[0] >= from)
            .all(|(_, e)| e[1] < e[0])
    }

    /// Relative spread `(max − min) / max` of `N·error` over the last `k` entries.
    pub fn c0_spread(&self, k: usize) -> f64 {
        let scaled = self.scaled_errors();
        let tail = &scaled[scaled.len().saturating_sub(k)..];
        let max = tail.iter().copied().fold(f64::MIN, f64::max);
        let min = tail.iter().copied().fold(f64::MAX, f64::min);
        if max <= 0.0 {
            0.0
        } else {
            (max - min) / max
        }
    }

    /// CSV with header `N,error,N_error`, values with 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,error,N_error\n");
        for (&n, (&e, s)) in self
            .n_values
            .iter()
            .zip(self.errors.iter().zip(self.scaled_errors()))
        {
            out.push_str(&format!("{n},{e:.11e},{s:.11e}\n"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::json!({
            "t": self.t,
            "metric": self.metric,
            "graph": self.graph,
            "coin": self.coin,
            "exact": self.exact,
            "slope": self.fitted_slope,
            "c0_estimate": self.c0_estimate,
            "rows": self.n_values.iter().zip(self.errors.iter().zip(self.scaled_errors()))
                .map(|(n, (e, s))| serde_json::json!({"N": n, "error": e, "N_error": s}))
                .collect::<Vec<_>>(),
        });
        serde_json::to_string_pretty(&value).expect("record serializes")
    }
}

/// Least-squares slope of `ln y` against `ln x` over points with `y > 0`.
pub fn log_log_slope(xs: &[usize], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(_, &y)| y > 0.0)
        .map(|(&x, &y)| ((x as f64).ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Measures `‖e^{itH} − U(t/2N)^{2N}‖` for each `N`.
pub fn convergence_scan(
    ops: &WalkOperators,
    t: f64,
    n_values: &[usize],
    metric: ErrorMetric,
) -> Result<ConvergenceRecord> {
    if !t.is_finite() || t < 0.0 {
        return Err(WalkError::InvalidArgument(format!(
            "time must be nonnegative, got {t}"
        )));
    }
    if n_values.is_empty() || n_values.contains(&0) {
        return Err(WalkError::InvalidArgument(
            "step counts must be positive".into(),
        ));
    }
    if n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(WalkError::NonIncreasingSteps);
    }
    let exact = t == 0.0;
    let errors: Vec<f64> = if exact {
        vec![0.0; n_values.len()]
    } else {
        match metric {
            ErrorMetric::OperatorNorm => {
                let target = ops.dense()?.hamiltonian_eigen.exp_i(t);
                n_values
                    .par_iter()
                    .map(|&n| Ok(spectral_norm(&(&target - discrete_propagator(ops, t, n)?))))
                    .collect::<Result<_>>()?
            }
            ErrorMetric::StateProbe { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let probes: Vec<(ArcState, ArcState)> = (0..PROBE_STATES)
                    .map(|_| {
                        let phi = random_unit_vector(&mut rng, ops.n_arcs());
                        let target = continuous_evolve_matrix_free(ops, &phi, t)?;
                        Ok((phi, target))
                    })
                    .collect::<Result<_>>()?;
                n_values
                    .par_iter()
                    .map(|&n| {
                        probes.iter().try_fold(0.0f64, |acc, (phi, target)| {
                            let psi = discrete_evolve(ops, phi, t / n as f64, n)?;
                            Ok(acc.max((target - psi).norm()))
                        })
                    })
                    .collect::<Result<_>>()?
            }
        }
    };
    let fitted_slope = if exact {
        None
    } else {
        log_log_slope(n_values, &errors)
    };
    let c0_estimate = n_values
        .iter()
        .zip(&errors)
        .map(|(&n, &e)| n as f64 * e)
        .fold(0.0, f64::max);
    Ok(ConvergenceRecord {
        t,
        n_values: n_values.to_vec(),
        errors,
        fitted_slope,
        c0_estimate,
        exact,
        metric: metric.name().into(),
        graph: format!("V={} A={}", ops.graph().n_vertices(), ops.n_arcs()),
        coin: ops.coin().kind().name().into(),
    })
}

/// `e^{itT} g` using an eigendecomposition of `T` computed independently of `H`.
pub fn vertex_evolve(ops: &WalkOperators, g0: &VertexState, t: f64) -> Result<VertexState> {
    if g0.len() != ops.vertex_dim() {
        return Err(WalkError::DimensionMismatch {
            expected: ops.vertex_dim(),
            found: g0.len(),
        });
    }
    let eig = HermitianEigen::new(&ops.discriminant_assemble());
    Ok(eig.exp_i(t) * g0)
}

/// `‖e^{itT} g₀ − d e^{itH} d* g₀‖`.
pub fn vertex_schrodinger_check(ops: &WalkOperators, g0: &VertexState, t: f64) -> Result<f64> {
    let exact = vertex_evolve(ops, g0, t)?;
    let lifted = ops.coin().coboundary_apply(g0)?;
    let evolved = continuous_evolve(ops, &lifted, t)?;
    Ok((exact - ops.coin().boundary_apply(&evolved)?).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplacianResiduals {
    /// `‖f_t − e^{−it} d e^{itH} d* g‖`.
    pub exact: f64,
    /// `‖f_t − e^{−it} d U(t/2N)^{2N} d* g‖`.
    pub finite: f64,
}

/// Compares `f_t = e^{it(T−I)} g` with its reconstruction from the arc walk.
/// Requires the Grover coin.
pub fn laplacian_reproduction_check(
    ops: &WalkOperators,
    g0: &VertexState,
    t: f64,
    steps: usize,
) -> Result<LaplacianResiduals> {
    if !ops.coin().is_grover() {
        return Err(WalkError::NotGrover);
    }
    ops.dense()?;
    let phase = C64::from_polar(1.0, -t);
    let target = vertex_evolve(ops, g0, t)? * phase;
    let lifted = ops.coin().coboundary_apply(g0)?;
    let limit = continuous_evolve(ops, &lifted, t)?;
    let eps = if steps == 0 { 0.0 } else { t / steps as f64 };
    let discrete = discrete_evolve(ops, &lifted, eps, steps)?;
    let d = |psi: &ArcState| ops.coin().boundary_apply(psi).map(|f| f * phase);
    Ok(LaplacianResiduals {
        exact: (&target - d(&limit)?).norm(),
        finite: (&target - d(&discrete)?).norm(),
    })
}

/// `‖−i(U(ε/2)²ψ − ψ)/ε − Hψ‖`, which is `O(ε)`.
pub fn difference_quotient_check(ops: &WalkOperators, psi: &ArcState, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(WalkError::EpsilonOutOfRange(eps));
    }
    let stepped = discrete_evolve(ops, psi, eps, 1)?;
    let quotient = (stepped - psi) * (-I / eps);
    Ok((quotient - ops.hamiltonian_apply(psi)?).norm())
}

/// `exp(it T̃)` from the functional calculus of `T`:
/// `[[e^{itT}, 2iT sin(tT)], [0, e^{−itT}]]`.
pub fn exp_i_tilde_t(discriminant: &CMatrix, t: f64) -> CMatrix {
    let n = discriminant.nrows();
    let eig = HermitianEigen::new(discriminant);
    let mut out = CMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(&eig.exp_i(t));
    out.view_mut((0, n), (n, n))
        .copy_from(&eig.apply_function(|l| I * (2.0 * l * (t * l).sin())));
    out.view_mut((n, n), (n, n)).copy_from(&eig.exp_i(-t));
    out
}

/// `‖e^{itH} L f − L exp(itT̃) f‖`.
pub fn separated_dynamics_residual(ops: &WalkOperators, pair: &LiftedPair, t: f64) -> Result<f64> {
    let lifted = ops.lifted_apply(pair)?;
    let lhs = continuous_evolve(ops, &lifted, t)?;
    let moved = exp_i_tilde_t(&ops.dense()?.discriminant, t) * pair.stacked();
    let rhs = ops.lifted_apply(&LiftedPair::from_stacked(&moved))?;
    Ok((lhs - rhs).norm())
}

/// Norm of the component of `state` in the span of the orthonormal columns
/// of `basis`.
pub fn subspace_leakage(state: &ArcState, basis: &CMatrix) -> f64 {
    if basis.ncols() == 0 {
        return 0.0;
    }
    (basis.adjoint() * state).norm()
}
