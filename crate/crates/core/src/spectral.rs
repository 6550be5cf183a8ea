//! Spectral structure of the Hamiltonian `H`.
//!
//! The arc space splits as `𝓘 ⊕ 𝓑` with `𝓘 = range(L)` inherited from the
//! vertex side and `𝓑 = ker d ∩ ker dS_o`. On `𝓘` the spectrum of `H` is
//! `σ(T) ∪ σ(−T)`; `𝓑` splits further into the `±1` birth spaces `𝓑_±`.

use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, WalkError};
use crate::linalg::{
    cluster_values, compare_multisets, hstack, null_space, orthonormality_defect, orthonormalize,
    projector, range_basis, select_columns, vstack, Cluster, HermitianEigen, MaxModulus,
};
use crate::operators::WalkOperators;
use crate::{CMatrix, C64};

/// Gap tolerance for grouping eigenvalues.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Bound on projector distances.
pub const PROJECTOR_TOL: f64 = 1e-8;
/// Bound on `‖Hv − λv‖` for formula-built eigenvectors.
pub const EIGENVECTOR_TOL: f64 = 1e-9;
/// Bound on inner products between supposedly orthogonal pieces.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Orthonormal columns spanning a subspace of the arc space.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub basis: CMatrix,
    pub label: String,
}

impl SubspaceBasis {
    pub fn new(basis: CMatrix, label: impl Into<String>) -> Self {
        Self {
            basis,
            label: label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn projector(&self) -> CMatrix {
        projector(&self.basis)
    }

    pub fn orthonormality_defect(&self) -> f64 {
        orthonormality_defect(&self.basis)
    }
}

#[derive(Debug, Clone)]
pub struct BirthSpaces {
    pub all: SubspaceBasis,
    pub plus: SubspaceBasis,
    pub minus: SubspaceBasis,
    /// `‖P_𝓑 − P_{𝓑₊ ⊕ 𝓑₋}‖_F`.
    pub split_residual: f64,
}

/// `𝓑 = ker[d; dS_o]` and `𝓑_± = ker[C + I; S_o ∓ I]`.
pub fn birth_spaces(ops: &WalkOperators) -> Result<BirthSpaces> {
    let dense = ops.dense()?;
    let n = ops.n_arcs();
    let id = CMatrix::identity(n, n);
    let d = &dense.boundary;
    let d_so = d * &dense.flip_flop;
    let all = null_space(&vstack(n, &[d, &d_so]));
    let c_plus = &dense.coin + &id;
    let plus = null_space(&vstack(n, &[&c_plus, &(&dense.flip_flop - &id)]));
    let minus = null_space(&vstack(n, &[&c_plus, &(&dense.flip_flop + &id)]));
    let joined = orthonormalize(&hstack(n, &[&plus, &minus]));
    let split_residual = (projector(&all) - projector(&joined)).norm();
    Ok(BirthSpaces {
        all: SubspaceBasis::new(all, "B"),
        plus: SubspaceBasis::new(plus, "B+"),
        minus: SubspaceBasis::new(minus, "B-"),
        split_residual,
    })
}

/// Orthonormal basis of `𝓘 = d*𝓥 + S_od*𝓥 = range(L)`.
pub fn inherited_space(ops: &WalkOperators) -> Result<SubspaceBasis> {
    Ok(SubspaceBasis::new(range_basis(ops.lifted_matrix()?), "I"))
}

fn is_unit(lambda: f64) -> Option<f64> {
    if (lambda - 1.0).abs() <= CLUSTER_TOL {
        Some(1.0)
    } else if (lambda + 1.0).abs() <= CLUSTER_TOL {
        Some(-1.0)
    } else {
        None
    }
}

/// `σ(T) ∪ σ(−T)` with `±1` counted once per eigenvector of `T`, plus the
/// birth eigenvalues. Sorted ascending.
pub fn predicted_spectrum(eig_t: &[f64], dim_b_plus: usize, dim_b_minus: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * eig_t.len() + dim_b_plus + dim_b_minus);
    for &mu in eig_t {
        out.push(mu);
        if is_unit(mu).is_none() {
            out.push(-mu);
        }
    }
    out.extend(std::iter::repeat_n(1.0, dim_b_plus));
    out.extend(std::iter::repeat_n(-1.0, dim_b_minus));
    out.sort_by(f64::total_cmp);
    out
}

/// [`predicted_spectrum`] with the total size checked against `|A|`.
pub fn predicted_spectrum_checked(
    eig_t: &[f64],
    dim_b_plus: usize,
    dim_b_minus: usize,
    n_arcs: usize,
) -> Result<Vec<f64>> {
    let out = predicted_spectrum(eig_t, dim_b_plus, dim_b_minus);
    if out.len() != n_arcs {
        return Err(WalkError::MultiplicityDeficit {
            expected: n_arcs,
            found: out.len(),
        });
    }
    Ok(out)
}

/// Index ranges of gap clusters in an ascending list.
fn cluster_ranges(sorted: &[f64]) -> Vec<(f64, Range<usize>)> {
    let mut start = 0;
    cluster_values(sorted, CLUSTER_TOL)
        .into_iter()
        .map(|c| {
            let r = start..start + c.multiplicity;
            start = r.end;
            (c.center, r)
        })
        .collect()
}

/// Eigenvectors of the cluster containing `lambda`, or an empty matrix.
fn cluster_space(eig: &HermitianEigen, lambda: f64) -> CMatrix {
    for (_, r) in cluster_ranges(&eig.values) {
        let lo = eig.values[r.start] - CLUSTER_TOL;
        let hi = eig.values[r.end - 1] + CLUSTER_TOL;
        if (lo..=hi).contains(&lambda) {
            return select_columns(&eig.vectors, &r.collect::<Vec<_>>());
        }
    }
    CMatrix::zeros(eig.vectors.nrows(), 0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenspaceCheck {
    pub lambda: f64,
    pub dim_formula: usize,
    pub dim_numeric: usize,
    /// `‖P_formula − P_numeric‖_F`.
    pub projector_residual: f64,
    /// `max ‖Hv − λv‖` over an orthonormal basis of the formula space.
    pub eigenvector_residual: f64,
    /// Largest inner product between the two summands of the formula.
    pub summand_overlap: f64,
}

impl EigenspaceCheck {
    pub fn passes(&self) -> bool {
        self.dim_formula == self.dim_numeric
            && self.projector_residual < PROJECTOR_TOL
            && self.eigenvector_residual < EIGENVECTOR_TOL
            && self.summand_overlap < ORTHOGONALITY_TOL
    }
}

struct SpectralContext<'a> {
    ops: &'a WalkOperators,
    eig_t: HermitianEigen,
    births: BirthSpaces,
}

impl<'a> SpectralContext<'a> {
    fn new(ops: &'a WalkOperators) -> Result<Self> {
        let eig_t = HermitianEigen::new(&ops.dense()?.discriminant);
        let births = birth_spaces(ops)?;
        Ok(Self { ops, eig_t, births })
    }

    /// Formula space for `λ` as its two summands.
    fn formula(&self, lambda: f64) -> Result<(CMatrix, CMatrix)> {
        let dense = self.ops.dense()?;
        let n = self.ops.n_arcs();
        let d_adj = dense.boundary.adjoint();
        Ok(match is_unit(lambda) {
            Some(s) => {
                let z = cluster_space(&self.eig_t, s);
                let first = &dense.flip_flop * (&d_adj * z);
                let birth = if s > 0.0 {
                    &self.births.plus.basis
                } else {
                    &self.births.minus.basis
                };
                (first, birth.clone())
            }
            None => {
                let first = &d_adj * cluster_space(&self.eig_t, lambda);
                let shifted = &dense.flip_flop + CMatrix::identity(n, n) * C64::new(lambda, 0.0);
                let second = shifted * (&d_adj * cluster_space(&self.eig_t, -lambda));
                (first, second)
            }
        })
    }

    fn check(&self, lambda: f64) -> Result<EigenspaceCheck> {
        let dense = self.ops.dense()?;
        let eig_h = &dense.hamiltonian_eigen;
        let numeric = cluster_space(eig_h, lambda);
        let (a, b) = self.formula(lambda)?;
        if numeric.ncols() == 0 && a.ncols() + b.ncols() == 0 {
            return Err(WalkError::NotAnEigenvalue { lambda });
        }
        let n = self.ops.n_arcs();
        let qa = orthonormalize(&a);
        let qb = orthonormalize(&b);
        let summand_overlap = if qa.ncols() == 0 || qb.ncols() == 0 {
            0.0
        } else {
            (qa.adjoint() * &qb).max_modulus()
        };
        let q = orthonormalize(&hstack(n, &[&a, &b]));
        let shifted = &dense.hamiltonian - CMatrix::identity(n, n) * C64::new(lambda, 0.0);
        let image = shifted * &q;
        let eigenvector_residual = image.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
        Ok(EigenspaceCheck {
            lambda,
            dim_formula: q.ncols(),
            dim_numeric: numeric.ncols(),
            projector_residual: (projector(&q) - projector(&numeric)).norm(),
            eigenvector_residual,
            summand_overlap,
        })
    }
}

/// Compares the formula-built eigenspace for `λ` with the numerical one.
pub fn eigenspace_check(ops: &WalkOperators, lambda: f64) -> Result<EigenspaceCheck> {
    SpectralContext::new(ops)?.check(lambda)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub lambda: f64,
    pub mult_predicted: usize,
    pub mult_computed: usize,
    /// Projector residual; absent when the multiplicities differ.
    pub residual: Option<f64>,
    pub eigenvector_residual: Option<f64>,
    pub summand_overlap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub n_arcs: usize,
    pub eig_h: Vec<Cluster>,
    pub eig_t: Vec<Cluster>,
    pub predicted: Vec<Cluster>,
    pub dim_inherited: usize,
    pub dim_b_plus: usize,
    pub dim_b_minus: usize,
    /// `‖P_𝓑 − P_{𝓑₊ ⊕ 𝓑₋}‖_F`.
    pub birth_split_residual: f64,
    /// Largest `‖Hb ∓ b‖` over `b ∈ 𝓑_±`.
    pub birth_eigen_residual: f64,
    pub rows: Vec<ReportRow>,
    pub max_residual: f64,
    pub max_eigenvector_residual: f64,
    pub max_summand_overlap: f64,
    pub pass: bool,
}

impl SpectralReport {
    /// Rows whose predicted and computed multiplicities disagree.
    pub fn unmatched(&self) -> Vec<&ReportRow> {
        self.rows
            .iter()
            .filter(|r| r.mult_predicted != r.mult_computed)
            .collect()
    }

    pub fn multisets_match(&self) -> bool {
        self.unmatched().is_empty()
    }

    /// `dim 𝓘 + dim 𝓑₊ + dim 𝓑₋ = |A|`.
    pub fn dimensions_add_up(&self) -> bool {
        self.dim_inherited + self.dim_b_plus + self.dim_b_minus == self.n_arcs
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Full comparison of the predicted spectrum and eigenspaces with dense
/// numerics.
pub fn spectrum_report(ops: &WalkOperators) -> Result<SpectralReport> {
    let ctx = SpectralContext::new(ops)?;
    let dense = ops.dense()?;
    let n = ops.n_arcs();
    let eig_h = &dense.hamiltonian_eigen.values;
    let dim_b_plus = ctx.births.plus.dim();
    let dim_b_minus = ctx.births.minus.dim();
    let predicted = predicted_spectrum(&ctx.eig_t.values, dim_b_plus, dim_b_minus);
    let dim_inherited = inherited_space(ops)?.dim();

    let mut birth_eigen_residual: f64 = 0.0;
    for (basis, s) in [
        (&ctx.births.plus.basis, 1.0),
        (&ctx.births.minus.basis, -1.0),
    ] {
        if basis.ncols() > 0 {
            let r = &dense.hamiltonian * basis - basis * C64::new(s, 0.0);
            birth_eigen_residual =
                birth_eigen_residual.max(r.column_iter().map(|c| c.norm()).fold(0.0, f64::max));
        }
    }

    let joint = compare_multisets(&predicted, eig_h, CLUSTER_TOL);
    let rows: Vec<ReportRow> = joint
        .par_iter()
        .map(|row| {
            let check = if row.left == row.right {
                Some(ctx.check(row.lambda)?)
            } else {
                None
            };
            Ok(ReportRow {
                lambda: row.lambda,
                mult_predicted: row.left,
                mult_computed: row.right,
                residual: check.as_ref().map(|c| c.projector_residual),
                eigenvector_residual: check.as_ref().map(|c| c.eigenvector_residual),
                summand_overlap: check.as_ref().map(|c| c.summand_overlap),
            })
        })
        .collect::<Result<_>>()?;

    let max_of = |f: fn(&ReportRow) -> Option<f64>| rows.iter().filter_map(f).fold(0.0, f64::max);
    let max_residual = max_of(|r| r.residual);
    let max_eigenvector_residual = max_of(|r| r.eigenvector_residual);
    let max_summand_overlap = max_of(|r| r.summand_overlap);
    let in_range = eig_h.iter().all(|v| v.abs() <= 1.0 + 1e-10);

    let mut report = SpectralReport {
        n_arcs: n,
        eig_h: cluster_values(eig_h, CLUSTER_TOL),
        eig_t: cluster_values(&ctx.eig_t.values, CLUSTER_TOL),
        predicted: cluster_values(&predicted, CLUSTER_TOL),
        dim_inherited,
        dim_b_plus,
        dim_b_minus,
        birth_split_residual: ctx.births.split_residual,
        birth_eigen_residual,
        rows,
        max_residual,
        max_eigenvector_residual,
        max_summand_overlap,
        pass: false,
    };
    report.pass = report.multisets_match()
        && report.dimensions_add_up()
        && in_range
        && max_residual < PROJECTOR_TOL
        && max_eigenvector_residual < EIGENVECTOR_TOL
        && max_summand_overlap < ORTHOGONALITY_TOL
        && report.birth_split_residual < PROJECTOR_TOL
        && report.birth_eigen_residual < ORTHOGONALITY_TOL;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KerLCheck {
    pub dim_ker_l: usize,
    /// `‖P_{ker L} − P_{constructed}‖_F`.
    pub ker_l_residual: f64,
    /// Largest `‖P_{ker(T̃−λ)} − P_{constructed}‖_F` over `λ ∈ σ(T) ∪ σ(−T)`.
    pub tilde_residual: f64,
}

impl KerLCheck {
    pub fn max_residual(&self) -> f64 {
        self.ker_l_residual.max(self.tilde_residual)
    }
}

/// Kernel of `L` as `{(ζ₁ + ζ₋₁, −ζ₁ + ζ₋₁)}` and of `T̃ − λ` as
/// `{(ζ_λ + λζ₋λ, ζ₋λ)}`, with `ζ_μ ∈ ker(T − μ)`.
pub fn ker_l_structure_check(ops: &WalkOperators) -> Result<KerLCheck> {
    let dense = ops.dense()?;
    let m = ops.vertex_dim();
    let eig_t = HermitianEigen::new(&dense.discriminant);

    let z1 = cluster_space(&eig_t, 1.0);
    let zm = cluster_space(&eig_t, -1.0);
    let neg_z1 = -&z1;
    let built = hstack(
        2 * m,
        &[
            &vstack(z1.ncols(), &[&z1, &neg_z1]),
            &vstack(zm.ncols(), &[&zm, &zm]),
        ],
    );
    let kernel = null_space(&dense.lifted);
    let ker_l_residual = (projector(&kernel) - projector(&orthonormalize(&built))).norm();

    let mut lambdas: Vec<f64> = eig_t.values.iter().flat_map(|&v| [v, -v]).collect();
    lambdas.sort_by(f64::total_cmp);
    let centers: Vec<f64> = cluster_values(&lambdas, CLUSTER_TOL)
        .into_iter()
        .map(|c| c.center)
        .collect();
    let tilde_residual = centers
        .par_iter()
        .map(|&lambda| {
            let za = cluster_space(&eig_t, lambda);
            let zb = cluster_space(&eig_t, -lambda);
            let top = zb.clone() * C64::new(lambda, 0.0);
            let first = vstack(za.ncols(), &[&za, &CMatrix::zeros(m, za.ncols())]);
            let second = vstack(zb.ncols(), &[&top, &zb]);
            let built = orthonormalize(&hstack(2 * m, &[&first, &second]));
            let shifted = &dense.tilde_t - CMatrix::identity(2 * m, 2 * m) * C64::new(lambda, 0.0);
            (projector(&null_space(&shifted)) - projector(&built)).norm()
        })
        .reduce(|| 0.0, f64::max);

    Ok(KerLCheck {
        dim_ker_l: kernel.ncols(),
        ker_l_residual,
        tilde_residual,
    })
}
