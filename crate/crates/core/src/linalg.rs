//! Dense helpers shared by the operator, evolution and spectral modules.
//!
//! Rank decisions use a uniform relative threshold: a singular value counts as
//! zero when it is below [`RANK_RTOL`] times the largest one.

use nalgebra::{DMatrix, DVector, Dim, Matrix, RawStorage, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use crate::{CMatrix, C64};

pub const RANK_RTOL: f64 = 1e-10;

/// Largest entry modulus of a complex matrix or vector.
pub trait MaxModulus {
    fn max_modulus(&self) -> f64;
}

impl<R: Dim, C: Dim, S: RawStorage<C64, R, C>> MaxModulus for Matrix<C64, R, C, S> {
    fn max_modulus(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Self {
        assert!(m.is_square(), "hermitian eigen of a non-square matrix");
        let n = m.nrows();
        if n == 0 {
            return Self {
                values: Vec::new(),
                vectors: CMatrix::zeros(0, 0),
            };
        }
        let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Self { values, vectors }
    }

    /// `f(A) = V diag(f(λ)) V*`.
    pub fn apply_function(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (c, &lam) in self.values.iter().enumerate() {
            let z = f(lam);
            for x in scaled.column_mut(c).iter_mut() {
                *x *= z;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `e^{itA}`.
    pub fn exp_i(&self, t: f64) -> CMatrix {
        self.apply_function(|lam| C64::from_polar(1.0, t * lam))
    }

    /// Eigenvectors whose eigenvalue lies within `tol` of `lambda`.
    pub fn eigenspace(&self, lambda: f64, tol: f64) -> CMatrix {
        let cols: Vec<usize> = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| (v - lambda).abs() <= tol)
            .map(|(i, _)| i)
            .collect();
        select_columns(&self.vectors, &cols)
    }
}

pub fn select_columns(m: &CMatrix, cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])])
}

/// Horizontal concatenation; all blocks must share the row count `rows`.
pub fn hstack(rows: usize, blocks: &[&CMatrix]) -> CMatrix {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut c0 = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows);
        out.view_mut((0, c0), (rows, b.ncols())).copy_from(*b);
        c0 += b.ncols();
    }
    out
}

/// Vertical concatenation; all blocks must share the column count `cols`.
pub fn vstack(cols: usize, blocks: &[&CMatrix]) -> CMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut r0 = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols);
        out.view_mut((r0, 0), (b.nrows(), cols)).copy_from(*b);
        r0 += b.nrows();
    }
    out
}

struct FullSvd {
    /// Left singular vectors, `rows × k`.
    u: CMatrix,
    /// Right singular vectors, `cols × k`.
    v: CMatrix,
    sigma: Vec<f64>,
}

/// SVD of `m` padded with zero rows/columns to a square matrix, so both
/// singular bases are complete.
fn full_svd(m: &CMatrix) -> FullSvd {
    let (r, c) = m.shape();
    let k = r.max(c);
    let mut padded = CMatrix::zeros(k, k);
    padded.view_mut((0, 0), (r, c)).copy_from(m);
    let svd = padded.svd(true, true);
    let u = svd.u.expect("svd u");
    let v = svd.v_t.expect("svd v_t").adjoint();
    FullSvd {
        u: u.rows(0, r).into_owned(),
        v: v.rows(0, c).into_owned(),
        sigma: svd.singular_values.iter().copied().collect(),
    }
}

fn threshold(sigma: &[f64]) -> f64 {
    sigma.iter().copied().fold(0.0, f64::max) * RANK_RTOL
}

/// Orthonormal basis (columns) of `ker m`.
pub fn null_space(m: &CMatrix) -> CMatrix {
    let c = m.ncols();
    if m.nrows() == 0 || c == 0 {
        return CMatrix::identity(c, c);
    }
    let svd = full_svd(m);
    let thr = threshold(&svd.sigma);
    let cols: Vec<usize> = (0..svd.sigma.len())
        .filter(|&i| svd.sigma[i] <= thr)
        .collect();
    // padding columns beyond `c` carry no information about ker m
    let basis = select_columns(&svd.v, &cols);
    orthonormalize(&basis)
}

/// Orthonormal basis (columns) of `range m`.
pub fn range_basis(m: &CMatrix) -> CMatrix {
    let r = m.nrows();
    if r == 0 || m.ncols() == 0 {
        return CMatrix::zeros(r, 0);
    }
    let svd = full_svd(m);
    let thr = threshold(&svd.sigma);
    let cols: Vec<usize> = (0..svd.sigma.len())
        .filter(|&i| svd.sigma[i] > thr)
        .collect();
    select_columns(&svd.u, &cols)
}

/// Numerical rank with the shared relative threshold.
pub fn rank(m: &CMatrix) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sigma: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    let thr = threshold(&sigma);
    sigma.iter().filter(|&&s| s > thr).count()
}

/// Orthonormal basis of the column span (columns that are numerically
/// dependent are dropped).
pub fn orthonormalize(m: &CMatrix) -> CMatrix {
    if m.ncols() == 0 {
        return m.clone();
    }
    range_basis(m)
}

/// Orthogonal projector `B B*` for an orthonormal basis `B`.
pub fn projector(basis: &CMatrix) -> CMatrix {
    basis * basis.adjoint()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Largest deviation of `m* m` from the identity; zero for orthonormal columns.
pub fn orthonormality_defect(m: &CMatrix) -> f64 {
    let g = m.adjoint() * m;
    (g - CMatrix::identity(m.ncols(), m.ncols())).max_modulus()
}

/// `m^k` by binary exponentiation.
pub fn matrix_power(m: &CMatrix, mut k: usize) -> CMatrix {
    let n = m.nrows();
    let mut result = CMatrix::identity(n, n);
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

/// Uniformly random complex vector with entries in the unit square, not
/// normalized.
pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<C64> {
    DVector::from_fn(n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<C64> {
    let v = random_vector(rng, n);
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// A group of numerically equal eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub center: f64,
    pub multiplicity: usize,
}

/// Gap-based clustering of real values: consecutive sorted values closer than
/// `tol` join the same cluster. Clusters are ordered ascending.
pub fn cluster_values(values: &[f64], tol: f64) -> Vec<Cluster> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut group: Vec<f64> = Vec::new();
    for v in sorted {
        if let Some(&last) = group.last() {
            if v - last >= tol {
                out.push(finish_cluster(&group));
                group.clear();
            }
        }
        group.push(v);
    }
    if !group.is_empty() {
        out.push(finish_cluster(&group));
    }
    out
}

fn finish_cluster(group: &[f64]) -> Cluster {
    Cluster {
        center: group.iter().sum::<f64>() / group.len() as f64,
        multiplicity: group.len(),
    }
}

/// One joint cluster of two multisets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultisetRow {
    pub lambda: f64,
    pub left: usize,
    pub right: usize,
}

/// Clusters the union of two multisets and counts each side per cluster.
/// Joint clustering widens a cluster whenever either side bridges a gap, so
/// boundary ties are compared on total multiplicity rather than split.
pub fn compare_multisets(left: &[f64], right: &[f64], tol: f64) -> Vec<MultisetRow> {
    let mut tagged: Vec<(f64, bool)> = left
        .iter()
        .map(|&v| (v, true))
        .chain(right.iter().map(|&v| (v, false)))
        .collect();
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rows = Vec::new();
    let mut group: Vec<(f64, bool)> = Vec::new();
    let flush = |group: &Vec<(f64, bool)>, rows: &mut Vec<MultisetRow>| {
        if group.is_empty() {
            return;
        }
        let lambda = group.iter().map(|g| g.0).sum::<f64>() / group.len() as f64;
        let l = group.iter().filter(|g| g.1).count();
        rows.push(MultisetRow {
            lambda,
            left: l,
            right: group.len() - l,
        });
    };
    for item in tagged {
        if let Some(last) = group.last() {
            if item.0 - last.0 >= tol {
                flush(&group, &mut rows);
                group.clear();
            }
        }
        group.push(item);
    }
    flush(&group, &mut rows);
    rows
}

/// CSV dump of a dense matrix, one row per line, entries as `re,im` pairs
/// separated by `;`.
pub fn matrix_to_csv(m: &CMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|c| format!("{:.11e},{:.11e}", m[(r, c)].re, m[(r, c)].im))
            .collect();
        out.push_str(&row.join(";"));
        out.push('\n');
    }
    out
}
