//! Dense complex vectors and matrices plus the handful of numerical kernels
//! the rest of the crate is built on: rank and kernel by SVD, Hermitian
//! spectra, the partial transpose, local projections, and Schmidt ranks.
//!
//! Bipartite vectors on `C^m ⊗ C^n` are stored with the first factor as the
//! slow index: the coefficient of `|i⟩|j⟩` lives at position `i * n + j`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CVec = DVector<C64>;
pub type CMat = DMatrix<C64>;

/// Norm below which a vector is treated as the zero vector.
pub const ZERO_NORM: f64 = 1e-12;

pub const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub const fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Numerical thresholds used for rank, orthogonality and sign decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Singular values at or below `rank_rel * sigma_max` count as zero.
    pub rank_rel: f64,
    /// Bound on orthogonality and reconstruction residuals.
    pub orth_tol: f64,
    /// A closed-form value counts as negative when it is below `-neg_tol`.
    pub neg_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_rel: 1e-9,
            orth_tol: 1e-10,
            neg_tol: 1e-12,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.rank_rel) || !ok(self.orth_tol) || !ok(self.neg_tol) {
            return Err(Error::InvalidTolerance(
                "all tolerances must be finite and strictly positive".into(),
            ));
        }
        if self.rank_rel >= 1.0 {
            return Err(Error::InvalidTolerance("rank_rel must be < 1".into()));
        }
        Ok(())
    }
}

/// Basis vector `|i⟩|j⟩` of `C^m ⊗ C^n`.
pub fn ket2(m: usize, n: usize, i: usize, j: usize) -> CVec {
    assert!(i < m && j < n, "basis index out of range");
    let mut v = CVec::zeros(m * n);
    v[i * n + j] = re(1.0);
    v
}

/// Basis vector `|i⟩` of `C^d`.
pub fn ket(d: usize, i: usize) -> CVec {
    let mut v = CVec::zeros(d);
    v[i] = re(1.0);
    v
}

pub fn kron(a: &CVec, b: &CVec) -> CVec {
    let n = b.len();
    CVec::from_fn(a.len() * n, |k, _| a[k / n] * b[k % n])
}

pub fn conj(v: &CVec) -> CVec {
    v.map(|z| z.conj())
}

pub fn normalized(v: &CVec) -> Result<CVec> {
    let nrm = v.norm();
    if nrm.is_nan() || nrm < ZERO_NORM {
        return Err(Error::ZeroVector);
    }
    Ok(v.unscale(nrm))
}

/// `|v⟩⟨v|` without normalization.
pub fn outer(v: &CVec) -> CMat {
    v * v.adjoint()
}

/// Reshape a bipartite vector into its `m × n` coefficient matrix.
pub fn vec_to_matrix(psi: &CVec, m: usize, n: usize) -> Result<CMat> {
    if psi.len() != m * n {
        return Err(Error::DimensionMismatch {
            expected: m * n,
            found: psi.len(),
        });
    }
    Ok(CMat::from_fn(m, n, |i, j| psi[i * n + j]))
}

/// Inverse of [`vec_to_matrix`].
pub fn matrix_to_vec(a: &CMat) -> CVec {
    let n = a.ncols();
    CVec::from_fn(a.nrows() * n, |k, _| a[(k / n, k % n)])
}

/// Singular values in descending order.
pub fn singular_values(mat: &CMat) -> Vec<f64> {
    if mat.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = SVD::new(mat.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Largest singular value (operator 2-norm).
pub fn op_norm(mat: &CMat) -> f64 {
    singular_values(mat).first().copied().unwrap_or(0.0)
}

fn rank_from_singular_values(sv: &[f64], rank_rel: f64) -> usize {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax <= f64::MIN_POSITIVE {
        return 0;
    }
    sv.iter().filter(|&&s| s > rank_rel * smax).count()
}

/// Number of singular values above `rank_rel * sigma_max`.
pub fn numerical_rank(mat: &CMat, tol: &ToleranceConfig) -> usize {
    rank_from_singular_values(&singular_values(mat), tol.rank_rel)
}

/// Orthonormal basis of the kernel of `mat`.
///
/// Wide matrices are padded with zero rows so the SVD yields a complete set
/// of right singular vectors.
pub fn null_space(mat: &CMat, tol: &ToleranceConfig) -> Vec<CVec> {
    let (r, cols) = mat.shape();
    if cols == 0 {
        return Vec::new();
    }
    let padded = if r < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), (r, cols)).copy_from(mat);
        p
    } else {
        mat.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let sv = svd.singular_values;
    let smax = sv.iter().copied().fold(0.0_f64, f64::max);
    let cutoff = if smax <= f64::MIN_POSITIVE {
        f64::INFINITY
    } else {
        tol.rank_rel * smax
    };
    let mut out = Vec::new();
    for k in 0..sv.len() {
        if sv[k] <= cutoff {
            out.push(v_t.row(k).adjoint());
        }
    }
    out
}

/// Right singular vector of the smallest singular value (zero rows are
/// appended to wide matrices first).
pub fn smallest_right_singular_vector(mat: &CMat) -> CVec {
    let (r, cols) = mat.shape();
    let padded = if r < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), (r, cols)).copy_from(mat);
        p
    } else {
        mat.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("nonempty matrix");
    v_t.row(k).adjoint()
}

/// Orthonormal basis of the column span, rank decided by `rank_rel`.
pub fn column_space(mat: &CMat, tol: &ToleranceConfig) -> Vec<CVec> {
    if mat.is_empty() {
        return Vec::new();
    }
    let svd = SVD::new(mat.clone(), true, false);
    let u = svd.u.expect("requested U");
    let sv = svd.singular_values;
    let smax = sv.iter().copied().fold(0.0_f64, f64::max);
    if smax <= f64::MIN_POSITIVE {
        return Vec::new();
    }
    (0..sv.len())
        .filter(|&k| sv[k] > tol.rank_rel * smax)
        .map(|k| u.column(k).into_owned())
        .collect()
}

/// Stack vectors as the columns of a matrix.
pub fn columns(vectors: &[CVec], dim: usize) -> CMat {
    let mut mat = CMat::zeros(dim, vectors.len());
    for (k, v) in vectors.iter().enumerate() {
        mat.set_column(k, v);
    }
    mat
}

/// Orthogonal projector onto the span of orthonormal vectors.
pub fn projector(orthonormal: &[CVec], dim: usize) -> CMat {
    let q = columns(orthonormal, dim);
    &q * q.adjoint()
}

/// Two-pass Gram–Schmidt in the given order. Vectors already orthogonal to
/// their predecessors are only rescaled. Fails on a (numerically) dependent
/// vector.
pub fn gram_schmidt(vectors: &[CVec], tol: &ToleranceConfig) -> Result<Vec<CVec>> {
    let mut basis: Vec<CVec> = Vec::with_capacity(vectors.len());
    for (idx, v) in vectors.iter().enumerate() {
        let input_norm = v.norm();
        if input_norm.is_nan() || input_norm < ZERO_NORM {
            return Err(Error::DependentVectors { index: idx });
        }
        let mut w = v.clone();
        for _pass in 0..2 {
            for b in &basis {
                let coeff = b.dotc(&w);
                if coeff.norm() > 0.0 {
                    w.axpy(-coeff, b, re(1.0));
                }
            }
        }
        let nrm = w.norm();
        if nrm <= tol.rank_rel * input_norm || nrm < ZERO_NORM {
            return Err(Error::DependentVectors { index: idx });
        }
        basis.push(w.unscale(nrm));
    }
    Ok(basis)
}

/// Largest deviation of the Gram matrix from the identity.
pub fn gram_residual(vectors: &[CVec]) -> f64 {
    let mut worst = 0.0_f64;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.dotc(b) - re(target)).norm());
        }
    }
    worst
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
/// Column `k` of the returned matrix is the eigenvector for eigenvalue `k`.
pub fn hermitian_eigh(mat: &CMat) -> (Vec<f64>, CMat) {
    let h = hermitian_part(mat);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = CMat::zeros(mat.nrows(), mat.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vecs)
}

pub fn hermitian_part(mat: &CMat) -> CMat {
    (mat + mat.adjoint()).scale(0.5)
}

/// `‖A − A†‖_max`.
pub fn hermiticity_residual(mat: &CMat) -> f64 {
    (mat - mat.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn min_eigenvalue(mat: &CMat) -> f64 {
    hermitian_eigh(mat).0.first().copied().unwrap_or(0.0)
}

/// Operator-norm distance between two Hermitian matrices.
pub fn hermitian_distance(a: &CMat, b: &CMat) -> f64 {
    let (vals, _) = hermitian_eigh(&(a - b));
    vals.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Partial transpose on the second tensor factor of an `(mn) × (mn)` matrix.
pub fn partial_transpose(mat: &CMat, m: usize, n: usize) -> Result<CMat> {
    let d = m * n;
    if mat.nrows() != d || mat.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: mat.nrows().max(mat.ncols()),
        });
    }
    Ok(CMat::from_fn(d, d, |row, col| {
        let (i, j) = (row / n, row % n);
        let (k, l) = (col / n, col % n);
        mat[(i * n + l, k * n + j)]
    }))
}

/// `(⟨x| ⊗ 1)|psi⟩`, a vector of `C^n`.
pub fn local_vector(psi: &CVec, x: &CVec, m: usize, n: usize) -> CVec {
    CVec::from_fn(n, |j, _| {
        (0..m).fold(re(0.0), |acc, k| acc + x[k].conj() * psi[k * n + j])
    })
}

/// Local projection `Σ_i |Ψ_i(x)⟩⟨Ψ_i(x)|` of the span of `basis` onto `x`
/// on the first factor.
pub fn local_projection(basis: &[CVec], x: &CVec, m: usize, n: usize) -> Result<CMat> {
    if x.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: x.len(),
        });
    }
    let mut out = CMat::zeros(n, n);
    for psi in basis {
        if psi.len() != m * n {
            return Err(Error::DimensionMismatch {
                expected: m * n,
                found: psi.len(),
            });
        }
        let v = local_vector(psi, x, m, n);
        out += outer(&v);
    }
    Ok(out)
}

/// Schmidt rank: numerical rank of the coefficient matrix.
pub fn schmidt_rank(psi: &CVec, m: usize, n: usize, tol: &ToleranceConfig) -> Result<usize> {
    let a = vec_to_matrix(psi, m, n)?;
    if psi.norm() < ZERO_NORM {
        return Err(Error::ZeroVector);
    }
    Ok(numerical_rank(&a, tol))
}

/// Determinant via LU; the empty matrix has determinant one.
pub fn det(mat: &CMat) -> C64 {
    if mat.nrows() == 0 {
        return re(1.0);
    }
    mat.clone().determinant()
}

/// Drop column `col` from `mat`.
pub fn remove_column(mat: &CMat, col: usize) -> CMat {
    mat.clone().remove_column(col)
}

/// Moore–Penrose pseudo-inverse solve `argmin ‖A x − b‖` with minimum norm.
pub fn lstsq_min_norm(a: &CMat, b: &CVec, rank_rel: f64) -> CVec {
    let svd = SVD::new(a.clone(), true, true);
    let u = svd.u.as_ref().expect("U");
    let v_t = svd.v_t.as_ref().expect("V^H");
    let sv = &svd.singular_values;
    let smax = sv.iter().copied().fold(0.0_f64, f64::max);
    let mut x = CVec::zeros(a.ncols());
    if smax <= f64::MIN_POSITIVE {
        return x;
    }
    for k in 0..sv.len() {
        if sv[k] > rank_rel * smax {
            let coeff = u.column(k).dotc(b) / sv[k];
            x += v_t.row(k).adjoint() * coeff;
        }
    }
    x
}

/// Ray overlap `|⟨a|b⟩| / (‖a‖‖b‖)`, equal to one for parallel vectors.
pub fn ray_overlap(a: &CVec, b: &CVec) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na < ZERO_NORM || nb < ZERO_NORM {
        return 0.0;
    }
    a.dotc(b).norm() / (na * nb)
}
