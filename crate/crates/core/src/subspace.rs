//! Subspaces of `C^m ⊗ C^n`, completely-entangled certificates and support
//! checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::json::cvec_list;
use crate::linalg::{
    columns, gram_residual, gram_schmidt, null_space, numerical_rank, projector, vec_to_matrix,
    CMat, CVec, ToleranceConfig,
};
use crate::products::{ClassTag, ProductVector};
use crate::rng::{complex_gaussian_vec, stream_rng};
use crate::search::{multi_start_search, Extremum};

/// A linear subspace of `C^m ⊗ C^n` stored through an orthonormal basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Subspace {
    pub m: usize,
    pub n: usize,
    #[serde(with = "cvec_list")]
    pub basis: Vec<CVec>,
    /// The family this subspace was built from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<FamilySpec>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.m * self.n
    }

    pub fn projector(&self) -> CMat {
        projector(&self.basis, self.ambient_dim())
    }

    /// Coefficient matrices `A_i` of the basis vectors.
    pub fn basis_matrices(&self) -> Vec<CMat> {
        self.basis
            .iter()
            .map(|v| vec_to_matrix(v, self.m, self.n).expect("basis length checked"))
            .collect()
    }

    /// Norm of the component of `v` orthogonal to the subspace.
    pub fn distance_to(&self, v: &CVec) -> f64 {
        let mut r = v.clone();
        for b in &self.basis {
            r -= b * b.dotc(v);
        }
        r.norm()
    }

    /// Largest overlap `|⟨b_i|v⟩|` with a basis vector.
    pub fn max_overlap(&self, v: &CVec) -> f64 {
        self.basis
            .iter()
            .map(|b| b.dotc(v).norm())
            .fold(0.0, f64::max)
    }

    /// Check the structural invariants of a deserialized subspace.
    pub fn validate(&self, tol: &ToleranceConfig) -> Result<()> {
        for v in &self.basis {
            if v.len() != self.ambient_dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.ambient_dim(),
                    found: v.len(),
                });
            }
        }
        if gram_residual(&self.basis) > tol.orth_tol {
            return Err(Error::Precondition("basis is not orthonormal".into()));
        }
        Ok(())
    }

    pub fn with_origin(mut self, origin: FamilySpec) -> Self {
        self.origin = Some(origin);
        self
    }
}

/// Orthonormalize `vectors` (in order) into a [`Subspace`].
pub fn make_subspace(
    m: usize,
    n: usize,
    vectors: &[CVec],
    tol: &ToleranceConfig,
) -> Result<Subspace> {
    for v in vectors {
        if v.len() != m * n {
            return Err(Error::DimensionMismatch {
                expected: m * n,
                found: v.len(),
            });
        }
    }
    if vectors.is_empty() {
        return Ok(Subspace {
            m,
            n,
            basis: Vec::new(),
            origin: None,
        });
    }
    let rank = numerical_rank(&columns(vectors, m * n), tol);
    if rank < vectors.len() {
        return Err(Error::DependentVectors { index: rank });
    }
    let basis = gram_schmidt(vectors, tol)?;
    Ok(Subspace {
        m,
        n,
        basis,
        origin: None,
    })
}

/// Orthogonal complement of `v` in `C^m ⊗ C^n`.
pub fn complement(v: &Subspace, tol: &ToleranceConfig) -> Subspace {
    let d = v.ambient_dim();
    let basis = if v.dim() == 0 {
        (0..d).map(|k| crate::linalg::ket(d, k)).collect()
    } else {
        null_space(&columns(&v.basis, d).adjoint(), tol)
    };
    Subspace {
        m: v.m,
        n: v.n,
        basis,
        origin: None,
    }
}

/// Settings of the multi-start product-vector search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub starts: usize,
    pub max_iter: usize,
    pub seed: u64,
    /// A unit product vector counts as inside `V` when its squared
    /// projection exceeds `1 - ces_gap`.
    pub ces_gap: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            starts: 64,
            max_iter: 200,
            seed: 42,
            ces_gap: 1e-6,
        }
    }
}

impl SearchBudget {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// Outcome of a completely-entangled test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CesCertificate {
    pub is_ces: bool,
    /// Largest squared projection of a unit product vector onto `V` found.
    pub best_product_overlap: f64,
    /// The product vector achieving `best_product_overlap`.
    pub witness_vector: Option<ProductVector>,
    /// Smallest (over sampled combinations) largest normalized 2×2 minor of
    /// the coefficient matrix; only computed when `dim V ≤ 4`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minor_scan_min: Option<f64>,
}

const MINOR_SCAN_SAMPLES: u64 = 256;
const MINOR_RANK_ONE: f64 = 1e-10;

fn largest_minor(a: &CMat) -> f64 {
    let scale = a.norm_squared();
    if scale == 0.0 {
        return 0.0;
    }
    let (r, c) = a.shape();
    let mut worst = 0.0_f64;
    for i in 0..r {
        for k in i + 1..r {
            for j in 0..c {
                for l in j + 1..c {
                    let minor = a[(i, j)] * a[(k, l)] - a[(i, l)] * a[(k, j)];
                    worst = worst.max(minor.norm());
                }
            }
        }
    }
    worst / scale
}

fn minor_scan(v: &Subspace, seed: u64) -> f64 {
    let mats = v.basis_matrices();
    (0..MINOR_SCAN_SAMPLES)
        .into_par_iter()
        .map(|k| {
            let coeffs = complex_gaussian_vec(&mut stream_rng(seed, 1 << 40 | k), mats.len());
            let mut a = CMat::zeros(v.m, v.n);
            for (ci, mi) in coeffs.iter().zip(&mats) {
                a += mi * *ci;
            }
            largest_minor(&a)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Decide numerically whether `v` contains a product vector.
pub fn is_ces(v: &Subspace, _tol: &ToleranceConfig, budget: &SearchBudget) -> CesCertificate {
    if v.dim() == 0 {
        return CesCertificate {
            is_ces: true,
            best_product_overlap: 0.0,
            witness_vector: None,
            minor_scan_min: None,
        };
    }
    let best = multi_start_search(
        &v.projector(),
        v.m,
        v.n,
        Extremum::Max,
        budget.starts,
        budget.max_iter,
        budget.seed,
    );
    let overlap = best.value.clamp(0.0, 1.0);
    let minor_scan_min = (v.dim() <= 4).then(|| minor_scan(v, budget.seed));
    let rank_one_found = minor_scan_min.is_some_and(|s| s <= MINOR_RANK_ONE);
    let witness = ProductVector::new(best.e, best.f, ClassTag::Generic, Vec::new());
    CesCertificate {
        is_ces: overlap < 1.0 - budget.ces_gap && !rank_one_found,
        best_product_overlap: overlap,
        witness_vector: Some(witness),
        minor_scan_min,
    }
}

/// Reduced projections `Tr_B Π_V` (m × m) and `Tr_A Π_V` (n × n).
pub fn reduced_projections(v: &Subspace) -> (CMat, CMat) {
    let mut ra = CMat::zeros(v.m, v.m);
    let mut rb = CMat::zeros(v.n, v.n);
    for a in v.basis_matrices() {
        ra += &a * a.adjoint();
        rb += (a.adjoint() * &a).transpose();
    }
    (ra, rb)
}

/// True iff both reduced projections have full rank.
pub fn is_supported(v: &Subspace, tol: &ToleranceConfig) -> bool {
    if v.dim() == 0 {
        return false;
    }
    let (ra, rb) = reduced_projections(v);
    numerical_rank(&ra, tol) == v.m && numerical_rank(&rb, tol) == v.n
}

/// Maximal dimension of a completely entangled subspace of `C^m ⊗ C^n`.
pub fn max_ces_dim(m: usize, n: usize) -> usize {
    assert!(m >= 2 && n >= 2, "local dimensions must be at least 2");
    (m - 1) * (n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ket2, re};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn make_subspace_normalizes() {
        let v = make_subspace(2, 2, &[ket2(2, 2, 0, 1) - ket2(2, 2, 1, 0)], &tol()).unwrap();
        assert_eq!(v.dim(), 1);
        assert!((v.basis[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn make_subspace_rejects_duplicates() {
        let a = ket2(2, 2, 0, 1) + ket2(2, 2, 1, 1);
        let err = make_subspace(2, 2, &[a.clone(), a], &tol()).unwrap_err();
        assert!(matches!(err, Error::DependentVectors { .. }));
    }

    #[test]
    fn product_basis_is_not_ces() {
        let v = make_subspace(2, 2, &[ket2(2, 2, 0, 0)], &tol()).unwrap();
        let cert = is_ces(&v, &tol(), &SearchBudget::default());
        assert!(!cert.is_ces);
        assert!((cert.best_product_overlap - 1.0).abs() < 1e-12);
        let w = cert.witness_vector.unwrap();
        assert!(w.e[0].norm() > 1.0 - 1e-9 && w.f[0].norm() > 1.0 - 1e-9);
        assert!(cert.minor_scan_min.unwrap() < 1e-12);
    }

    #[test]
    fn singlet_is_ces() {
        let v = make_subspace(2, 2, &[ket2(2, 2, 0, 1) - ket2(2, 2, 1, 0)], &tol()).unwrap();
        let cert = is_ces(&v, &tol(), &SearchBudget::default());
        assert!(cert.is_ces);
        assert!((cert.best_product_overlap - 0.5).abs() < 1e-9);
    }

    #[test]
    fn embedded_subspace_is_not_supported() {
        let v = make_subspace(2, 2, &[ket2(2, 2, 0, 0), ket2(2, 2, 0, 1)], &tol()).unwrap();
        assert!(!is_supported(&v, &tol()));
        let w = make_subspace(2, 2, &[ket2(2, 2, 0, 0) + ket2(2, 2, 1, 1)], &tol()).unwrap();
        assert!(is_supported(&w, &tol()));
    }

    #[test]
    fn max_ces_dim_examples() {
        assert_eq!(max_ces_dim(2, 5), 4);
        assert_eq!(max_ces_dim(4, 4), 9);
        assert_eq!(max_ces_dim(2, 2), 1);
    }

    #[test]
    fn complement_dimensions() {
        let v = make_subspace(2, 3, &[ket2(2, 3, 0, 1) * re(2.0)], &tol()).unwrap();
        let c = complement(&v, &tol());
        assert_eq!(c.dim(), 5);
        for b in &c.basis {
            assert!(v.basis[0].dotc(b).norm() < 1e-12);
        }
    }
}
