//! Explicit completely entangled subspaces and the random extension of a
//! completely entangled subspace by one dimension.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::Matrix;
use crate::linalg::{
    gram_schmidt, ket2, matrix_to_vec, numerical_rank, re, CMat, CVec, ToleranceConfig,
};
use crate::rng::complex_gaussian_vec;
use crate::subspace::{
    complement, is_ces, make_subspace, max_ces_dim, CesCertificate, SearchBudget, Subspace,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Symmetric,
    General,
    Counterexample,
    FootnotePair,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Symmetric => "symmetric",
            FamilyKind::General => "general",
            FamilyKind::Counterexample => "counterexample",
            FamilyKind::FootnotePair => "footnote_pair",
        }
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(FamilyKind::Symmetric),
            "general" => Ok(FamilyKind::General),
            "counterexample" => Ok(FamilyKind::Counterexample),
            "footnote_pair" | "footnote" => Ok(FamilyKind::FootnotePair),
            other => Err(Error::InvalidFamily(format!("unknown family `{other}`"))),
        }
    }
}

/// Parameters of one of the explicit families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub m: usize,
    pub n: usize,
    /// The `(m-1) × (m-1)` block of the last symmetric-family vector; the
    /// unitriangular default is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_tilde: Option<Matrix>,
}

impl FamilySpec {
    pub fn symmetric(m: usize) -> Self {
        Self {
            kind: FamilyKind::Symmetric,
            m,
            n: m,
            a_tilde: None,
        }
    }

    pub fn general(m: usize, n: usize) -> Self {
        Self {
            kind: FamilyKind::General,
            m,
            n,
            a_tilde: None,
        }
    }

    pub fn counterexample(m: usize, n: usize) -> Self {
        Self {
            kind: FamilyKind::Counterexample,
            m,
            n,
            a_tilde: None,
        }
    }

    pub fn footnote() -> Self {
        Self {
            kind: FamilyKind::FootnotePair,
            m: 3,
            n: 4,
            a_tilde: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n) = (self.m, self.n);
        let bad = |msg: String| Err(Error::InvalidFamily(msg));
        match self.kind {
            FamilyKind::Symmetric if m < 3 || n != m => {
                bad(format!("symmetric family needs m = n >= 3, got ({m}, {n})"))
            }
            FamilyKind::General | FamilyKind::Counterexample if m < 3 || n <= m => bad(format!(
                "{} family needs 3 <= m < n, got ({m}, {n})",
                self.kind.name()
            )),
            FamilyKind::FootnotePair if (m, n) != (3, 4) => {
                bad(format!("footnote pair lives in 3 x 4, got ({m}, {n})"))
            }
            _ => Ok(()),
        }?;
        if let Some(a) = &self.a_tilde {
            if self.kind != FamilyKind::Symmetric {
                return bad("a custom A_tilde is only supported for the symmetric family".into());
            }
            if a.0.shape() != (m - 1, m - 1) {
                return bad(format!("A_tilde must be {0} x {0}", m - 1));
            }
        }
        Ok(())
    }

    /// The block `Ã` of the last symmetric-family vector.
    pub fn a_tilde_matrix(&self) -> CMat {
        match &self.a_tilde {
            Some(a) => a.0.clone(),
            None => default_a_tilde(self.m),
        }
    }

    pub fn uses_default_a_tilde(&self) -> bool {
        self.a_tilde.is_none()
    }

    /// The published (unnormalized, un-orthogonalized) spanning vectors.
    pub fn generators(&self) -> Result<Vec<CVec>> {
        self.validate()?;
        let (m, n) = (self.m, self.n);
        let k = |i, j| ket2(m, n, i, j);
        let mut out: Vec<CVec> = Vec::new();
        match self.kind {
            FamilyKind::Symmetric | FamilyKind::General => {
                for i in 1..m {
                    out.push(k(0, i) - k(i, 0));
                }
                out.push(psi_m(m, n, &self.a_tilde_matrix()));
                for i in m + 1..=n {
                    out.push(k(0, i - 2) - k(1, i - 1));
                }
            }
            FamilyKind::Counterexample => {
                for i in 1..m {
                    out.push(k(0, i) - k(i, 0));
                }
                for i in m..n - 1 {
                    out.push(k(0, i) - k(1, i - 1));
                }
                out.push(k(0, n - 1) - antisymmetric_direction(m, n));
            }
            FamilyKind::FootnotePair => {
                out.push(k(0, 1) - k(1, 0));
                out.push(k(0, 2) - k(2, 0));
                out.push(k(0, 3) - (k(1, 2) - k(2, 1)));
                out.push(k(1, 3) - k(2, 2));
                out.push(k(1, 1) - k(2, 3));
                out.push(k(0, 0) - k(1, 3) - k(2, 1));
            }
        }
        Ok(out)
    }

    /// Build the subspace spanned by the generators.
    pub fn build(&self, tol: &ToleranceConfig) -> Result<Subspace> {
        if self.kind == FamilyKind::Symmetric {
            let a = self.a_tilde_matrix();
            if numerical_rank(&a, tol) < self.m - 1 {
                return Err(Error::InvalidFamily("A_tilde is rank deficient".into()));
            }
        }
        let gens = self.generators()?;
        Ok(make_subspace(self.m, self.n, &gens, tol)?.with_origin(self.clone()))
    }
}

/// Unitriangular `(m-1) × (m-1)` matrix with ones on the diagonal and twos
/// above it.
pub fn default_a_tilde(m: usize) -> CMat {
    let d = m - 1;
    CMat::from_fn(d, d, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => re(1.0),
        std::cmp::Ordering::Less => re(2.0),
        std::cmp::Ordering::Greater => re(0.0),
    })
}

/// Vectorization of `0 ⊕ Ã`, padded with zero columns up to width `n`.
fn psi_m(m: usize, n: usize, a_tilde: &CMat) -> CVec {
    let mut a = CMat::zeros(m, n);
    a.view_mut((1, 1), (m - 1, m - 1)).copy_from(a_tilde);
    matrix_to_vec(&a)
}

/// The first antisymmetric direction `(|ij⟩ - |ji⟩)/√2`, `i < j < m` in
/// lexicographic order, that is independent of `|0i⟩ - |i0⟩`, embedded in
/// `C^m ⊗ C^n`.
pub fn antisymmetric_direction(m: usize, n: usize) -> CVec {
    let tol = ToleranceConfig::default();
    let mut basis: Vec<CVec> = (1..m)
        .map(|i| ket2(m, n, 0, i) - ket2(m, n, i, 0))
        .collect();
    let fixed = basis.len();
    for i in 0..m {
        for j in i + 1..m {
            let cand = (ket2(m, n, i, j) - ket2(m, n, j, i)) * re(std::f64::consts::FRAC_1_SQRT_2);
            basis.push(cand);
            match gram_schmidt(&basis, &tol) {
                Ok(ortho) => return ortho[fixed].clone(),
                Err(_) => {
                    basis.pop();
                }
            }
        }
    }
    unreachable!("an admissible antisymmetric vector exists for m >= 3")
}

pub fn symmetric_family(
    m: usize,
    a_tilde: Option<CMat>,
    tol: &ToleranceConfig,
) -> Result<Subspace> {
    let spec = FamilySpec {
        a_tilde: a_tilde.map(Matrix),
        ..FamilySpec::symmetric(m)
    };
    spec.build(tol)
}

pub fn general_family(m: usize, n: usize, tol: &ToleranceConfig) -> Result<Subspace> {
    FamilySpec::general(m, n).build(tol)
}

pub fn counterexample_family(m: usize, n: usize, tol: &ToleranceConfig) -> Result<Subspace> {
    FamilySpec::counterexample(m, n).build(tol)
}

/// The six-dimensional completely entangled subspace of `C^3 ⊗ C^4` with a
/// completely entangled complement, and that complement.
pub fn footnote_pair(tol: &ToleranceConfig) -> Result<(Subspace, Subspace)> {
    let first = FamilySpec::footnote().build(tol)?;
    let second = complement(&first, tol);
    Ok((first, second))
}

/// Result of a successful one-step extension.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Extension {
    pub subspace: Subspace,
    pub certificate: CesCertificate,
    pub tries: usize,
}

/// Extend a completely entangled subspace by one random direction of its
/// complement, retrying until the enlarged subspace is again completely
/// entangled.
pub fn extend_ces<R: Rng + ?Sized>(
    v: &Subspace,
    rng: &mut R,
    tol: &ToleranceConfig,
    budget: &SearchBudget,
    max_tries: usize,
) -> Result<Extension> {
    let max = max_ces_dim(v.m, v.n);
    if v.dim() >= max {
        return Err(Error::Precondition(format!(
            "dimension {} already at the maximum {max}",
            v.dim()
        )));
    }
    let start = is_ces(v, tol, budget);
    if !start.is_ces {
        return Err(Error::Precondition(
            "input subspace is not completely entangled".into(),
        ));
    }
    let comp = complement(v, tol);
    let mut best_overlap = f64::INFINITY;
    for attempt in 1..=max_tries {
        let coeffs = complex_gaussian_vec(rng, comp.dim());
        let mut psi = CVec::zeros(v.ambient_dim());
        for (c, b) in coeffs.iter().zip(&comp.basis) {
            psi += b * *c;
        }
        let mut vectors = v.basis.clone();
        vectors.push(psi);
        let Ok(candidate) = make_subspace(v.m, v.n, &vectors, tol) else {
            continue;
        };
        let cert = is_ces(&candidate, tol, budget);
        if cert.is_ces {
            return Ok(Extension {
                subspace: candidate,
                certificate: cert,
                tries: attempt,
            });
        }
        best_overlap = best_overlap.min(cert.best_product_overlap);
    }
    Err(Error::ExtensionExhausted {
        tries: max_tries,
        best_overlap,
    })
}

pub const DEFAULT_EXTEND_TRIES: usize = 16;
