//! Span of the partially conjugated product vectors `e ⊗ f*` with
//! `e ⊗ f ⊥ V`, and its orthogonal complement `K`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FamilyKind, FamilySpec};
use crate::json::cvec_list;
use crate::linalg::{
    columns, conj, gram_schmidt, hermitian_distance, ket, kron, null_space, numerical_rank,
    projector, CMat, CVec, ToleranceConfig,
};
use crate::products::{
    enumerate_class, sample_orthogonal_products, ClassTag, ProductVector, SolutionClassSpec,
};
use crate::rng::{child_seed, stream_rng};
use crate::subspace::Subspace;

/// Largest projector distance at which two subspaces count as equal.
pub const SUBSPACE_MATCH: f64 = 1e-8;

/// `(e, f) ↦ (e, f*)`.
pub fn partial_conjugate(p: &ProductVector) -> ProductVector {
    ProductVector {
        f: conj(&p.f),
        ..p.clone()
    }
}

/// Span analysis of the partially conjugated product vectors of `V^⊥`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpanReport {
    pub span_dim: usize,
    #[serde(rename = "kernel", with = "cvec_list")]
    pub kernel_basis: Vec<CVec>,
    /// Number of product vectors stacked.
    pub samples_used: usize,
    /// How many of them came from closed-form solution classes.
    pub class_samples: usize,
    #[serde(
        with = "crate::json::opt_cvec_list",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub predicted_kernel: Option<Vec<CVec>>,
    pub kernel_match: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SpanReport {
    pub fn kernel_dim(&self) -> usize {
        self.kernel_basis.len()
    }
}

/// Default number of generic draws: `4mn`.
pub fn default_samples(m: usize, n: usize) -> usize {
    4 * m * n
}

/// Operator-norm distance between the orthogonal projectors onto the spans
/// of two vector lists.
pub fn projector_distance(a: &[CVec], b: &[CVec], dim: usize, tol: &ToleranceConfig) -> f64 {
    let span = |vs: &[CVec]| -> CMat {
        if vs.is_empty() {
            return CMat::zeros(dim, dim);
        }
        let basis = crate::linalg::column_space(&columns(vs, dim), tol);
        projector(&basis, dim)
    };
    hermitian_distance(&span(a), &span(b))
}

fn classes_for(spec: &FamilySpec) -> Vec<ClassTag> {
    match spec.kind {
        FamilyKind::Symmetric => vec![ClassTag::S1, ClassTag::S2],
        FamilyKind::General => vec![ClassTag::S1, ClassTag::S2, ClassTag::S3],
        _ => Vec::new(),
    }
}

/// Rank and kernel of the stacked rows `ê ⊗ f̂*`.
fn span_and_kernel(rows: &[CVec], dim: usize, tol: &ToleranceConfig) -> (usize, Vec<CVec>) {
    if rows.is_empty() {
        return (0, (0..dim).map(|k| ket(dim, k)).collect());
    }
    let stacked = columns(rows, dim).adjoint();
    let rank = numerical_rank(&stacked, tol);
    (rank, null_space(&stacked, tol))
}

/// Sample product vectors in `V^⊥` (generic draws plus closed-form classes
/// for the explicit families), partially conjugate them and compute the rank
/// of their span and its orthogonal complement `K`.
pub fn span_of_pv(
    v: &Subspace,
    samples: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<SpanReport> {
    let dim = v.ambient_dim();
    if samples < dim {
        return Err(Error::Precondition(format!(
            "need at least m*n = {dim} samples, got {samples}"
        )));
    }
    let mut notes = Vec::new();
    let mut products = sample_orthogonal_products(v, samples, seed, tol);
    let mut class_samples = 0;
    if let Some(spec) = &v.origin {
        for (idx, tag) in classes_for(spec).into_iter().enumerate() {
            let class = SolutionClassSpec::new(spec.clone(), tag);
            let mut rng = stream_rng(child_seed(seed, 100 + idx as u64), 0);
            match enumerate_class(&class, dim, &mut rng, tol) {
                Ok(found) => {
                    class_samples += found.len();
                    products.extend(found);
                }
                Err(err) => notes.push(format!("class {} skipped: {err}", tag.name())),
            }
        }
    }
    if products.is_empty() {
        notes.push("no product vectors orthogonal to V were found".into());
    }
    let rows: Vec<CVec> = products
        .iter()
        .map(|p| partial_conjugate(p).unit_tensor())
        .collect();
    let (span_dim, kernel_basis) = span_and_kernel(&rows, dim, tol);
    let mut report = SpanReport {
        span_dim,
        kernel_basis,
        samples_used: rows.len(),
        class_samples,
        predicted_kernel: None,
        kernel_match: None,
        kernel_distance: None,
        notes,
    };
    if let Some(spec) = &v.origin {
        if let Ok(pred) = predicted_kernel(spec) {
            let dist = projector_distance(&report.kernel_basis, &pred, dim, tol);
            report.kernel_match = Some(dist <= SUBSPACE_MATCH);
            report.kernel_distance = Some(dist);
            report.predicted_kernel = Some(pred);
        }
    }
    Ok(report)
}

/// The kernel claimed for the symmetric family, `{|0⟩|ω⟩, |ω⟩|0⟩}` with
/// `ω = |1⟩ + … + |m-1⟩`, and for the general family those two vectors
/// (ω padded with zeros) together with `|ω⟩|j⟩`, `j = m, …, n-1`.
pub fn predicted_kernel(spec: &FamilySpec) -> Result<Vec<CVec>> {
    spec.validate()?;
    let (m, n) = (spec.m, spec.n);
    let omega = |len: usize| {
        let mut w = CVec::zeros(len);
        for k in 1..m {
            w[k] = crate::linalg::re(1.0);
        }
        w
    };
    match spec.kind {
        FamilyKind::Symmetric | FamilyKind::General => {
            let mut out = vec![kron(&ket(m, 0), &omega(n)), kron(&omega(m), &ket(n, 0))];
            for j in m..n {
                out.push(kron(&omega(m), &ket(n, j)));
            }
            gram_schmidt(&out, &ToleranceConfig::default())
        }
        FamilyKind::Counterexample => Err(Error::Unsupported(format!(
            "no closed-form kernel for the counterexample family; check that |0>|{}> lies in K instead",
            n - 1
        ))),
        FamilyKind::FootnotePair => Err(Error::Unsupported(
            "no kernel prediction for the footnote pair".into(),
        )),
    }
}

/// Rank of the span of partially conjugated S1-class vectors of the
/// symmetric family.
pub fn dim_span_s1_star(m: usize, seed: u64, tol: &ToleranceConfig) -> Result<usize> {
    let spec = SolutionClassSpec::new(FamilySpec::symmetric(m), ClassTag::S1);
    let count = 4 * m * m;
    let found = enumerate_class(&spec, count, &mut stream_rng(seed, 0), tol)?;
    let rows: Vec<CVec> = found
        .iter()
        .map(|p| partial_conjugate(p).unit_tensor())
        .collect();
    Ok(span_and_kernel(&rows, m * m, tol).0)
}

pub fn has_spanning_property(
    v: &Subspace,
    samples: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<bool> {
    Ok(span_of_pv(v, samples, seed, tol)?.span_dim == v.ambient_dim())
}

/// Norm of the component of `x` outside the span of the orthonormal `basis`.
pub fn residual_outside(basis: &[CVec], x: &CVec) -> f64 {
    let mut r = x.clone();
    for b in basis {
        r -= b * b.dotc(x);
    }
    r.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, re};

    #[test]
    fn partial_conjugation_examples() {
        let real = ProductVector::new(
            CVec::from_vec(vec![c(0.0, 1.0)]),
            CVec::from_vec(vec![re(1.0), re(-2.0)]),
            ClassTag::Generic,
            Vec::new(),
        );
        assert_eq!(partial_conjugate(&real).f, real.f);
        let p = ProductVector::new(
            CVec::from_vec(vec![re(1.0)]),
            CVec::from_vec(vec![c(0.0, 1.0), re(0.0)]),
            ClassTag::Generic,
            Vec::new(),
        );
        let q = partial_conjugate(&p);
        assert_eq!(q.f, CVec::from_vec(vec![c(0.0, -1.0), re(0.0)]));
        assert_eq!(partial_conjugate(&q).f, p.f);
        assert_eq!(q.e, p.e);
    }

    #[test]
    fn predicted_kernel_shapes() {
        let k = predicted_kernel(&FamilySpec::symmetric(3)).unwrap();
        assert_eq!(k.len(), 2);
        let w = CVec::from_vec(vec![re(0.0), re(1.0), re(1.0)]).normalize();
        assert!((&k[0] - kron(&ket(3, 0), &w)).norm() < 1e-15);
        assert!((&k[1] - kron(&w, &ket(3, 0))).norm() < 1e-15);
        assert_eq!(
            predicted_kernel(&FamilySpec::general(3, 5)).unwrap().len(),
            4
        );
        let err = predicted_kernel(&FamilySpec::counterexample(3, 4)).unwrap_err();
        assert!(err.to_string().contains("|0>|3>"));
    }

    #[test]
    fn projector_distance_is_basis_independent() {
        let tol = ToleranceConfig::default();
        let a = vec![ket(3, 0), ket(3, 1)];
        let b = vec![ket(3, 0) + ket(3, 1), ket(3, 0) - ket(3, 1) * re(2.0)];
        assert!(projector_distance(&a, &b, 3, &tol) < 1e-14);
        assert!((projector_distance(&a, &[ket(3, 2)], 3, &tol) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sample_count_precondition() {
        let v = crate::families::symmetric_family(3, None, &ToleranceConfig::default()).unwrap();
        assert!(span_of_pv(&v, 4, 0, &ToleranceConfig::default()).is_err());
    }
}
