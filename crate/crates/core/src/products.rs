//! Product vectors `e ⊗ f` orthogonal to a subspace `V`.
//!
//! For fixed `x ∈ C^m` the conditions `⟨Ψ_i|x ⊗ y⟩ = 0` are linear in `y`:
//! `B(x) y = 0` with `B(x)` the `(dim V) × n` matrix built by [`build_bx`].
//! This module solves that system generically, through the closed-form
//! solution classes of the explicit families, and by a sampler that also
//! reaches the lower-dimensional parts of the solution variety.

use nalgebra::Schur;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FamilyKind, FamilySpec};
use crate::json::cvec;
use crate::linalg::singular_values;
use crate::linalg::{
    det, kron, lstsq_min_norm, normalized, null_space, numerical_rank, op_norm, remove_column,
    smallest_right_singular_vector, vec_to_matrix, CMat, CVec, ToleranceConfig, C64, ZERO_NORM,
};
use crate::rng::{complex_gaussian, complex_gaussian_vec, random_unit, stream_rng};
use crate::search::{alternating_search, Extremum};
use crate::subspace::Subspace;

/// Solution class label, assigned by the defining condition on `x`:
/// `x₀ = 0` for S1, `x₁ + … + x_{m-1} = 0` for S2 and `x₁ = 0` for S3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    S1,
    S2,
    S3,
    #[serde(rename = "generic")]
    Generic,
}

impl ClassTag {
    pub fn name(self) -> &'static str {
        match self {
            ClassTag::S1 => "S1",
            ClassTag::S2 => "S2",
            ClassTag::S3 => "S3",
            ClassTag::Generic => "generic",
        }
    }
}

/// A product vector `e ⊗ f` with its provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductVector {
    #[serde(with = "cvec")]
    pub e: CVec,
    #[serde(with = "cvec")]
    pub f: CVec,
    #[serde(rename = "class")]
    pub class_tag: ClassTag,
    /// Parameters the vector was generated from.
    #[serde(with = "cvec", default = "empty_vec")]
    pub params: CVec,
    /// `max_i |⟨Ψ_i|ê ⊗ f̂⟩|` against the subspace it was attached to.
    pub residual: f64,
}

fn empty_vec() -> CVec {
    CVec::zeros(0)
}

impl ProductVector {
    pub fn new(e: CVec, f: CVec, class_tag: ClassTag, params: Vec<C64>) -> Self {
        Self {
            e,
            f,
            class_tag,
            params: CVec::from_vec(params),
            residual: 0.0,
        }
    }

    /// Record the orthogonality residual against `v`.
    pub fn attach(mut self, v: &Subspace) -> Self {
        self.residual = orthogonality_residual(v, &self.e, &self.f);
        self
    }

    pub fn tensor(&self) -> CVec {
        kron(&self.e, &self.f)
    }

    /// `ê ⊗ f̂` with both factors normalized.
    pub fn unit_tensor(&self) -> CVec {
        kron(&self.e.normalize(), &self.f.normalize())
    }
}

/// `max_i |⟨b_i|ê ⊗ f̂⟩|` over the basis of `v`.
pub fn orthogonality_residual(v: &Subspace, e: &CVec, f: &CVec) -> f64 {
    let (ne, nf) = (e.norm(), f.norm());
    if ne < ZERO_NORM || nf < ZERO_NORM {
        return f64::INFINITY;
    }
    v.max_overlap(&kron(e, f)) / (ne * nf)
}

/// Residual bound every emitted product vector satisfies.
pub const PRODUCT_RESIDUAL: f64 = 1e-9;

/// `B(x)` for arbitrary (not necessarily orthonormal) spanning vectors:
/// row `i` is `y ↦ ⟨Ψ_i|x ⊗ y⟩`.
pub fn bx_from_vectors(vectors: &[CVec], m: usize, n: usize, x: &CVec) -> CMat {
    let mut out = CMat::zeros(vectors.len(), n);
    for (i, psi) in vectors.iter().enumerate() {
        for l in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..m {
                acc += psi[k * n + l].conj() * x[k];
            }
            out[(i, l)] = acc;
        }
    }
    out
}

pub fn build_bx(v: &Subspace, x: &CVec) -> Result<CMat> {
    if x.len() != v.m {
        return Err(Error::DimensionMismatch {
            expected: v.m,
            found: x.len(),
        });
    }
    Ok(bx_from_vectors(&v.basis, v.m, v.n, x))
}

fn symmetric_origin(v: &Subspace) -> Result<&FamilySpec> {
    match &v.origin {
        Some(spec) if spec.kind == FamilyKind::Symmetric => Ok(spec),
        _ => Err(Error::WrongFamily {
            expected: "symmetric",
        }),
    }
}

/// Determinant of the symmetric-family matrix `M(x)` whose rows are
/// `x_i y₀ - x₀ y_i` (`i = 1, …, m-1`) followed by `y ↦ Σ x_i conj(Ã_ij) y_j`:
/// `x₀^{m-2} Σ_{ij} x_i conj(Ã_ij) x_j`. It vanishes exactly when `B(x)` is
/// singular.
pub fn det_condition(v: &Subspace, x: &CVec) -> Result<C64> {
    let spec = symmetric_origin(v)?;
    let m = spec.m;
    if x.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: x.len(),
        });
    }
    let a = spec.a_tilde_matrix();
    let mut form = C64::new(0.0, 0.0);
    for i in 1..m {
        for j in 1..m {
            form += x[i] * a[(i - 1, j - 1)].conj() * x[j];
        }
    }
    Ok(form * x[0].powu(m as u32 - 2))
}

/// Which closed-form class to sample for which family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionClassSpec {
    pub family: FamilySpec,
    pub class_tag: ClassTag,
}

impl SolutionClassSpec {
    pub fn new(family: FamilySpec, class_tag: ClassTag) -> Self {
        Self { family, class_tag }
    }

    /// Number of free complex parameters taken by [`class_member`].
    pub fn free_params(&self) -> Result<usize> {
        self.check()?;
        let m = self.family.m;
        Ok(match self.class_tag {
            ClassTag::S1 => 2 * (m - 1),
            ClassTag::S2 => m - 1,
            ClassTag::S3 => m - 2,
            ClassTag::Generic => unreachable!("rejected by check"),
        })
    }

    fn check(&self) -> Result<()> {
        self.family.validate()?;
        let kind = self.family.kind;
        let family_ok = matches!(kind, FamilyKind::Symmetric | FamilyKind::General);
        if !family_ok {
            return Err(Error::Unsupported(format!(
                "no closed-form solution classes for the {} family",
                kind.name()
            )));
        }
        match self.class_tag {
            ClassTag::Generic => Err(Error::Unsupported(
                "the generic class has no closed form; use generic_solutions".into(),
            )),
            ClassTag::S3 if kind != FamilyKind::General => Err(Error::Unsupported(
                "class S3 exists only for the general family".into(),
            )),
            ClassTag::S3 if self.family.m <= 4 => Err(Error::Unsatisfiable(format!(
                "class S3 for m = {} forces x = (x0, 0, ..., 0): only the degenerate rays \
                 |0> (x) (x0|0> + y|n-1>) remain",
                self.family.m
            ))),
            _ => Ok(()),
        }
    }
}

/// Root of `c₂ t² + c₁ t + c₀ = 0` (the `+` branch), or of the linear
/// equation when `c₂` vanishes. A discriminant at roundoff level is treated
/// as zero, since its square root would turn `1e-16` into `1e-8`.
fn quadratic_root(c2: C64, c1: C64, c0: C64) -> Result<C64> {
    if c2.norm() > 1e-14 {
        let d2 = c1 * c1 - c2 * c0 * 4.0;
        let scale = c1.norm_sqr() + (c2 * c0).norm() * 4.0;
        let disc = if d2.norm() <= 1e-12 * scale {
            C64::new(0.0, 0.0)
        } else {
            d2.sqrt()
        };
        Ok((-c1 + disc) / (c2 * 2.0))
    } else if c1.norm() > 1e-14 {
        Ok(-c0 / c1)
    } else {
        Err(Error::Unsatisfiable(
            "degenerate quadric in the last coordinate".into(),
        ))
    }
}

/// Deterministic class member for the given free parameters.
///
/// * S1: `free = (x̃, g)`, both of length `m-1`; `e = (0, x̃)` and
///   `f = (0, g')` with `g'` the component of `g` orthogonal to `Ãᵀ x̃*`.
/// * S2: `free = (x₀, x₁, …, x_{m-2})`; `x_{m-1}` solves
///   `x̃ᵀ conj(Ã) x̃ = 0` and `f = e` (symmetric) or
///   `f = e ⊕ x_{m-1}(t, t², …)` with `t = x₀/x₁` (general).
/// * S3: `free = (x₀, x₂, …, x_{m-3}, y_{n-1})`; `x₁ = x_{m-1} = 0`,
///   `x_{m-2} = -(x₂ + … + x_{m-3})` and `f = e ⊕ (0, …, 0, y_{n-1})`.
pub fn class_member(spec: &SolutionClassSpec, free: &[C64]) -> Result<(CVec, CVec)> {
    let need = spec.free_params()?;
    if free.len() != need {
        return Err(Error::DimensionMismatch {
            expected: need,
            found: free.len(),
        });
    }
    let (m, n) = (spec.family.m, spec.family.n);
    let a = spec.family.a_tilde_matrix();
    let zero = C64::new(0.0, 0.0);
    match spec.class_tag {
        ClassTag::S1 => {
            let xt = CVec::from_column_slice(&free[..m - 1]);
            let g = CVec::from_column_slice(&free[m - 1..]);
            let w = a.transpose() * xt.map(|z| z.conj());
            let g_perp = &g - &w * (w.dotc(&g) / w.norm_squared());
            let mut e = CVec::zeros(m);
            e.rows_mut(1, m - 1).copy_from(&xt);
            let mut f = CVec::zeros(n);
            f.rows_mut(1, m - 1).copy_from(&g_perp);
            Ok((e, f))
        }
        ClassTag::S2 => {
            let mut e = CVec::zeros(m);
            e.rows_mut(0, m - 1).copy_from_slice(free);
            let c = a.map(|z| z.conj());
            let last = m - 2;
            let c2 = c[(last, last)];
            let mut c1 = zero;
            let mut c0 = zero;
            for k in 0..last {
                c1 += (c[(k, last)] + c[(last, k)]) * e[k + 1];
                for l in 0..last {
                    c0 += c[(k, l)] * e[k + 1] * e[l + 1];
                }
            }
            e[m - 1] = quadratic_root(c2, c1, c0)?;
            let mut f = CVec::zeros(n);
            f.rows_mut(0, m).copy_from(&e);
            if n > m {
                if e[1].norm() < ZERO_NORM {
                    return Err(Error::Unsatisfiable(
                        "S2 of the general family needs x1 != 0".into(),
                    ));
                }
                let t = e[0] / e[1];
                let mut p = e[m - 1];
                for j in m..n {
                    p *= t;
                    f[j] = p;
                }
            }
            Ok((e, f))
        }
        ClassTag::S3 => {
            let mut e = CVec::zeros(m);
            e[0] = free[0];
            let mut sum = zero;
            for (k, z) in free[1..need - 1].iter().enumerate() {
                e[k + 2] = *z;
                sum += z;
            }
            e[m - 2] = -sum;
            let mut f = CVec::zeros(n);
            f.rows_mut(0, m).copy_from(&e);
            f[n - 1] = free[need - 1];
            Ok((e, f))
        }
        ClassTag::Generic => unreachable!("rejected by free_params"),
    }
}

/// Seeded samples from a closed-form solution class, each verified to be
/// orthogonal to the family subspace.
pub fn enumerate_class<R: Rng + ?Sized>(
    spec: &SolutionClassSpec,
    count: usize,
    rng: &mut R,
    tol: &ToleranceConfig,
) -> Result<Vec<ProductVector>> {
    let k = spec.free_params()?;
    let v = spec.family.build(tol)?;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let free: Vec<C64> = (0..k).map(|_| complex_gaussian(rng)).collect();
        let (e, f) = class_member(spec, &free)?;
        let p = ProductVector::new(e, f, spec.class_tag, free).attach(&v);
        if p.residual.is_nan() || p.residual > PRODUCT_RESIDUAL {
            return Err(Error::Precondition(format!(
                "class {} sample not orthogonal to V (residual {:.3e})",
                spec.class_tag.name(),
                p.residual
            )));
        }
        out.push(p);
    }
    Ok(out)
}

/// Signed maximal minors of an `(n-1) × n` matrix: `y_i = (-1)^i det(B_{-i})`.
pub fn cofactor_solution(b: &CMat) -> CVec {
    let n = b.ncols();
    CVec::from_fn(n, |i, _| {
        let d = det(&remove_column(b, i));
        if i % 2 == 0 {
            d
        } else {
            -d
        }
    })
}

/// Product vectors `x ⊗ f` orthogonal to `v` for the given `x`.
pub fn generic_solutions(
    v: &Subspace,
    x: &CVec,
    tol: &ToleranceConfig,
) -> Result<Vec<ProductVector>> {
    let b = build_bx(v, x)?;
    let e = normalized(x)?;
    let n = v.n;
    let fs: Vec<CVec> = if v.dim() + 1 == n && numerical_rank(&b, tol) == n - 1 {
        vec![cofactor_solution(&b)]
    } else if v.dim() == 0 {
        (0..n).map(|k| crate::linalg::ket(n, k)).collect()
    } else {
        null_space(&b, tol)
    };
    Ok(fs
        .into_iter()
        .filter_map(|f| normalized(&f).ok())
        .map(|f| {
            ProductVector::new(e.clone(), f, ClassTag::Generic, x.iter().copied().collect())
                .attach(v)
        })
        .filter(|p| p.residual <= PRODUCT_RESIDUAL)
        .collect())
}

/// Outcome of the local-projection rank test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Theorem1Check {
    pub holds: bool,
    /// The rank the local projection must reach: `dim V`.
    pub required_rank: usize,
    pub best_rank: usize,
    #[serde(with = "crate::json::opt_cvec", default)]
    pub witness_x: Option<CVec>,
}

/// Search for `x` making the local projection `Π_V(x)` of full rank `dim V`
/// (equivalently `B(x)` of full row rank).
pub fn theorem1_assumption<R: Rng + ?Sized>(
    v: &Subspace,
    trials: usize,
    rng: &mut R,
    tol: &ToleranceConfig,
) -> Theorem1Check {
    let required = v.dim();
    let mut best_rank = 0;
    for _ in 0..trials {
        let x = complex_gaussian_vec(rng, v.m);
        let proj = crate::linalg::local_projection(&v.basis, &x, v.m, v.n)
            .expect("dimensions match the subspace");
        let r = numerical_rank(&proj, tol);
        best_rank = best_rank.max(r);
        if r == required && required <= v.n {
            return Theorem1Check {
                holds: true,
                required_rank: required,
                best_rank,
                witness_x: Some(x),
            };
        }
    }
    Theorem1Check {
        holds: false,
        required_rank: required,
        best_rank,
        witness_x: None,
    }
}

/// The bilinear map `(x, y) ↦ (xᵀ C_i y)_i`, `C_i = conj(A_i)`.
struct Bilinear {
    mats: Vec<CMat>,
    m: usize,
    n: usize,
}

impl Bilinear {
    fn new(v: &Subspace) -> Self {
        Self {
            mats: v
                .basis
                .iter()
                .map(|b| {
                    vec_to_matrix(b, v.m, v.n)
                        .expect("basis length")
                        .map(|z| z.conj())
                })
                .collect(),
            m: v.m,
            n: v.n,
        }
    }

    fn bx(&self, x: &CVec) -> CMat {
        let mut out = CMat::zeros(self.mats.len(), self.n);
        for (i, c) in self.mats.iter().enumerate() {
            out.row_mut(i).copy_from(&(c.transpose() * x).transpose());
        }
        out
    }

    fn cy(&self, y: &CVec) -> CMat {
        let mut out = CMat::zeros(self.mats.len(), self.m);
        for (i, c) in self.mats.iter().enumerate() {
            out.row_mut(i).copy_from(&(c * y).transpose());
        }
        out
    }

    fn eval(&self, x: &CVec, y: &CVec) -> CVec {
        CVec::from_iterator(self.mats.len(), self.mats.iter().map(|c| (c * y).dot(x)))
    }

    fn residual(&self, x: &CVec, y: &CVec) -> f64 {
        let s = x.norm() * y.norm();
        if s < ZERO_NORM {
            return f64::INFINITY;
        }
        self.eval(x, y).iter().map(|z| z.norm()).fold(0.0, f64::max) / s
    }

    fn jacobian(&self, x: &CVec, y: &CVec, x0: &CVec, y0: &CVec) -> CMat {
        let (m, n, d) = (self.m, self.n, self.mats.len());
        let mut j = CMat::zeros(d + 2, m + n);
        j.view_mut((0, 0), (d, m)).copy_from(&self.cy(y));
        j.view_mut((0, m), (d, n)).copy_from(&self.bx(x));
        j.view_mut((d, 0), (1, m)).copy_from(&x0.adjoint());
        j.view_mut((d + 1, m), (1, n)).copy_from(&y0.adjoint());
        j
    }

    /// At a solution on a non-reduced component the residual is quadratic
    /// in the distance, so a residual of `1e-16` only locates the point to
    /// about `1e-8`. Such points show up as Jacobian singular values strictly
    /// between the numerically zero and the order-one ones.
    fn well_located(&self, x: &CVec, y: &CVec) -> bool {
        let (x, y) = (x.normalize(), y.normalize());
        let sv = singular_values(&self.jacobian(&x, &y, &x, &y));
        let smax = sv.first().copied().unwrap_or(0.0);
        sv.iter()
            .all(|&s| s >= LOCATED_GAP_HIGH * smax || s <= LOCATED_GAP_LOW * smax)
    }

    /// Gauss–Newton refinement of an approximate solution of
    /// `B(x) y = 0` under the normalizations `⟨x₀|x⟩ = ⟨y₀|y⟩ = 1`.
    fn polish(&self, x: &CVec, y: &CVec) -> (CVec, CVec, f64) {
        let (m, n, d) = (self.m, self.n, self.mats.len());
        let x0 = x.normalize();
        let y0 = y.normalize();
        let (mut x, mut y) = (x0.clone(), y0.clone());
        let mut best = (x.clone(), y.clone(), self.residual(&x, &y));
        for _ in 0..60 {
            if best.2 <= 1e-15 {
                break;
            }
            let mut g = CVec::zeros(d + 2);
            g.rows_mut(0, d).copy_from(&self.eval(&x, &y));
            g[d] = x0.dotc(&x) - C64::new(1.0, 0.0);
            g[d + 1] = y0.dotc(&y) - C64::new(1.0, 0.0);
            let j = self.jacobian(&x, &y, &x0, &y0);
            let step = lstsq_min_norm(&j, &(-g), 1e-12);
            x += step.rows(0, m);
            y += step.rows(m, n);
            let r = self.residual(&x, &y);
            if r < best.2 {
                best = (x.clone(), y.clone(), r);
            } else if r > 1e3 * best.2 {
                break;
            }
        }
        (best.0.normalize(), best.1.normalize(), best.2)
    }
}

/// Residual threshold for sampled solutions; well below
/// [`PRODUCT_RESIDUAL`] so that sampled rows do not perturb span ranks.
const SAMPLE_ACCEPT: f64 = 1e-12;
/// Singular values below this fraction of `σ_max` seed a polishing run.
const SEED_CUTOFF: f64 = 1e-3;
const LOCATED_GAP_HIGH: f64 = 1e-5;
const LOCATED_GAP_LOW: f64 = 1e-13;
const COORDINATE_DRAWS: u64 = 2;
const STREAM_COORD: u64 = 1 << 32;
const STREAM_DESCENT: u64 = 2 << 32;

/// Solutions `x' ⊗ y` near the given `x`. When `exact_x` is false, `x` is
/// only an approximation of a singular point and every candidate must pass
/// the location test after polishing.
fn solutions_from_x(
    bil: &Bilinear,
    v: &Subspace,
    x: &CVec,
    exact_x: bool,
    tol: &ToleranceConfig,
) -> Vec<ProductVector> {
    let b = bil.bx(x);
    let mut seeds: Vec<CVec> = Vec::new();
    if op_norm(&b) <= f64::MIN_POSITIVE {
        return Vec::new();
    }
    let loose = ToleranceConfig {
        rank_rel: SEED_CUTOFF,
        ..*tol
    };
    let kernel = null_space(&b, &loose);
    if kernel.is_empty() {
        seeds.push(smallest_right_singular_vector(&b));
    }
    seeds.extend(kernel);
    let mut out = Vec::new();
    for y in seeds {
        let (xp, yp) = if exact_x && bil.residual(x, &y) <= 1e-15 {
            (x.normalize(), y.normalize())
        } else {
            let (xp, yp, r) = bil.polish(x, &y);
            if r > SAMPLE_ACCEPT || !bil.well_located(&xp, &yp) {
                continue;
            }
            (xp, yp)
        };
        let exact = null_space(&bil.bx(&xp), tol);
        let fs = if exact.is_empty() { vec![yp] } else { exact };
        for f in fs {
            if !exact_x && !bil.well_located(&xp, &f) {
                continue;
            }
            let p = ProductVector::new(xp.clone(), f, ClassTag::Generic, Vec::new()).attach(v);
            if p.residual <= SAMPLE_ACCEPT {
                out.push(p);
            }
        }
    }
    out
}

/// Points `a + s b` where the square pencil `B(a) + s B(b)` is singular.
fn pencil_points(bil: &Bilinear, a: &CVec, b: &CVec) -> Vec<CVec> {
    let ba = bil.bx(a);
    let bb = bil.bx(b);
    let Some(sol) = bb.lu().solve(&ba) else {
        return Vec::new();
    };
    let Some(schur) = Schur::try_new(-sol, f64::EPSILON, 10_000) else {
        return Vec::new();
    };
    let (_, t) = schur.unpack();
    t.diagonal()
        .iter()
        .filter(|s| s.is_finite() && s.norm() < 1e6)
        .map(|s| a + b * *s)
        .collect()
}

fn sample_draw(
    bil: &Bilinear,
    v: &Subspace,
    x: CVec,
    line_dir: Option<CVec>,
    tol: &ToleranceConfig,
) -> Vec<ProductVector> {
    let b = bil.bx(&x);
    if v.dim() < v.n || numerical_rank(&b, tol) < v.n.min(v.dim()) {
        return solutions_from_x(bil, v, &x, true, tol);
    }
    match line_dir {
        Some(dir) if v.dim() == v.n => pencil_points(bil, &x, &dir)
            .iter()
            .flat_map(|p| solutions_from_x(bil, v, p, false, tol))
            .collect(),
        _ => Vec::new(),
    }
}

fn descent_draw(
    bil: &Bilinear,
    v: &Subspace,
    proj: &CMat,
    seed: u64,
    k: u64,
    tol: &ToleranceConfig,
) -> Vec<ProductVector> {
    let e0 = random_unit(&mut stream_rng(seed, STREAM_DESCENT + k), v.m);
    let opt = alternating_search(proj, v.m, v.n, Extremum::Min, e0, 300);
    if opt.value > 1e-4 {
        return Vec::new();
    }
    let (x, y, r) = bil.polish(&opt.e, &opt.f);
    if r > SAMPLE_ACCEPT || !bil.well_located(&x, &y) {
        return Vec::new();
    }
    solutions_from_x(bil, v, &x, false, tol)
        .into_iter()
        .chain(std::iter::once(
            ProductVector::new(x, y, ClassTag::Generic, Vec::new()).attach(v),
        ))
        .filter(|p| p.residual <= SAMPLE_ACCEPT)
        .collect()
}

/// Sample product vectors orthogonal to `v`.
///
/// Draw `k` uses stream `k` of `seed`: a random `x` (its kernel when `B(x)`
/// is singular, otherwise the singular points of a random line through it
/// when `B` is square). Further draws restrict `x` to every coordinate
/// subspace, and a set of alternating descents on `⟨x,y|Π_V|x,y⟩` covers
/// shapes without generic solutions. Approximate solutions are refined by
/// Gauss–Newton and kept only when their residual is below `1e-12`.
pub fn sample_orthogonal_products(
    v: &Subspace,
    draws: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Vec<ProductVector> {
    let (m, d) = (v.m, v.dim());
    if d == 0 {
        return Vec::new();
    }
    let bil = Bilinear::new(v);
    let mut generic: Vec<Vec<ProductVector>> = (0..draws as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k);
            let x = complex_gaussian_vec(&mut rng, m);
            let dir = complex_gaussian_vec(&mut rng, m);
            sample_draw(&bil, v, x, Some(dir), tol)
        })
        .collect();
    let masks: Vec<u64> = (1..(1u64 << m) - 1).collect();
    let coord: Vec<Vec<ProductVector>> = masks
        .par_iter()
        .flat_map_iter(|&mask| (0..COORDINATE_DRAWS).map(move |t| (mask, t)))
        .map(|(mask, t)| {
            let mut rng = stream_rng(seed, STREAM_COORD + mask * COORDINATE_DRAWS + t);
            let zero_out = |mut z: CVec| {
                for k in 0..m {
                    if mask >> k & 1 == 1 {
                        z[k] = C64::new(0.0, 0.0);
                    }
                }
                z
            };
            let x = zero_out(complex_gaussian_vec(&mut rng, m));
            let dir = zero_out(complex_gaussian_vec(&mut rng, m));
            let free = m - mask.count_ones() as usize;
            sample_draw(&bil, v, x, (free >= 2).then_some(dir), tol)
        })
        .collect();
    let proj = v.projector();
    let descents = (draws / 4).max(m + v.n) as u64;
    let desc: Vec<Vec<ProductVector>> = (0..descents)
        .into_par_iter()
        .map(|k| descent_draw(&bil, v, &proj, seed, k, tol))
        .collect();
    generic.extend(coord);
    generic.extend(desc);
    generic.into_iter().flatten().collect()
}
