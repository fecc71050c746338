//! Decomposable witnesses `W = Q^Γ` with `Q` supported on a completely
//! entangled subspace, and numerical evidence for their optimality.
//!
//! `W` is optimal when `W - εP` fails to be block-positive for every `ε > 0`
//! and every positive `P`; only `P` supported on the kernel `K` of the span of
//! partially conjugated product vectors needs to be tested.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FamilyKind;
use crate::json::{cmat, cvec, cvec_list};
use crate::linalg::{
    columns, hermitian_distance, hermitian_eigh, kron, min_eigenvalue, null_space, outer,
    partial_transpose, CMat, CVec, ToleranceConfig, C64,
};
use crate::products::{bx_from_vectors, sample_orthogonal_products};
use crate::rng::{child_seed, complex_gaussian_matrix, stream_rng};
use crate::search::{multi_start_search, product_value, Extremum, ProductOptimum};
use crate::spanning::{default_samples, span_of_pv};
use crate::subspace::{is_ces, SearchBudget, Subspace};

/// A search-found minimum counts as negative below `-SEARCH_NEG`.
pub const SEARCH_NEG: f64 = 1e-9;
/// Starts of the block-positivity search.
pub const DEFAULT_STARTS: usize = 64;
const SEARCH_ITER: usize = 500;

/// `Q = Σ λ_i |b_i⟩⟨b_i|` and its partial transpose `W`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessPair {
    pub subspace: Subspace,
    pub lambdas: Vec<f64>,
    #[serde(rename = "Q", with = "cmat")]
    pub q: CMat,
    #[serde(rename = "W", with = "cmat")]
    pub w: CMat,
    #[serde(rename = "min_eig_W")]
    pub min_eig_w: f64,
}

impl WitnessPair {
    /// Decompose an arbitrary positive matrix `Q` into its support and
    /// weights.
    pub fn from_q(q: CMat, m: usize, n: usize, tol: &ToleranceConfig) -> Result<Self> {
        let d = m * n;
        if q.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: q.nrows(),
            });
        }
        let (vals, vecs) = hermitian_eigh(&q);
        let top = vals.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let mut basis = Vec::new();
        let mut lambdas = Vec::new();
        for (k, &val) in vals.iter().enumerate() {
            if val.abs() > tol.rank_rel * top {
                basis.push(vecs.column(k).into_owned());
                lambdas.push(val);
            }
        }
        let w = partial_transpose(&q, m, n)?;
        let min_eig_w = min_eigenvalue(&w);
        Ok(Self {
            subspace: Subspace {
                m,
                n,
                basis,
                origin: None,
            },
            lambdas,
            q,
            w,
            min_eig_w,
        })
    }

    pub fn is_npt(&self, threshold: f64) -> bool {
        self.min_eig_w < -threshold
    }
}

/// Build `Q` over the stored basis of `v` and `W = Q^Γ`.
pub fn build_witness(v: &Subspace, lambdas: &[f64]) -> Result<WitnessPair> {
    if lambdas.len() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            found: lambdas.len(),
        });
    }
    if let Some(bad) = lambdas.iter().find(|l| l.is_nan() || **l <= 0.0) {
        return Err(Error::Precondition(format!(
            "weights must be strictly positive, got {bad}"
        )));
    }
    let d = v.ambient_dim();
    let mut q = CMat::zeros(d, d);
    for (b, l) in v.basis.iter().zip(lambdas) {
        q += outer(b) * C64::new(*l, 0.0);
    }
    let w = partial_transpose(&q, v.m, v.n)?;
    let min_eig_w = min_eigenvalue(&w);
    Ok(WitnessPair {
        subspace: v.clone(),
        lambdas: lambdas.to_vec(),
        q,
        w,
        min_eig_w,
    })
}

/// Minimum of `⟨e,f|W|e,f⟩` over unit product vectors found by multi-start
/// alternating minimization.
pub fn block_positivity_min(
    w: &CMat,
    m: usize,
    n: usize,
    starts: usize,
    seed: u64,
) -> ProductOptimum {
    multi_start_search(w, m, n, Extremum::Min, starts, SEARCH_ITER, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Closed-form family construction along a one-parameter curve.
    ClosedForm,
    /// Multi-start minimization of `W - εP` over product vectors.
    Search,
    /// `ε = 0`: the value of `W` on an element of `P_V`.
    Degenerate,
}

/// Outcome of one `(P, ε)` cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub p_label: String,
    pub eps: f64,
    pub strategy: Strategy,
    /// The product vector `e ⊗ f`, unit factors; for the closed form
    /// `e = u/‖u‖` and `f = v*/‖v‖`.
    #[serde(with = "cvec")]
    pub e: CVec,
    #[serde(with = "cvec")]
    pub f: CVec,
    /// `⟨e,f|W - εP|e,f⟩`.
    pub value: f64,
    /// The closed-form prediction of `value`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_error: Option<f64>,
    /// For the closed form, `value` is evaluated as
    /// `Σ λ_i |⟨b_i|e ⊗ f*⟩|² - ε⟨e,f|P|e,f⟩`; this is the same quantity
    /// computed directly from the matrix `W - εP`, which loses accuracy to
    /// cancellation when the value is tiny.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct_value: Option<f64>,
    pub success: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Curve data for the closed-form construction.
///
/// `u = (1, c₁, …, c_{m-2}, η - Σc)` so that `η = u₁ + … + u_{m-1}`, and `v`
/// is the solution of `⟨b_i|u ⊗ v⟩ = 0` for every basis vector except the
/// last symmetric-family one, normalized by `v₀ = 1`. Then
/// `⟨u,v*|W|u,v*⟩ = κ|η|⁴` and the kernel coordinates of `u ⊗ v*` are
/// `aη + bη*`.
struct Curve {
    free: Vec<C64>,
    kappa: f64,
    a: CVec,
    b: CVec,
}

impl Curve {
    fn point(&self, wp: &WitnessPair, eta: C64) -> Option<(CVec, CVec)> {
        curve_point(wp, &self.free, eta)
    }
}

fn curve_point(wp: &WitnessPair, free: &[C64], eta: C64) -> Option<(CVec, CVec)> {
    let v = &wp.subspace;
    let m = v.m;
    let mut u = CVec::zeros(m);
    u[0] = C64::new(1.0, 0.0);
    let mut sum = C64::new(0.0, 0.0);
    for (k, c) in free.iter().enumerate() {
        u[k + 1] = *c;
        sum += c;
    }
    u[m - 1] = eta - sum;
    let rows: Vec<CVec> = v
        .basis
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != m - 1)
        .map(|(_, b)| b.clone())
        .collect();
    let b = bx_from_vectors(&rows, m, v.n, &u);
    let ns = null_space(&b, &ToleranceConfig::default());
    if ns.len() != 1 || ns[0][0].norm() < 1e-8 {
        return None;
    }
    let y = &ns[0] / ns[0][0];
    Some((u, y))
}

fn kernel_coords(kernel: &[CVec], u: &CVec, v: &CVec) -> CVec {
    let t = kron(u, &v.map(|z| z.conj()));
    CVec::from_iterator(kernel.len(), kernel.iter().map(|k| k.dotc(&t)))
}

fn build_curve(wp: &WitnessPair, kernel: &[CVec], free: Vec<C64>) -> Option<Curve> {
    let spec = wp.subspace.origin.as_ref()?;
    let m = spec.m;
    let a_t = spec.a_tilde_matrix();
    let kappa = wp.lambdas[m - 1] / a_t.norm_squared();
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let g = |eta: C64| -> Option<CVec> {
        let (u, v) = curve_point(wp, &free, eta)?;
        Some(kernel_coords(kernel, &u, &v))
    };
    let g1 = g(one)?;
    let gi = g(i)?;
    let a = (&g1 - &gi * i) * C64::new(0.5, 0.0);
    let b = (&g1 + &gi * i) * C64::new(0.5, 0.0);
    let probe = C64::new(0.3, 0.2);
    let predicted = &a * probe + &b * probe.conj();
    let actual = g(probe)?;
    let scale = g1.norm().max(gi.norm()).max(1e-300);
    if (&actual - &predicted).norm() > 1e-10 * scale {
        return None;
    }
    Some(Curve { free, kappa, a, b })
}

fn closed_form_applicable(wp: &WitnessPair) -> bool {
    let Some(spec) = &wp.subspace.origin else {
        return false;
    };
    let family = matches!(spec.kind, FamilyKind::Symmetric | FamilyKind::General);
    if !family || !spec.uses_default_a_tilde() {
        return false;
    }
    let Ok(gens) = spec.generators() else {
        return false;
    };
    let target = gens[spec.m - 1].normalize();
    wp.subspace.basis.len() == gens.len()
        && (&wp.subspace.basis[spec.m - 1] - target).norm() < 1e-12
}

/// `β(δ) = a†Pa + b†Pb + 2 Re(e^{-2iδ} a†Pb)`, maximized at
/// `δ = arg(a†Pb)/2`.
fn best_phase(curve: &Curve, pk: &CMat) -> (f64, f64) {
    let apa = curve.a.dotc(&(pk * &curve.a)).re;
    let bpb = curve.b.dotc(&(pk * &curve.b)).re;
    let apb = curve.a.dotc(&(pk * &curve.b));
    let delta = if apb.norm() > 0.0 {
        apb.arg() / 2.0
    } else {
        0.0
    };
    (delta, apa + bpb + 2.0 * apb.norm())
}

/// `⟨e,f|Q^Γ - εP|e,f⟩` through `⟨e,f|Q^Γ|e,f⟩ = ⟨e,f*|Q|e,f*⟩`, free of the
/// cancellation a direct evaluation of the matrix suffers.
fn decomposed_value(wp: &WitnessPair, p: &CMat, eps: f64, e: &CVec, f: &CVec) -> f64 {
    let x = kron(e, &f.map(|z| z.conj()));
    let q_part: f64 = wp
        .subspace
        .basis
        .iter()
        .zip(&wp.lambdas)
        .map(|(b, l)| l * b.dotc(&x).norm_sqr())
        .sum();
    q_part - eps * product_value(p, e, f)
}

fn closed_form_certificate(
    wp: &WitnessPair,
    p: &CMat,
    eps: f64,
    kernel: &[CVec],
    seed: u64,
    tol: &ToleranceConfig,
) -> Option<Certificate> {
    if !closed_form_applicable(wp) || kernel.is_empty() {
        return None;
    }
    let m = wp.subspace.m;
    let kmat = columns(kernel, wp.subspace.ambient_dim());
    let pk = kmat.adjoint() * p * &kmat;
    let mut candidates = vec![vec![C64::new(1.0, 0.0); m - 2]];
    let mut rng = stream_rng(seed, 0);
    for _ in 0..8 {
        let c = complex_gaussian_matrix(&mut rng, m - 2, 1);
        candidates.push(c.iter().copied().collect());
    }
    let mut best: Option<(Curve, f64, f64)> = None;
    for free in candidates {
        let Some(curve) = build_curve(wp, kernel, free) else {
            continue;
        };
        let (delta, beta) = best_phase(&curve, &pk);
        if best.as_ref().is_none_or(|b| beta > b.2) {
            best = Some((curve, delta, beta));
        }
    }
    let (curve, delta, beta) = best?;
    if beta.is_nan() || beta <= 1e-14 {
        return None;
    }
    let closed = |rho: f64| curve.kappa * rho.powi(4) - eps * rho * rho * beta;
    let mut rho = 1.0;
    let mut best_rho = None;
    for _ in 0..=60 {
        let c = closed(rho);
        if c < 0.0 && best_rho.is_none_or(|r: f64| c < closed(r)) {
            best_rho = Some(rho);
        }
        rho *= 0.5;
    }
    let rho = best_rho?;
    let eta = C64::from_polar(rho, delta);
    let (u, v) = curve.point(wp, eta)?;
    let scale = u.norm_squared() * v.norm_squared();
    let e = u.normalize();
    let f = v.map(|z| z.conj()).normalize();
    let value = decomposed_value(wp, p, eps, &e, &f);
    let direct = product_value(&(&wp.w - p * C64::new(eps, 0.0)), &e, &f);
    let predicted = closed(rho) / scale;
    let rel = (value - predicted).abs() / predicted.abs();
    Some(Certificate {
        p_label: String::new(),
        eps,
        strategy: Strategy::ClosedForm,
        e,
        f,
        value,
        closed_form: Some(predicted),
        relative_error: Some(rel),
        direct_value: Some(direct),
        success: value < -tol.neg_tol && direct < -tol.neg_tol,
        note: Some(format!("|eta| = {rho:.3e}, delta = {delta:.6}")),
    })
}

/// Find a product vector on which `W - εP` is negative.
///
/// The closed-form curve is tried first for the explicit families; the
/// multi-start search is the fallback. `ε = 0` returns the value of `W` on a
/// product vector orthogonal to the support of `Q`.
pub fn optimality_counterexample(
    wp: &WitnessPair,
    p: &CMat,
    eps: f64,
    kernel: &[CVec],
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<Certificate> {
    let v = &wp.subspace;
    let d = v.ambient_dim();
    if p.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: p.nrows(),
        });
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::Precondition(format!("eps must be >= 0, got {eps}")));
    }
    if eps == 0.0 {
        let found = sample_orthogonal_products(v, default_samples(v.m, v.n), seed, tol);
        let Some(pv) = found.first() else {
            return Err(Error::Precondition(
                "no product vector orthogonal to the support was found".into(),
            ));
        };
        let e = pv.e.normalize();
        let f = pv.f.map(|z| z.conj()).normalize();
        let value = product_value(&wp.w, &e, &f);
        return Ok(Certificate {
            p_label: String::new(),
            eps,
            strategy: Strategy::Degenerate,
            e,
            f,
            value,
            closed_form: Some(0.0),
            relative_error: None,
            direct_value: None,
            success: false,
            note: Some("eps = 0 leaves W itself, which is block-positive".into()),
        });
    }
    if let Some(cert) = closed_form_certificate(wp, p, eps, kernel, seed, tol) {
        if cert.success {
            return Ok(cert);
        }
    }
    let op = &wp.w - p * C64::new(eps, 0.0);
    let best = block_positivity_min(&op, v.m, v.n, DEFAULT_STARTS, seed);
    Ok(Certificate {
        p_label: String::new(),
        eps,
        strategy: Strategy::Search,
        e: best.e,
        f: best.f,
        value: best.value,
        closed_form: None,
        relative_error: None,
        direct_value: None,
        success: best.value < -SEARCH_NEG,
        note: None,
    })
}

/// Per-cell certificates over a grid of `ε` and positive `P` on `K`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimalityReport {
    #[serde(with = "cvec_list")]
    pub kernel: Vec<CVec>,
    pub certificates: Vec<Certificate>,
    pub all_negative: bool,
    /// Largest relative deviation between closed-form certificates and
    /// their predicted values.
    pub closed_form_max_rel_err: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// The test operators: `|k_j⟩⟨k_j|` for each kernel basis vector, then
/// `trials` random `K G G† K†` normalized to unit trace.
pub fn kernel_test_operators(
    kernel: &[CVec],
    dim: usize,
    trials: usize,
    seed: u64,
) -> Vec<(String, CMat)> {
    let mut out: Vec<(String, CMat)> = kernel
        .iter()
        .enumerate()
        .map(|(j, k)| (format!("kernel[{j}]"), outer(k)))
        .collect();
    if kernel.is_empty() {
        return out;
    }
    let kmat = columns(kernel, dim);
    for t in 0..trials {
        let g =
            complex_gaussian_matrix(&mut stream_rng(seed, t as u64), kernel.len(), kernel.len());
        let p = &kmat * (&g * g.adjoint()) * kmat.adjoint();
        let tr = p.trace().re;
        out.push((format!("random[{t}]"), p / C64::new(tr, 0.0)));
    }
    out
}

/// Compute `K` for the support of `Q` and test every `(ε, P)` cell.
pub fn verify_optimal(
    wp: &WitnessPair,
    eps_grid: &[f64],
    trials: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<OptimalityReport> {
    if eps_grid.is_empty() {
        return Err(Error::Precondition("eps grid is empty".into()));
    }
    if let Some(bad) = eps_grid.iter().find(|e| e.is_nan() || **e <= 0.0) {
        return Err(Error::Precondition(format!("eps must be > 0, got {bad}")));
    }
    let v = &wp.subspace;
    let span = span_of_pv(v, default_samples(v.m, v.n), child_seed(seed, 1), tol)?;
    let kernel = span.kernel_basis;
    let mut notes = span.notes;
    if kernel.is_empty() {
        notes.push(
            "K = {0}: the partially conjugated product vectors span the space, so W is optimal \
             by the spanning criterion"
                .into(),
        );
        return Ok(OptimalityReport {
            kernel,
            certificates: Vec::new(),
            all_negative: true,
            closed_form_max_rel_err: None,
            notes,
        });
    }
    let ops = kernel_test_operators(&kernel, v.ambient_dim(), trials, child_seed(seed, 2));
    let cells: Vec<(usize, f64, usize)> = eps_grid
        .iter()
        .enumerate()
        .flat_map(|(ei, &eps)| (0..ops.len()).map(move |pi| (ei, eps, pi)))
        .collect();
    let certificates: Vec<Certificate> = cells
        .par_iter()
        .enumerate()
        .map(|(idx, &(_, eps, pi))| {
            let cell_seed = child_seed(seed, 1000 + idx as u64);
            let mut cert = optimality_counterexample(wp, &ops[pi].1, eps, &kernel, cell_seed, tol)?;
            cert.p_label = ops[pi].0.clone();
            Ok(cert)
        })
        .collect::<Result<_>>()?;
    let all_negative = certificates.iter().all(|c| c.success);
    let closed_form_max_rel_err = certificates
        .iter()
        .filter_map(|c| c.relative_error)
        .reduce(f64::max);
    Ok(OptimalityReport {
        kernel,
        certificates,
        all_negative,
        closed_form_max_rel_err,
        notes,
    })
}

/// `Q` positive, `W = Q^Γ` and the support of `Q` completely entangled.
pub fn check_necessary_form(
    wp: &WitnessPair,
    tol: &ToleranceConfig,
    budget: &SearchBudget,
) -> bool {
    let v = &wp.subspace;
    let scale = wp.q.norm().max(1.0);
    if min_eigenvalue(&wp.q) < -tol.orth_tol * scale {
        return false;
    }
    let Ok(pt) = partial_transpose(&wp.q, v.m, v.n) else {
        return false;
    };
    if hermitian_distance(&pt, &wp.w) > tol.orth_tol * scale {
        return false;
    }
    is_ces(v, tol, budget).is_ces
}
