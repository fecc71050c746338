//! The reproduction battery: each check pins its instances, sample counts and
//! tolerances, and reports a pass flag together with the numbers it saw.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::families::{extend_ces, FamilySpec, DEFAULT_EXTEND_TRIES};
use crate::linalg::{
    conj, det, kron, null_space, partial_transpose, ray_overlap, CMat, CVec, ToleranceConfig,
};
use crate::products::{bx_from_vectors, cofactor_solution, theorem1_assumption};
use crate::rng::{
    child_seed, complex_gaussian_matrix, complex_gaussian_vec, random_unit, stream_rng,
};
use crate::search::product_value;
use crate::spanning::{
    default_samples, dim_span_s1_star, has_spanning_property, residual_outside, span_of_pv,
    SUBSPACE_MATCH,
};
use crate::subspace::{is_ces, is_supported, make_subspace, max_ces_dim, SearchBudget, Subspace};
use crate::witness::{
    block_positivity_min, build_witness, verify_optimal, DEFAULT_STARTS, SEARCH_NEG,
};

/// Inputs shared by every check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub tol: ToleranceConfig,
    /// Generic draws for span computations; `None` means `4mn`.
    pub samples: Option<usize>,
    pub eps_grid: Vec<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            tol: ToleranceConfig::default(),
            samples: None,
            eps_grid: vec![1e-3, 1e-2, 0.1],
        }
    }
}

impl SuiteConfig {
    fn samples_for(&self, m: usize, n: usize) -> usize {
        self.samples.unwrap_or_else(|| default_samples(m, n))
    }

    fn budget(&self, label: u64) -> SearchBudget {
        SearchBudget::with_seed(child_seed(self.seed, label))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub metrics: BTreeMap<String, f64>,
}

impl CheckResult {
    fn new(id: u32, name: &str) -> Self {
        Self {
            id,
            name: name.into(),
            passed: true,
            detail: String::new(),
            metrics: BTreeMap::new(),
        }
    }

    fn metric(&mut self, key: impl Into<String>, value: f64) {
        self.metrics.insert(key.into(), value);
    }

    fn fail(&mut self, why: impl AsRef<str>) {
        self.passed = false;
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(why.as_ref());
    }

    fn finish(mut self, summary: impl Into<String>) -> Self {
        if self.passed {
            self.detail = summary.into();
        }
        self
    }

    /// One line: `PASS [id] name: detail`.
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} [{}] {}: {}", self.id, self.name, self.detail)
    }
}

/// Run a fallible check body, turning an error into a failure.
fn guarded(
    id: u32,
    name: &str,
    body: impl FnOnce(&mut CheckResult) -> Result<String>,
) -> CheckResult {
    let mut out = CheckResult::new(id, name);
    match body(&mut out) {
        Ok(summary) => out.finish(summary),
        Err(err) => {
            out.fail(format!("error: {err}"));
            out
        }
    }
}

pub const SYMMETRIC_M: [usize; 4] = [3, 4, 5, 6];
pub const GENERAL_MN: [(usize, usize); 4] = [(3, 4), (3, 5), (4, 5), (4, 6)];
pub const COUNTEREXAMPLE_MN: [(usize, usize); 3] = [(3, 4), (3, 5), (4, 5)];

/// Every family instance exercised by the battery, labelled.
pub fn family_instances(tol: &ToleranceConfig) -> Result<Vec<(String, Subspace)>> {
    let mut out = Vec::new();
    for m in SYMMETRIC_M {
        out.push((
            format!("symmetric m={m}"),
            FamilySpec::symmetric(m).build(tol)?,
        ));
    }
    for (m, n) in GENERAL_MN {
        out.push((
            format!("general ({m},{n})"),
            FamilySpec::general(m, n).build(tol)?,
        ));
    }
    for (m, n) in COUNTEREXAMPLE_MN {
        out.push((
            format!("counterexample ({m},{n})"),
            FamilySpec::counterexample(m, n).build(tol)?,
        ));
    }
    let (first, second) = crate::families::footnote_pair(tol)?;
    out.push(("footnote first".into(), first));
    out.push(("footnote complement".into(), second));
    Ok(out)
}

pub fn check_ces_certificates(cfg: &SuiteConfig) -> CheckResult {
    guarded(1, "CES certificates", |r| {
        let instances = family_instances(&cfg.tol)?;
        let budget = cfg.budget(1);
        let mut worst = 0.0_f64;
        for (label, v) in &instances {
            let cert = is_ces(v, &cfg.tol, &budget);
            worst = worst.max(cert.best_product_overlap);
            r.metric(format!("{label} overlap"), cert.best_product_overlap);
            if !cert.is_ces || cert.best_product_overlap >= 1.0 - 1e-6 {
                r.fail(format!(
                    "{label}: overlap {:.3e}",
                    cert.best_product_overlap
                ));
            }
        }
        Ok(format!(
            "{} subspaces completely entangled, largest product overlap {worst:.4}",
            instances.len()
        ))
    })
}

pub fn check_kernel_dimensions(cfg: &SuiteConfig) -> CheckResult {
    guarded(2, "kernel dimensions", |r| {
        let mut cases: Vec<(String, FamilySpec, usize)> = SYMMETRIC_M
            .iter()
            .map(|&m| (format!("symmetric m={m}"), FamilySpec::symmetric(m), 2))
            .collect();
        for (m, n) in GENERAL_MN {
            cases.push((
                format!("general ({m},{n})"),
                FamilySpec::general(m, n),
                n - m + 2,
            ));
        }
        let mut worst = 0.0_f64;
        for (idx, (label, spec, expected)) in cases.iter().enumerate() {
            let v = spec.build(&cfg.tol)?;
            let rep = span_of_pv(
                &v,
                cfg.samples_for(spec.m, spec.n),
                child_seed(cfg.seed, 200 + idx as u64),
                &cfg.tol,
            )?;
            let dist = rep.kernel_distance.unwrap_or(f64::INFINITY);
            worst = worst.max(dist);
            r.metric(format!("{label} kernel dim"), rep.kernel_dim() as f64);
            r.metric(format!("{label} distance"), dist);
            if rep.kernel_dim() != *expected || dist > SUBSPACE_MATCH {
                r.fail(format!(
                    "{label}: kernel dim {} (expected {expected}), projector distance {dist:.3e}",
                    rep.kernel_dim()
                ));
            }
        }
        Ok(format!(
            "{} kernels match the prediction, largest projector distance {worst:.2e}",
            cases.len()
        ))
    })
}

pub fn check_s1_span(cfg: &SuiteConfig) -> CheckResult {
    guarded(3, "S1* span dimension", |r| {
        for m in [3, 4, 5] {
            let dim = dim_span_s1_star(m, child_seed(cfg.seed, 300 + m as u64), &cfg.tol)?;
            r.metric(format!("m={m}"), dim as f64);
            if dim != (m - 1) * (m - 1) {
                r.fail(format!("m={m}: span {dim}, expected {}", (m - 1) * (m - 1)));
            }
        }
        Ok("dim span S1* = (m-1)^2 for m = 3, 4, 5".into())
    })
}

pub fn check_counterexample_kernel(cfg: &SuiteConfig) -> CheckResult {
    guarded(4, "counterexample kernel vector", |r| {
        let mut worst = 0.0_f64;
        for (idx, (m, n)) in [(3, 4), (3, 5)].into_iter().enumerate() {
            let v = FamilySpec::counterexample(m, n).build(&cfg.tol)?;
            let rep = span_of_pv(
                &v,
                cfg.samples_for(m, n),
                child_seed(cfg.seed, 400 + idx as u64),
                &cfg.tol,
            )?;
            let target = kron(&crate::linalg::ket(m, 0), &crate::linalg::ket(n, n - 1));
            let res = residual_outside(&rep.kernel_basis, &target);
            worst = worst.max(res);
            r.metric(format!("({m},{n}) residual"), res);
            r.metric(format!("({m},{n}) kernel dim"), rep.kernel_dim() as f64);
            if res > 1e-8 {
                r.fail(format!("({m},{n}): |0>|{}> residual {res:.3e}", n - 1));
            }
        }
        Ok(format!("|0>|n-1> lies in K, largest residual {worst:.2e}"))
    })
}

pub fn check_witness_validity(cfg: &SuiteConfig) -> CheckResult {
    guarded(5, "witness validity", |r| {
        let instances = family_instances(&cfg.tol)?;
        let mut worst_eig = f64::NEG_INFINITY;
        let mut worst_min = f64::INFINITY;
        for (idx, (label, v)) in instances.iter().enumerate() {
            let wp = build_witness(v, &vec![1.0; v.dim()])?;
            let best = block_positivity_min(
                &wp.w,
                v.m,
                v.n,
                DEFAULT_STARTS,
                child_seed(cfg.seed, 500 + idx as u64),
            );
            worst_eig = worst_eig.max(wp.min_eig_w);
            worst_min = worst_min.min(best.value);
            r.metric(format!("{label} min_eig_W"), wp.min_eig_w);
            r.metric(format!("{label} block min"), best.value);
            if wp.min_eig_w >= -1e-6 {
                r.fail(format!(
                    "{label}: min_eig_W {:.3e} is not negative",
                    wp.min_eig_w
                ));
            }
            if best.value < -SEARCH_NEG {
                r.fail(format!("{label}: block minimum {:.3e}", best.value));
            }
        }
        Ok(format!(
            "{} witnesses NPT (largest min eigenvalue {worst_eig:.3e}), block minimum {worst_min:.2e}",
            instances.len()
        ))
    })
}

pub fn check_optimality(cfg: &SuiteConfig) -> CheckResult {
    guarded(6, "optimality", |r| {
        let specs = [
            FamilySpec::symmetric(3),
            FamilySpec::symmetric(4),
            FamilySpec::general(3, 4),
            FamilySpec::general(3, 5),
        ];
        let mut cells = 0;
        let mut worst_value = f64::NEG_INFINITY;
        let mut worst_rel = 0.0_f64;
        for (idx, spec) in specs.iter().enumerate() {
            let label = format!("{} ({},{})", spec.kind.name(), spec.m, spec.n);
            let v = spec.build(&cfg.tol)?;
            let wp = build_witness(&v, &vec![1.0; v.dim()])?;
            let rep = verify_optimal(
                &wp,
                &cfg.eps_grid,
                10,
                child_seed(cfg.seed, 600 + idx as u64),
                &cfg.tol,
            )?;
            cells += rep.certificates.len();
            let top = rep
                .certificates
                .iter()
                .map(|c| c.value)
                .fold(f64::NEG_INFINITY, f64::max);
            worst_value = worst_value.max(top);
            let rel = rep.closed_form_max_rel_err.unwrap_or(0.0);
            worst_rel = worst_rel.max(rel);
            r.metric(format!("{label} kernel dim"), rep.kernel.len() as f64);
            r.metric(format!("{label} largest value"), top);
            r.metric(format!("{label} closed-form rel err"), rel);
            let failed = rep.certificates.iter().filter(|c| !c.success).count();
            if !rep.all_negative || top >= -cfg.tol.neg_tol {
                r.fail(format!(
                    "{label}: {failed} of {} cells not negative (largest value {top:.3e})",
                    rep.certificates.len()
                ));
            }
            if rel > 1e-8 {
                r.fail(format!("{label}: closed-form relative error {rel:.3e}"));
            }
        }
        Ok(format!(
            "{cells} cells negative (largest value {worst_value:.3e}), closed-form relative error {worst_rel:.2e}"
        ))
    })
}

/// A random subspace spanned by complex Gaussian vectors.
fn random_subspace(
    m: usize,
    n: usize,
    dim: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<Subspace> {
    let mut rng = stream_rng(seed, 0);
    let vectors: Vec<CVec> = (0..dim)
        .map(|_| complex_gaussian_vec(&mut rng, m * n))
        .collect();
    make_subspace(m, n, &vectors, tol)
}

pub fn check_theorem1(cfg: &SuiteConfig) -> CheckResult {
    guarded(7, "local projection rank and spanning", |r| {
        let mut tested = 0;
        let mut spanning = 0;
        let mut worst_ray = 0.0_f64;
        for n in [3, 4] {
            let runs: Vec<Result<(bool, bool, bool)>> = (0..20u64)
                .into_par_iter()
                .map(|k| {
                    let seed = child_seed(cfg.seed, 700 + 100 * n as u64 + k);
                    let v = random_subspace(n, n, n - 1, seed, &cfg.tol)?;
                    let ces = is_ces(&v, &cfg.tol, &SearchBudget::with_seed(seed)).is_ces;
                    let mut rng = stream_rng(seed, 1);
                    let assumed = theorem1_assumption(&v, 20, &mut rng, &cfg.tol).holds;
                    let spans = if ces && assumed {
                        has_spanning_property(&v, cfg.samples_for(n, n), seed, &cfg.tol)?
                    } else {
                        false
                    };
                    Ok((ces, assumed, spans))
                })
                .collect();
            for (k, run) in runs.into_iter().enumerate() {
                let (ces, assumed, spans) = run?;
                if ces && assumed {
                    tested += 1;
                    if spans {
                        spanning += 1;
                    } else {
                        r.fail(format!("n={n} sample {k}: no spanning property"));
                    }
                }
            }
            let v = random_subspace(n, n, n - 1, child_seed(cfg.seed, 790 + n as u64), &cfg.tol)?;
            let mut rng = stream_rng(child_seed(cfg.seed, 795 + n as u64), 0);
            for _ in 0..100 {
                let x = complex_gaussian_vec(&mut rng, n);
                let b = bx_from_vectors(&v.basis, n, n, &x);
                let cof = cofactor_solution(&b);
                let ns = null_space(&b, &cfg.tol);
                let dev = match ns.as_slice() {
                    [y] => 1.0 - ray_overlap(&cof, y),
                    _ => 1.0,
                };
                worst_ray = worst_ray.max(dev);
            }
        }
        r.metric("tested", tested as f64);
        r.metric("spanning", spanning as f64);
        r.metric("cofactor ray deviation", worst_ray);
        if tested == 0 {
            r.fail("no sampled subspace satisfied the assumption");
        }
        if worst_ray > 1e-9 {
            r.fail(format!("cofactor ray deviation {worst_ray:.3e}"));
        }
        Ok(format!(
            "{spanning}/{tested} qualifying subspaces span, cofactor ray deviation {worst_ray:.2e}"
        ))
    })
}

pub fn check_theorem2(cfg: &SuiteConfig) -> CheckResult {
    guarded(8, "supported subspaces of H_4 span", |r| {
        let runs: Vec<Result<(usize, bool, bool, bool)>> = (0..20u64)
            .into_par_iter()
            .map(|k| {
                let seed = child_seed(cfg.seed, 800 + k);
                let dim = 1 + (k as usize % 3);
                let v = random_subspace(4, 4, dim, seed, &cfg.tol)?;
                let ces = is_ces(&v, &cfg.tol, &SearchBudget::with_seed(seed)).is_ces;
                let supported = is_supported(&v, &cfg.tol);
                let spans = has_spanning_property(&v, cfg.samples_for(4, 4), seed, &cfg.tol)?;
                Ok((dim, ces, supported, spans))
            })
            .collect();
        let mut good = 0;
        for (k, run) in runs.into_iter().enumerate() {
            let (dim, ces, supported, spans) = run?;
            if !ces || !supported {
                r.fail(format!("sample {k} (dim {dim}) is not a supported CES"));
            } else if !spans {
                r.fail(format!(
                    "sample {k} (dim {dim}) lacks the spanning property"
                ));
            } else {
                good += 1;
            }
        }
        r.metric("spanning", good as f64);
        Ok(format!("{good}/20 supported CESs of dim 1..3 span"))
    })
}

pub fn check_extension_chains(cfg: &SuiteConfig) -> CheckResult {
    guarded(9, "extension chains", |r| {
        let shapes = [(3, 3), (3, 4), (4, 4)];
        let chains: Vec<Result<(usize, usize)>> = shapes
            .par_iter()
            .enumerate()
            .map(|(idx, &(m, n))| {
                let seed = child_seed(cfg.seed, 900 + idx as u64);
                let mut rng = stream_rng(seed, 0);
                let budget = SearchBudget::with_seed(seed);
                let mut v = make_subspace(m, n, &[random_unit(&mut rng, m * n)], &cfg.tol)?;
                let mut most_tries = 0;
                while v.dim() < max_ces_dim(m, n) {
                    let ext = extend_ces(&v, &mut rng, &cfg.tol, &budget, DEFAULT_EXTEND_TRIES)?;
                    most_tries = most_tries.max(ext.tries);
                    v = ext.subspace;
                }
                Ok((v.dim(), most_tries))
            })
            .collect();
        for ((m, n), chain) in shapes.iter().zip(chains) {
            match chain {
                Ok((dim, tries)) => {
                    r.metric(format!("({m},{n}) final dim"), dim as f64);
                    r.metric(format!("({m},{n}) most tries"), tries as f64);
                }
                Err(err) => r.fail(format!("({m},{n}): {err}")),
            }
        }
        Ok("chains reach (m-1)(n-1) for (3,3), (3,4), (4,4)".into())
    })
}

pub fn check_structural_identities(cfg: &SuiteConfig) -> CheckResult {
    guarded(10, "structural identities", |r| {
        let mut worst_det = 0.0_f64;
        for (idx, (m, n)) in GENERAL_MN.into_iter().enumerate() {
            let general = FamilySpec::general(m, n).generators()?;
            let symmetric = FamilySpec::symmetric(m).generators()?;
            let mut rng = stream_rng(child_seed(cfg.seed, 1000 + idx as u64), 0);
            for _ in 0..100 {
                let x = complex_gaussian_vec(&mut rng, m);
                let big = det(&bx_from_vectors(&general, m, n, &x));
                let small = det(&bx_from_vectors(&symmetric, m, m, &x));
                let expected = small * (-x[1]).powu((n - m) as u32);
                let rel = (big - expected).norm() / expected.norm();
                worst_det = worst_det.max(rel);
            }
        }
        let mut worst_pt = 0.0_f64;
        let mut rng = stream_rng(child_seed(cfg.seed, 1010), 0);
        for k in 0..200 {
            let (m, n) = [(2, 3), (3, 3), (3, 4)][k % 3];
            let g: CMat = complex_gaussian_matrix(&mut rng, m * n, m * n);
            let q = &g * g.adjoint();
            let w = partial_transpose(&q, m, n)?;
            let e = random_unit(&mut rng, m);
            let f = random_unit(&mut rng, n);
            let lhs = product_value(&w, &e, &f);
            let rhs = product_value(&q, &e, &conj(&f));
            worst_pt = worst_pt.max((lhs - rhs).abs() / rhs.abs());
        }
        r.metric("det relative error", worst_det);
        r.metric("partial transpose relative error", worst_pt);
        if worst_det > 1e-9 {
            r.fail(format!("det identity relative error {worst_det:.3e}"));
        }
        if worst_pt > 1e-10 {
            r.fail(format!(
                "decomposability identity relative error {worst_pt:.3e}"
            ));
        }
        Ok(format!(
            "det identity {worst_det:.2e}, decomposability identity {worst_pt:.2e}"
        ))
    })
}

/// Every check in order.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    vec![
        check_ces_certificates(cfg),
        check_kernel_dimensions(cfg),
        check_s1_span(cfg),
        check_counterexample_kernel(cfg),
        check_witness_validity(cfg),
        check_optimality(cfg),
        check_theorem1(cfg),
        check_theorem2(cfg),
        check_extension_chains(cfg),
        check_structural_identities(cfg),
    ]
}
