//! `cesw`: construct completely entangled subspaces, analyse the product
//! vectors orthogonal to them, and check the witnesses they define.
//!
//! Every randomized quantity derives from `--seed` through ChaCha8 streams,
//! so identical flags give byte-identical JSON.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use cesw::battery::{run_suite, SuiteConfig};
use cesw::families::{extend_ces, footnote_pair, FamilyKind, FamilySpec, DEFAULT_EXTEND_TRIES};
use cesw::rng::{child_seed, random_unit, stream_rng};
use cesw::spanning::{default_samples, span_of_pv};
use cesw::subspace::{is_ces, is_supported, make_subspace, max_ces_dim, SearchBudget, Subspace};
use cesw::witness::{
    block_positivity_min, build_witness, check_necessary_form, verify_optimal, DEFAULT_STARTS,
    SEARCH_NEG,
};
use cesw::{Error, ToleranceConfig};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "cesw", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a family subspace and certify it.
    Construct(Common),
    /// Span of the partially conjugated product vectors and its kernel.
    Span(Common),
    /// Witness from a subspace: NPT flag, block positivity and optimality.
    Witness(Common),
    /// Extend a completely entangled subspace one dimension at a time.
    Extend(ExtendArgs),
    /// Run the full acceptance battery.
    Suite(Common),
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// Family: symmetric, general, counterexample or footnote_pair.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Which footnote member to use: first or complement.
    #[arg(long, default_value = "first")]
    member: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Generic draws for span computations (default 4mn).
    #[arg(long)]
    samples: Option<usize>,
    /// Relative singular-value cutoff for numerical rank.
    #[arg(long)]
    tol_rank: Option<f64>,
    /// Perturbation strengths for the optimality test (repeatable).
    #[arg(long = "eps")]
    eps: Vec<f64>,
    /// Random positive operators on the kernel per strength.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    json: Option<PathBuf>,
    /// Read a subspace JSON instead of building a family.
    #[arg(long = "in")]
    #[serde(skip)]
    input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ExtendArgs {
    #[command(flatten)]
    common: Common,
    /// Stop at this dimension (default: the maximal (m-1)(n-1)).
    #[arg(long)]
    target: Option<usize>,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::ExtensionExhausted { .. } => EXIT_CHECK_FAILED,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

type Outcome = Result<(bool, Value), Failure>;

impl Common {
    fn tol(&self) -> Result<ToleranceConfig, Failure> {
        let mut tol = ToleranceConfig::default();
        if let Some(r) = self.tol_rank {
            tol.rank_rel = r;
        }
        tol.validate()?;
        Ok(tol)
    }

    fn eps_grid(&self) -> Result<Vec<f64>, Failure> {
        if self.eps.is_empty() {
            return Ok(SuiteConfig::default().eps_grid);
        }
        if let Some(bad) = self.eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(Failure::usage(format!("--eps must be positive, got {bad}")));
        }
        Ok(self.eps.clone())
    }

    fn family_spec(&self) -> Result<FamilySpec, Failure> {
        let name = self
            .family
            .as_deref()
            .ok_or_else(|| Failure::usage("either --family or --in is required"))?;
        let kind: FamilyKind = name.parse()?;
        let need = |v: Option<usize>, flag: &str| {
            v.ok_or_else(|| Failure::usage(format!("--{flag} is required for the {name} family")))
        };
        let spec = match kind {
            FamilyKind::Symmetric => FamilySpec::symmetric(need(self.m, "m")?),
            FamilyKind::General => FamilySpec::general(need(self.m, "m")?, need(self.n, "n")?),
            FamilyKind::Counterexample => {
                FamilySpec::counterexample(need(self.m, "m")?, need(self.n, "n")?)
            }
            FamilyKind::FootnotePair => FamilySpec::footnote(),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn subspace(&self, tol: &ToleranceConfig) -> Result<Subspace, Failure> {
        if let Some(path) = &self.input {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            let v: Subspace = serde_json::from_str(&text)
                .map_err(|e| Failure::usage(format!("malformed subspace JSON: {e}")))?;
            v.validate(tol)?;
            return Ok(v);
        }
        let spec = self.family_spec()?;
        if spec.kind == FamilyKind::FootnotePair {
            let (first, second) = footnote_pair(tol)?;
            return match self.member.as_str() {
                "first" => Ok(first),
                "complement" => Ok(second),
                other => Err(Failure::usage(format!(
                    "--member must be first or complement, got {other}"
                ))),
            };
        }
        Ok(spec.build(tol)?)
    }
}

fn cmd_construct(args: &Common) -> Outcome {
    let tol = args.tol()?;
    let v = args.subspace(&tol)?;
    let cert = is_ces(&v, &tol, &SearchBudget::with_seed(args.seed));
    let supported = is_supported(&v, &tol);
    let passed = cert.is_ces && supported;
    Ok((
        passed,
        json!({ "subspace": v, "is_ces": cert, "is_supported": supported }),
    ))
}

fn cmd_span(args: &Common) -> Outcome {
    let tol = args.tol()?;
    let v = args.subspace(&tol)?;
    let samples = args.samples.unwrap_or_else(|| default_samples(v.m, v.n));
    let report = span_of_pv(&v, samples, args.seed, &tol)?;
    let passed = report.kernel_match.unwrap_or(true);
    Ok((
        passed,
        json!({
            "m": v.m,
            "n": v.n,
            "dim": v.dim(),
            "kernel_dim": report.kernel_dim(),
            "spanning": report.span_dim == v.ambient_dim(),
            "report": report,
        }),
    ))
}

fn cmd_witness(args: &Common) -> Outcome {
    let tol = args.tol()?;
    let eps = args.eps_grid()?;
    let v = args.subspace(&tol)?;
    let wp = build_witness(&v, &vec![1.0; v.dim()])?;
    let best = block_positivity_min(&wp.w, v.m, v.n, DEFAULT_STARTS, child_seed(args.seed, 1));
    let npt = wp.is_npt(tol.neg_tol);
    let necessary = check_necessary_form(&wp, &tol, &SearchBudget::with_seed(args.seed));
    let report = verify_optimal(&wp, &eps, args.trials, child_seed(args.seed, 2), &tol)?;
    let block_positive = best.value >= -SEARCH_NEG;
    let passed = npt && block_positive && necessary && report.all_negative;
    Ok((
        passed,
        json!({
            "witness": wp,
            "npt": npt,
            "block_positivity_min": best.value,
            "block_positive": block_positive,
            "necessary_form": necessary,
            "optimality": report,
        }),
    ))
}

fn cmd_extend(args: &ExtendArgs) -> Outcome {
    let common = &args.common;
    let tol = common.tol()?;
    let mut v = if common.input.is_some() || common.family.is_some() {
        common.subspace(&tol)?
    } else {
        let (m, n) = match (common.m, common.n) {
            (Some(m), Some(n)) => (m, n),
            _ => {
                return Err(Failure::usage(
                    "--m and --n are required without --in or --family",
                ))
            }
        };
        if m < 2 || n < 2 {
            return Err(Failure::usage("local dimensions must be at least 2"));
        }
        let mut rng = stream_rng(common.seed, 0);
        make_subspace(m, n, &[random_unit(&mut rng, m * n)], &tol)?
    };
    let max = max_ces_dim(v.m, v.n);
    let target = args.target.unwrap_or(max);
    if target > max {
        return Err(Failure::usage(format!(
            "target {target} exceeds the maximal CES dimension {max}"
        )));
    }
    let budget = SearchBudget::with_seed(common.seed);
    let mut rng = stream_rng(common.seed, 1);
    let mut steps = Vec::new();
    while v.dim() < target {
        let ext = extend_ces(&v, &mut rng, &tol, &budget, DEFAULT_EXTEND_TRIES)?;
        steps.push(json!({
            "dim": ext.subspace.dim(),
            "tries": ext.tries,
            "certificate": ext.certificate,
        }));
        v = ext.subspace;
    }
    let note = steps
        .is_empty()
        .then(|| format!("input already has dimension {} >= target {target}", v.dim()));
    Ok((
        true,
        json!({ "target": target, "max_ces_dim": max, "steps": steps, "subspace": v, "note": note }),
    ))
}

fn cmd_suite(args: &Common) -> Outcome {
    let cfg = SuiteConfig {
        seed: args.seed,
        tol: args.tol()?,
        samples: args.samples,
        eps_grid: args.eps_grid()?,
    };
    let results = run_suite(&cfg);
    for r in &results {
        eprintln!("{}", r.line());
    }
    let passed = results.iter().all(|r| r.passed);
    Ok((passed, json!({ "checks": results })))
}

fn write_report(path: Option<&Path>, report: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report).expect("reports are valid JSON values");
    match path {
        Some(p) => std::fs::write(p, text + "\n")
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (name, common, outcome) = match &cli.command {
        Command::Construct(a) => ("construct", a, cmd_construct(a)),
        Command::Span(a) => ("span", a, cmd_span(a)),
        Command::Witness(a) => ("witness", a, cmd_witness(a)),
        Command::Extend(a) => ("extend", &a.common, cmd_extend(a)),
        Command::Suite(a) => ("suite", a, cmd_suite(a)),
    };
    let (passed, payload) = match outcome {
        Ok(ok) => ok,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let config = match &cli.command {
        Command::Extend(a) => serde_json::to_value(a),
        _ => serde_json::to_value(common),
    }
    .expect("configs serialize");
    let report = json!({
        "command": name,
        "config": config,
        "version": env!("CARGO_PKG_VERSION"),
        "passed": passed,
        "result": payload,
    });
    if let Err(f) = write_report(common.json.as_deref(), &report) {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    eprintln!(
        "{name}: {} in {:.2}s",
        if passed { "passed" } else { "FAILED" },
        start.elapsed().as_secs_f64()
    );
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}
