use std::path::{Path, PathBuf};
use std::time::Instant;

use flmc::diagnostics::{
    gibbs_reference_1d, refinement_doubling, suboptimality_curve, wasserstein_q_1d,
    weak_error_study, DoublingReport, EmpiricalDistribution, LogLogFit, WeakErrorOptions,
};
use flmc::dynamics::{run_tolerant, RunConfig, Trajectory};
use flmc::objectives::{check_dissipative, check_gradient_growth, check_holder, Objective};
use flmc::seeding::{replica_seed, splitmix64, stream};
use flmc::stable_noise::{increment_scale, sample_sas, StableParams};
use flmc::theory_bounds::{
    c_alpha, check_plan, feasible_q_interval, plan_exponents, suboptimality_bound,
    AssumptionConstants, BoundBreakdown, ExponentPlan,
};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::config::{ExperimentConfig, Study};
use crate::output::{curve_csv, num, trajectories_csv, weak_error_csv, OutDir};
use crate::CliError;

/// Flags accepted by every command.
#[derive(Debug, Clone, Default)]
pub struct Common {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Stream tags keeping auxiliary draws apart from the replica streams.
const GIBBS_STREAM: u64 = 0x0067_6962_6273;
const VERIFY_STREAM: u64 = 0x7665_7269_6679;

#[derive(Debug, Serialize)]
struct Derived {
    c_alpha: f64,
    /// `(η/β)^{1/α}`, the multiplier of the unit stable draws per step.
    noise_scale: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    plan: Option<ExponentPlan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta_max: Option<f64>,
    local_certificate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    step_size_warning: Option<String>,
}

#[derive(Debug, Serialize)]
struct DivergedReplica {
    replica: usize,
    error: String,
}

/// Everything needed to reproduce a command's outputs bitwise.
#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    schema_version: u32,
    tool_version: &'static str,
    command: &'a str,
    config: &'a ExperimentConfig,
    derived: Derived,
    replica_seeds: Vec<u64>,
    diverged: Vec<DivergedReplica>,
    outputs: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Timing {
    wall_seconds: f64,
    steps: u64,
    steps_per_second: f64,
}

/// Parsed, overridden and validated config plus its objective.
pub struct Prepared {
    pub config: ExperimentConfig,
    pub objective: Box<dyn Objective>,
    pub out: PathBuf,
}

pub fn prepare(path: &Path, common: &Common, expect: &str) -> Result<Prepared, CliError> {
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = common.seed {
        config.run.seed = seed;
    }
    let out = common
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .ok_or_else(|| {
            CliError::Validation(vec!["no output directory: set output_dir or pass --out".into()])
        })?;
    config.output_dir = None;
    let mut violations = config.violations();
    if config.study.kind() != expect {
        violations.push(format!(
            "this command runs `{expect}` studies, the config has `{}`",
            config.study.kind()
        ));
    }
    if !violations.is_empty() {
        return Err(CliError::Validation(violations));
    }
    let objective = config.objective.build()?;
    Ok(Prepared {
        config,
        objective,
        out,
    })
}

fn derived(p: &Prepared, alpha: f64) -> Result<Derived, CliError> {
    let run = &p.config.run;
    let cert = p.objective.certificate();
    let plan = cert.as_ref().and_then(|c| plan_exponents(c.gamma, alpha, 0.5).ok());
    let eta_max = p
        .config
        .assumption_constants(p.objective.as_ref(), alpha)
        .ok()
        .map(|c| c.eta_max());
    Ok(Derived {
        c_alpha: c_alpha(alpha)?,
        noise_scale: increment_scale(alpha, run.eta, run.beta),
        plan,
        eta_max,
        local_certificate: cert.is_some_and(|c| c.is_local()),
        step_size_warning: run.step_size_warning(p.objective.as_ref()),
    })
}

fn seeds(cfg: &RunConfig) -> Vec<u64> {
    (0..cfg.replicas as u64).map(|r| replica_seed(cfg.seed, r)).collect()
}

fn finish(
    mut out: OutDir,
    command: &str,
    p: &Prepared,
    derived: Derived,
    diverged: Vec<DivergedReplica>,
    started: Instant,
    steps: u64,
) -> Result<(), CliError> {
    let wall = started.elapsed().as_secs_f64();
    out.json(
        "timing.json",
        &Timing {
            wall_seconds: wall,
            steps,
            steps_per_second: if wall > 0.0 { steps as f64 / wall } else { 0.0 },
        },
    )?;
    let mut outputs = out.written().to_vec();
    outputs.push("manifest.json".into());
    let manifest = RunManifest {
        schema_version: crate::config::SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        command,
        config: &p.config,
        derived,
        replica_seeds: seeds(&p.config.run),
        diverged,
        outputs,
    };
    out.json("manifest.json", &manifest)
}

/// Runs every replica, keeping survivors in index order. Fails only when
/// none survive.
fn run_replicas(
    obj: &dyn Objective,
    cfg: &RunConfig,
) -> Result<(Vec<Trajectory>, Vec<DivergedReplica>), CliError> {
    let mut ok = Vec::with_capacity(cfg.replicas);
    let mut bad = Vec::new();
    let mut last = None;
    for (replica, r) in run_tolerant(obj, cfg).into_iter().enumerate() {
        match r {
            Ok(t) => ok.push(t),
            Err(e @ flmc::Error::Divergence { .. }) => {
                eprintln!("warning: {e}");
                bad.push(DivergedReplica {
                    replica,
                    error: e.to_string(),
                });
                last = Some(e);
            }
            Err(e) => return Err(e.into()),
        }
    }
    match last {
        Some(e) if ok.is_empty() => Err(e.into()),
        _ => Ok((ok, bad)),
    }
}

#[derive(Debug, Serialize)]
struct OptimizeSummary {
    replicas: usize,
    survived: usize,
    final_mean_gap: Option<f64>,
    final_ci: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    /// Fraction of all replicas, diverged ones counted as misses.
    #[serde(skip_serializing_if = "Option::is_none")]
    within_radius: Option<f64>,
}

fn optimize_outputs(
    p: &Prepared,
    out: &mut OutDir,
    trajs: &[Trajectory],
    radius: Option<f64>,
) -> Result<(), CliError> {
    let obj = p.objective.as_ref();
    out.text("trajectories.csv", &trajectories_csv(trajs, obj.dim()))?;
    let curve = match obj.minimizer() {
        Some(_) => Some(suboptimality_curve(trajs, obj)?),
        None => None,
    };
    if let Some(c) = &curve {
        out.text("suboptimality.csv", &curve_csv(c))?;
    }
    let last = curve.as_ref().and_then(|c| c.last());
    let within_radius = match (radius, obj.minimizer()) {
        (Some(r), Some(m)) => {
            let hits = trajs
                .iter()
                .filter(|t| {
                    let d2: f64 = t
                        .final_state()
                        .iter()
                        .zip(&m.x)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    d2.sqrt() <= r
                })
                .count();
            Some(hits as f64 / p.config.run.replicas as f64)
        }
        _ => None,
    };
    out.json(
        "summary.json",
        &OptimizeSummary {
            replicas: p.config.run.replicas,
            survived: trajs.len(),
            final_mean_gap: last.map(|c| c.mean_gap),
            final_ci: last.map(|c| (c.ci_lo, c.ci_hi)),
            radius,
            within_radius,
        },
    )
}

pub fn optimize(path: &Path, common: &Common) -> Result<(), CliError> {
    let p = prepare(path, common, "optimize")?;
    let started = Instant::now();
    let Study::Optimize { radius } = p.config.study else {
        unreachable!("kind checked in prepare")
    };
    let run = &p.config.run;
    let mut out = OutDir::create(&p.out)?;
    let (trajs, diverged) = run_replicas(p.objective.as_ref(), run)?;
    optimize_outputs(&p, &mut out, &trajs, radius)?;
    let d = derived(&p, run.alpha)?;
    finish(out, "optimize", &p, d, diverged, started, run.k * run.replicas as u64)
}

#[derive(Debug, Serialize)]
struct PosteriorRow {
    step: u64,
    wq: f64,
}

pub fn sample_posterior(path: &Path, common: &Common) -> Result<(), CliError> {
    let p = prepare(path, common, "sample")?;
    let started = Instant::now();
    let Study::Sample { q, grid } = &p.config.study else {
        unreachable!("kind checked in prepare")
    };
    let run = &p.config.run;
    let obj = p.objective.as_ref();
    let mut out = OutDir::create(&p.out)?;
    let (trajs, diverged) = run_replicas(obj, run)?;
    optimize_outputs(&p, &mut out, &trajs, None)?;
    if obj.dim() == 1 {
        let g = gibbs_reference_1d(obj, run.beta, grid.lo, grid.hi, grid.n)?;
        let reference = g.sample(trajs.len(), &mut stream(splitmix64(run.seed ^ GIBBS_STREAM)));
        let reference = EmpiricalDistribution::from_scalars(reference, "gibbs")?;
        let mut rows = Vec::new();
        for (j, step) in trajs[0].steps.iter().enumerate() {
            let xs: Vec<f64> = trajs.iter().map(|t| t.states[j][0]).collect();
            let fla = EmpiricalDistribution::from_scalars(xs, "fla")?;
            rows.push(PosteriorRow {
                step: *step,
                wq: wasserstein_q_1d(&fla, &reference, *q)?,
            });
        }
        let mut csv = String::from("step,wq\n");
        for r in &rows {
            csv.push_str(&format!("{},{}\n", r.step, num(r.wq)));
        }
        out.text("posterior.csv", &csv)?;
    } else {
        eprintln!("note: no Gibbs reference for dim > 1; wrote trajectories only");
    }
    let d = derived(&p, run.alpha)?;
    finish(out, "sample-posterior", &p, d, diverged, started, run.k * run.replicas as u64)
}

#[derive(Debug, Serialize)]
struct WeakErrorSummary {
    k: u64,
    q: f64,
    refinement: usize,
    replicas: usize,
    fit: Option<LogLogFit>,
    decreasing_in_eta: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    doubling: Option<DoublingReport>,
}

pub fn weak_error(path: &Path, common: &Common) -> Result<(), CliError> {
    let p = prepare(path, common, "weak_error")?;
    let started = Instant::now();
    let Study::WeakError {
        etas,
        refinement,
        replicas,
        q,
        coupling,
        bootstrap,
        projections,
        doubling,
    } = &p.config.study
    else {
        unreachable!("kind checked in prepare")
    };
    let run = &p.config.run;
    let obj = p.objective.as_ref();
    let d = derived(&p, run.alpha)?;
    let q = match (q, &d.plan) {
        (Some(q), _) => *q,
        (None, Some(plan)) => plan.q,
        (None, None) => {
            return Err(CliError::Validation(vec![
                "study.q is required when no exponent plan exists for the objective".into(),
            ]))
        }
    };
    let opts = WeakErrorOptions {
        refinement: *refinement,
        replicas: replicas.unwrap_or(run.replicas),
        q,
        coupling: *coupling,
        bootstrap: *bootstrap,
        projections: *projections,
    };
    let table = weak_error_study(obj, run, etas, &opts)?;
    let doubling = if *doubling {
        Some(refinement_doubling(obj, run, &opts)?)
    } else {
        None
    };
    let mut out = OutDir::create(&p.out)?;
    out.text("weak_error.csv", &weak_error_csv(&table.rows))?;
    out.json(
        "weak_error.json",
        &WeakErrorSummary {
            k: table.k,
            q: table.q,
            refinement: table.refinement,
            replicas: opts.replicas,
            fit: table.fit,
            decreasing_in_eta: table.decreasing_in_eta,
            doubling,
        },
    )?;
    let steps = run.k * (opts.refinement as u64 + 1) * opts.replicas as u64 * etas.len() as u64;
    finish(out, "weak-error", &p, d, Vec::new(), started, steps)
}

#[derive(Debug, Serialize)]
struct BoundsReport {
    constants: AssumptionConstants,
    plan: ExponentPlan,
    k: u64,
    eta: f64,
    breakdown: BoundBreakdown,
    shape_only: bool,
}

pub fn bounds(path: &Path, common: &Common) -> Result<(), CliError> {
    let p = prepare(path, common, "bounds")?;
    let started = Instant::now();
    let Study::Bounds { ks, etas, margin } = &p.config.study else {
        unreachable!("kind checked in prepare")
    };
    let run = &p.config.run;
    let c = p
        .config
        .assumption_constants(p.objective.as_ref(), run.alpha)
        .map_err(|e| CliError::Validation(vec![e]))?;
    let plan = plan_exponents(c.gamma, c.alpha, *margin)?;
    let breakdown = suboptimality_bound(&c, &plan, run.k, run.eta)?;
    let mut csv = String::from("k,eta,a1,a2,a3,a4,total\n");
    for &k in ks {
        for &eta in etas {
            let b = suboptimality_bound(&c, &plan, k, eta)?;
            csv.push_str(&format!(
                "{k},{},{},{},{},{},{}\n",
                num(eta),
                num(b.a1),
                num(b.a2),
                num(b.a3),
                num(b.a4),
                num(b.total)
            ));
        }
    }
    let mut out = OutDir::create(&p.out)?;
    out.json(
        "bounds.json",
        &BoundsReport {
            shape_only: c.shape_only(),
            constants: c,
            plan,
            k: run.k,
            eta: run.eta,
            breakdown,
        },
    )?;
    out.text("bounds_sweep.csv", &csv)?;
    let d = derived(&p, run.alpha)?;
    finish(out, "bounds", &p, d, Vec::new(), started, 0)
}

#[derive(Debug, Serialize)]
struct PlanReport {
    feasible: bool,
    gamma: f64,
    alpha: f64,
    margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    q_interval: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plan: Option<ExponentPlan>,
    /// Violated relations of the emitted plan; empty when it is admissible.
    violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

pub fn plan(path: &Path, common: &Common) -> Result<(), CliError> {
    let p = prepare(path, common, "plan")?;
    let started = Instant::now();
    let Study::Plan { gamma, margin } = &p.config.study else {
        unreachable!("kind checked in prepare")
    };
    let alpha = p.config.run.alpha;
    let gamma = match gamma {
        Some(g) => *g,
        None => {
            p.objective
                .certificate()
                .ok_or_else(|| {
                    CliError::Validation(vec!["study.gamma is required: no certificate".into()])
                })?
                .gamma
        }
    };
    let report = match plan_exponents(gamma, alpha, *margin) {
        Ok(plan) => PlanReport {
            feasible: true,
            gamma,
            alpha,
            margin: *margin,
            q_interval: feasible_q_interval(gamma, alpha).ok(),
            violations: check_plan(&plan, gamma, alpha)
                .iter()
                .map(|v| v.to_string())
                .collect(),
            plan: Some(plan),
            reason: None,
        },
        Err(e @ flmc::Error::InfeasiblePlan(_)) => PlanReport {
            feasible: false,
            gamma,
            alpha,
            margin: *margin,
            q_interval: None,
            plan: None,
            violations: Vec::new(),
            reason: Some(e.to_string()),
        },
        Err(e) => return Err(e.into()),
    };
    let mut out = OutDir::create(&p.out)?;
    out.json("plan.json", &report)?;
    let d = derived(&p, alpha)?;
    finish(out, "plan", &p, d, Vec::new(), started, 0)
}

#[derive(Debug, Serialize)]
struct CheckRow {
    alpha: f64,
    check: &'static str,
    passed: bool,
    /// Largest observed ratio or slack, as reported by the checker.
    detail: serde_json::Value,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    objective: String,
    local_certificate: bool,
    region: (f64, f64),
    probes: usize,
    checks: Vec<CheckRow>,
    all_passed: bool,
}

/// Exits with a validation error when any check fails, after writing the
/// report.
pub fn verify(path: &Path, common: &Common) -> Result<(), CliError> {
    let p = prepare(path, common, "verify")?;
    let started = Instant::now();
    let Study::Verify { probes, alphas } = &p.config.study else {
        unreachable!("kind checked in prepare")
    };
    let obj = p.objective.as_ref();
    let raw = obj.certificate().ok_or_else(|| {
        CliError::Validation(vec![format!("objective `{}` has no certificate", obj.name())])
    })?;
    let region = raw.validation_region();
    let alphas = alphas.clone().unwrap_or_else(|| vec![p.config.run.alpha]);
    let mut rng = stream(splitmix64(p.config.run.seed ^ VERIFY_STREAM));
    let mut checks = Vec::new();
    for &alpha in &alphas {
        let c = raw.scaled(alpha)?;
        let h = check_holder(obj, alpha, c.gamma, c.holder, *probes, region, &mut rng)?;
        checks.push(CheckRow { alpha, check: "holder", passed: h.passed, detail: json(&h) });
        let d = check_dissipative(obj, alpha, c.m, c.b, c.gamma, *probes, region, &mut rng)?;
        checks.push(CheckRow { alpha, check: "dissipative", passed: d.passed, detail: json(&d) });
        let g = check_gradient_growth(
            obj,
            alpha,
            c.holder,
            c.grad_origin,
            c.gamma,
            *probes,
            region,
            &mut rng,
        )?;
        checks.push(CheckRow { alpha, check: "gradient_growth", passed: g.passed, detail: json(&g) });
    }
    let all_passed = checks.iter().all(|c| c.passed);
    let mut out = OutDir::create(&p.out)?;
    out.json(
        "verify.json",
        &VerifyReport {
            objective: obj.name().to_string(),
            local_certificate: raw.is_local(),
            region: (region.lo, region.hi),
            probes: *probes,
            checks,
            all_passed,
        },
    )?;
    let d = derived(&p, p.config.run.alpha)?;
    finish(out, "verify", &p, d, Vec::new(), started, 0)?;
    if all_passed {
        Ok(())
    } else {
        Err(CliError::Validation(vec!["certificate checks failed; see verify.json".into()]))
    }
}

fn json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

/// Outcome of the characteristic-function check printed by `sample-stable`.
#[derive(Debug, Serialize)]
pub struct StableCheck {
    pub omega: f64,
    pub empirical: f64,
    pub exact: f64,
}

#[derive(Debug, Serialize)]
struct StableReport {
    schema_version: u32,
    alpha: f64,
    scale: f64,
    n: usize,
    seed: u64,
    tolerance: f64,
    char_fn: Vec<StableCheck>,
    char_fn_pass: Option<bool>,
    /// Kolmogorov–Smirnov distance to `N(0, 2σ²)` at `α = 2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    gaussian_ks: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gaussian_fit_pass: Option<bool>,
}

/// Writes `n` draws of `SαS(scale)`, one per line, and a check report.
pub fn sample_stable(alpha: f64, scale: f64, n: usize, common: &Common) -> Result<(), CliError> {
    let params = StableParams::new(alpha, scale)?;
    let seed = common.seed.unwrap_or(0);
    let out_dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut rng = stream(seed);
    let draws: Vec<f64> = (0..n).map(|_| sample_sas(&params, &mut rng)).collect();
    let mut body = String::with_capacity(n * 24);
    for x in &draws {
        body.push_str(&num(*x));
        body.push('\n');
    }
    let mut out = OutDir::create(&out_dir)?;
    out.text("draws.txt", &body)?;

    // Statistical error of the empirical transform is at most 1/√n.
    let tolerance = (5.0 / (n as f64).sqrt()).max(0.01);
    let char_fn: Vec<StableCheck> = if n == 0 {
        Vec::new()
    } else {
        [0.25, 0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&omega| StableCheck {
                omega,
                empirical: draws.iter().map(|x| (omega * x).cos()).sum::<f64>() / n as f64,
                exact: params.characteristic_function(omega),
            })
            .collect()
    };
    let char_fn_pass =
        (n > 0).then(|| char_fn.iter().all(|c| (c.empirical - c.exact).abs() <= tolerance));
    let (gaussian_ks, gaussian_fit_pass) = if alpha == 2.0 && n > 0 {
        let normal = Normal::new(0.0, scale * 2f64.sqrt()).expect("positive scale");
        let mut sorted = draws.clone();
        sorted.sort_by(f64::total_cmp);
        let nf = n as f64;
        let d = sorted
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let f = normal.cdf(*x);
                (f - i as f64 / nf).abs().max((f - (i + 1) as f64 / nf).abs())
            })
            .fold(0.0, f64::max);
        // 1% critical value of the one-sample statistic.
        (Some(d), Some(d <= 1.63 / nf.sqrt()))
    } else {
        (None, None)
    };

    match char_fn_pass {
        None => eprintln!("no draws; nothing to check"),
        Some(pass) => {
            eprintln!("characteristic function (tolerance {tolerance:.4}):");
            for c in &char_fn {
                eprintln!("  omega {:<5} empirical {:.5} exact {:.5}", c.omega, c.empirical, c.exact);
            }
            eprintln!("characteristic function: {}", if pass { "pass" } else { "FAIL" });
        }
    }
    if let (Some(d), Some(pass)) = (gaussian_ks, gaussian_fit_pass) {
        eprintln!("gaussian fit: KS {d:.5}: {}", if pass { "pass" } else { "FAIL" });
    }
    out.json(
        "sample_stable.json",
        &StableReport {
            schema_version: crate::config::SCHEMA_VERSION,
            alpha,
            scale,
            n,
            seed,
            tolerance,
            char_fn,
            char_fn_pass,
            gaussian_ks,
            gaussian_fit_pass,
        },
    )
}
