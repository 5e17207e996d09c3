//! Empirical weak error between FLA and the fine-step continuous process.

use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{quantile_sorted, sliced_wasserstein_q, EmpiricalDistribution};
use crate::dynamics::{run_with_stream, simulate_coupled, simulate_reference, RunConfig};
use crate::objectives::Objective;
use crate::seeding::{replica_seed, splitmix64, stream, Stream};
use crate::{Error, Result};

/// How the FLA and reference replicas are paired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// Both driven by the same Lévy path, FLA taking the summed increments.
    #[default]
    Shared,
    /// Separate streams; the two empirical laws are independent.
    Independent,
}

fn default_refinement() -> usize {
    8
}

fn default_bootstrap() -> usize {
    super::BOOTSTRAP_RESAMPLES
}

fn default_projections() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakErrorOptions {
    #[serde(default = "default_refinement")]
    pub refinement: usize,
    pub replicas: usize,
    pub q: f64,
    #[serde(default)]
    pub coupling: Coupling,
    /// Bootstrap resamples for the interval; 0 skips it.
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    /// Directions for the sliced distance when `d > 1`.
    #[serde(default = "default_projections")]
    pub projections: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakErrorRow {
    pub eta: f64,
    pub wq: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakErrorTable {
    pub k: u64,
    pub q: f64,
    pub refinement: usize,
    pub coupling: Coupling,
    pub rows: Vec<WeakErrorRow>,
    /// Least-squares fit of `log W_q` on `log η`; absent when some distance
    /// is zero.
    pub fit: Option<LogLogFit>,
    /// Distances strictly decrease as `η` decreases.
    pub decreasing_in_eta: bool,
}

/// Ordinary least squares of `log y` on `log x`.
pub fn fit_log_log(x: &[f64], y: &[f64]) -> Result<LogLogFit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 paired points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::DegenerateFit("log-log fit needs positive values".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae are equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok(LogLogFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Final states of FLA and of the reference at each refinement in `levels`,
/// one row per replica. Replica `r` uses the stream of `replica_seed(seed, r)`.
fn paired_finals(
    obj: &dyn Objective,
    cfg: &RunConfig,
    levels: &[usize],
    replicas: usize,
    coupling: Coupling,
) -> Result<Vec<Vec<Vec<f64>>>> {
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let seed = replica_seed(cfg.seed, r as u64);
            let mut rng = stream(seed);
            match coupling {
                Coupling::Shared => {
                    let mut all = vec![1];
                    all.extend_from_slice(levels);
                    simulate_coupled(obj, cfg, &all, &mut rng)
                }
                Coupling::Independent => {
                    let fla = run_with_stream(obj, cfg, r, seed, &mut rng)?;
                    let mut out = vec![fla.final_state().to_vec()];
                    for (i, &lvl) in levels.iter().enumerate() {
                        let mut rr = stream(splitmix64(seed ^ (i as u64 + 1)));
                        let t = simulate_reference(obj, cfg, lvl, &mut rr)?;
                        out.push(t.final_state().to_vec());
                    }
                    Ok(out)
                }
            }
            .map_err(|e| match e {
                Error::Divergence { step, state, .. } => Error::Divergence {
                    replica: r,
                    step,
                    state,
                },
                other => other,
            })
        })
        .collect()
}

fn distance(
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    q: f64,
    projections: usize,
    seed: u64,
) -> Result<f64> {
    let da = EmpiricalDistribution::new(a, "fla")?;
    let db = EmpiricalDistribution::new(b, "reference")?;
    let mut rng = stream(seed);
    sliced_wasserstein_q(&da, &db, q, projections, &mut rng)
}

/// Distance between column `i` and column `j` of `finals` with a basic
/// bootstrap interval over replicas (rows resampled jointly). Resampling
/// duplicates points, which biases empirical distances upward, so the
/// percentile interval can miss the estimate; the basic interval reflects the
/// resampled quantiles around it instead.
fn distance_with_ci(
    finals: &[Vec<Vec<f64>>],
    i: usize,
    j: usize,
    opts: &WeakErrorOptions,
    seed: u64,
) -> Result<(f64, f64, f64)> {
    let col = |c: usize, idx: &mut dyn Iterator<Item = usize>| -> Vec<Vec<f64>> {
        idx.map(|r| finals[r][c].clone()).collect()
    };
    let n = finals.len();
    let proj_seed = splitmix64(seed ^ 0x736c_6963_6564);
    let value = distance(
        &col(i, &mut (0..n)),
        &col(j, &mut (0..n)),
        opts.q,
        opts.projections,
        proj_seed,
    )?;
    if opts.bootstrap == 0 || n < 2 {
        return Ok((value, value, value));
    }
    let mut stats: Vec<f64> = (0..opts.bootstrap)
        .into_par_iter()
        .map(|b| {
            let mut rng = Stream::seed_from_u64(splitmix64(seed ^ (b as u64).wrapping_mul(0x9E37)));
            let idx: Vec<usize> = (0..n).map(|_| rand::Rng::random_range(&mut rng, 0..n)).collect();
            distance(
                &col(i, &mut idx.iter().copied()),
                &col(j, &mut idx.iter().copied()),
                opts.q,
                opts.projections,
                proj_seed,
            )
        })
        .collect::<Result<_>>()?;
    stats.sort_by(f64::total_cmp);
    let lo = (2.0 * value - quantile_sorted(&stats, 0.975)).max(0.0);
    let hi = 2.0 * value - quantile_sorted(&stats, 0.025);
    Ok((value, lo, hi.max(lo)))
}

fn check_options(opts: &WeakErrorOptions) -> Result<()> {
    if opts.refinement == 0 {
        return Err(Error::param("refinement must be at least 1"));
    }
    if opts.replicas == 0 {
        return Err(Error::param("replicas must be at least 1"));
    }
    if !(opts.q >= 1.0) {
        return Err(Error::param(format!("q must be at least 1, got {}", opts.q)));
    }
    if opts.projections == 0 {
        return Err(Error::param("projections must be at least 1"));
    }
    Ok(())
}

/// For each `η`, `W_q` between FLA at step `k` and the refinement reference
/// at time `kη` (sliced when `d > 1`), then a log-log fit over `η`.
///
/// `base_cfg.k` is held fixed across `η`, and every `η` reuses the same
/// replica streams so differences between rows are not dominated by
/// independent Monte Carlo noise.
pub fn weak_error_study(
    obj: &dyn Objective,
    base_cfg: &RunConfig,
    etas: &[f64],
    opts: &WeakErrorOptions,
) -> Result<WeakErrorTable> {
    base_cfg.validate()?;
    check_options(opts)?;
    if etas.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 step sizes, got {}",
            etas.len()
        )));
    }
    let mut rows = Vec::with_capacity(etas.len());
    for &eta in etas {
        let cfg = RunConfig {
            eta,
            ..base_cfg.clone()
        };
        cfg.validate()?;
        let finals = paired_finals(obj, &cfg, &[opts.refinement], opts.replicas, opts.coupling)?;
        let (wq, ci_lo, ci_hi) = distance_with_ci(&finals, 0, 1, opts, cfg.seed)?;
        rows.push(WeakErrorRow {
            eta,
            wq,
            ci_lo,
            ci_hi,
        });
    }
    let mut by_eta = rows.clone();
    by_eta.sort_by(|a, b| a.eta.total_cmp(&b.eta));
    let decreasing_in_eta = by_eta.windows(2).all(|w| w[0].wq < w[1].wq);
    let xs: Vec<f64> = rows.iter().map(|r| r.eta).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.wq).collect();
    let fit = fit_log_log(&xs, &ys).ok();
    Ok(WeakErrorTable {
        k: base_cfg.k,
        q: opts.q,
        refinement: opts.refinement,
        coupling: opts.coupling,
        rows,
        fit,
        decreasing_in_eta,
    })
}

/// Effect of doubling the reference refinement on the estimated distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublingReport {
    pub refinement: usize,
    pub wq: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub wq_doubled: f64,
    /// `|wq_doubled − wq|` is below the half-width of the interval of `wq`.
    pub sufficient: bool,
}

/// Compares `W_q(FLA, reference at r)` with `W_q(FLA, reference at 2r)`.
/// Under [`Coupling::Shared`] all three schemes share one Lévy path per
/// replica; under [`Coupling::Independent`] each has its own stream.
pub fn refinement_doubling(
    obj: &dyn Objective,
    cfg: &RunConfig,
    opts: &WeakErrorOptions,
) -> Result<DoublingReport> {
    cfg.validate()?;
    check_options(opts)?;
    let r = opts.refinement;
    let finals = paired_finals(obj, cfg, &[r, 2 * r], opts.replicas, opts.coupling)?;
    let (wq, ci_lo, ci_hi) = distance_with_ci(&finals, 0, 1, opts, cfg.seed)?;
    let no_ci = WeakErrorOptions {
        bootstrap: 0,
        ..opts.clone()
    };
    let (wq_doubled, _, _) = distance_with_ci(&finals, 0, 2, &no_ci, cfg.seed)?;
    Ok(DoublingReport {
        refinement: r,
        wq,
        ci_lo,
        ci_hi,
        wq_doubled,
        sufficient: (wq_doubled - wq).abs() < 0.5 * (ci_hi - ci_lo),
    })
}
