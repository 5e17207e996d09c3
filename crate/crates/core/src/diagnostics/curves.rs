use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bootstrap_ci, BOOTSTRAP_RESAMPLES};
use crate::dynamics::Trajectory;
use crate::objectives::Objective;
use crate::seeding::{splitmix64, stream};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub step: u64,
    pub mean_gap: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Cross-replica mean of `f(W^j) − f*` per recorded step, with bootstrap
/// intervals. The bootstrap stream is derived from the replica seeds, so the
/// curve is a deterministic function of the trajectories.
pub fn suboptimality_curve(trajs: &[Trajectory], obj: &dyn Objective) -> Result<Vec<CurvePoint>> {
    let f_star = obj
        .minimizer()
        .ok_or_else(|| Error::MissingMinimizer(obj.name().to_string()))?
        .f;
    let first = trajs
        .first()
        .ok_or_else(|| Error::param("no trajectories to summarise"))?;
    if trajs.iter().any(|t| t.steps != first.steps) {
        return Err(Error::param("trajectories record different steps"));
    }
    let n = trajs.len();
    let gaps: Vec<Vec<f64>> = (0..first.steps.len())
        .map(|j| trajs.iter().map(|t| t.f_values[j] - f_star).collect())
        .collect();
    let seed = trajs.iter().fold(0u64, |acc, t| splitmix64(acc ^ t.seed));
    Ok(gaps
        .par_iter()
        .enumerate()
        .map(|(j, g)| {
            let mean = g.iter().sum::<f64>() / n as f64;
            let (ci_lo, ci_hi) = if n == 1 {
                (mean, mean)
            } else {
                // Same resampling stream at every step.
                let mut rng = stream(seed);
                bootstrap_ci(n, BOOTSTRAP_RESAMPLES, &mut rng, |idx| {
                    idx.iter().map(|&i| g[i]).sum::<f64>() / n as f64
                })
            };
            CurvePoint {
                step: first.steps[j],
                mean_gap: mean,
                ci_lo,
                ci_hi,
            }
        })
        .collect())
}

/// Whether the curve never rises between consecutive points recorded after
/// the first `burn_in` fraction of the horizon, by more than the wider of the
/// two bootstrap intervals. A single heavy-tailed jump widens the interval of
/// the point it lands on, so that width is part of the tolerance.
pub fn non_increasing_after(curve: &[CurvePoint], burn_in: f64) -> bool {
    let Some(last) = curve.last() else {
        return true;
    };
    let start = burn_in * last.step as f64;
    curve
        .iter()
        .filter(|p| p.step as f64 >= start)
        .collect::<Vec<_>>()
        .windows(2)
        .all(|w| {
            let width = (w[0].ci_hi - w[0].ci_lo).max(w[1].ci_hi - w[1].ci_lo);
            w[1].mean_gap <= w[0].mean_gap + width
        })
}
