//! Fine-step Euler simulation of the continuous process
//! `dX = −c_α ∇f(X) dt + β^{−1/α} dL`, observed on the coarse grid `jη`.

use rand::Rng;

use super::{Algorithm, RunConfig, Stepper, Trajectory};
use crate::objectives::Objective;
use crate::stable_noise::{increment_scale, unit_draw};
use crate::theory_bounds::c_alpha;
use crate::{Error, Result};

fn check_refinement(r: usize) -> Result<()> {
    if r == 0 {
        Err(Error::param("refinement must be at least 1"))
    } else {
        Ok(())
    }
}

/// Euler scheme with step `η / refinement` over the horizon `kη`, reporting
/// the coarse steps of [`RunConfig::recorded_steps`]. Independent of any FLA
/// run except through `rng`; with `refinement = 1` it is FLA itself.
pub fn simulate_reference<R: Rng + ?Sized>(
    obj: &dyn Objective,
    cfg: &RunConfig,
    refinement: usize,
    rng: &mut R,
) -> Result<Trajectory> {
    cfg.validate()?;
    check_refinement(refinement)?;
    let fine = RunConfig {
        eta: cfg.eta / refinement as f64,
        ..cfg.clone()
    };
    let mut stepper = Stepper::with_algorithm(obj, &fine, Algorithm::Fla)?;
    let mut w = cfg.init.draw(obj.dim(), rng)?;
    let steps = cfg.recorded_steps();
    let mut traj = Trajectory::new(0, cfg.seed, steps.len());
    traj.record(0, cfg.eta, &w, obj);
    let mut next = steps.iter().skip(1).peekable();
    for j in 1..=cfg.k {
        for _ in 0..refinement {
            stepper.step(&mut w, rng).map_err(|e| match e {
                Error::NonFinite { state } => Error::Divergence {
                    replica: 0,
                    step: j as usize,
                    state,
                },
                other => other,
            })?;
        }
        if next.peek() == Some(&&j) {
            next.next();
            traj.record(j, cfg.eta, &w, obj);
        }
    }
    Ok(traj)
}

/// States at time `kη` of Euler schemes at several refinements, all driven by
/// one Lévy path.
///
/// Each coarse step draws `r_max · d` increments over spans `η / r_max`, where
/// `r_max` is the largest refinement; a scheme at refinement `r` uses sums of
/// consecutive groups of `r_max / r` of them. Refinement 1 is FLA, whose noise
/// is then the sum of all `r_max` increments: exactly `(η/β)^{1/α} SαS(1)` in
/// law. Every refinement must divide `r_max`. The initial state is drawn
/// once and shared.
pub fn simulate_coupled<R: Rng + ?Sized>(
    obj: &dyn Objective,
    cfg: &RunConfig,
    refinements: &[usize],
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let r_max = *refinements
        .iter()
        .max()
        .ok_or_else(|| Error::param("at least one refinement is required"))?;
    for &r in refinements {
        check_refinement(r)?;
        if r_max % r != 0 {
            return Err(Error::param(format!(
                "refinement {r} does not divide the finest refinement {r_max}"
            )));
        }
    }
    let d = obj.dim();
    let ca = c_alpha(cfg.alpha)?;
    let fine_scale = increment_scale(cfg.alpha, cfg.eta / r_max as f64, cfg.beta);
    let w0 = cfg.init.draw(d, rng)?;
    let mut states: Vec<Vec<f64>> = refinements.iter().map(|_| w0.clone()).collect();
    let mut noise = vec![0.0; r_max * d];
    let mut grad = vec![0.0; d];
    let mut inc = vec![0.0; d];
    for j in 1..=cfg.k {
        for n in noise.iter_mut() {
            *n = fine_scale * unit_draw(cfg.alpha, rng);
        }
        for (&r, w) in refinements.iter().zip(states.iter_mut()) {
            let group = r_max / r;
            let drift = cfg.eta / r as f64 * ca;
            for s in 0..r {
                inc.iter_mut().for_each(|v| *v = 0.0);
                for row in noise[s * group * d..(s + 1) * group * d].chunks_exact(d) {
                    for (v, n) in inc.iter_mut().zip(row) {
                        *v += n;
                    }
                }
                obj.grad_into(w, &mut grad);
                for ((x, g), n) in w.iter_mut().zip(&grad).zip(&inc) {
                    *x = *x - drift * g + n;
                }
                if w.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Divergence {
                        replica: 0,
                        step: j as usize,
                        state: w.clone(),
                    });
                }
            }
        }
    }
    Ok(states)
}
