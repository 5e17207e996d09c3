use rand::Rng;

use super::{Algorithm, NoiseMode, RunConfig};
use crate::objectives::{stochastic_gradient_into, Objective};
use crate::stable_noise::{increment_scale, unit_draw};
use crate::theory_bounds::c_alpha;
use crate::{Error, Result};

/// One algorithm bound to an objective, with reusable buffers.
pub struct Stepper<'a> {
    obj: &'a dyn Objective,
    alpha: f64,
    /// `η c_α` (FLA, SG-FLA) or `η` (ULA).
    drift: f64,
    /// `(η/β)^{1/α}`.
    noise_scale: f64,
    noise: NoiseMode,
    batch_size: Option<usize>,
    grad: Vec<f64>,
    prev: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(obj: &'a dyn Objective, cfg: &RunConfig) -> Result<Self> {
        Self::with_algorithm(obj, cfg, cfg.algorithm)
    }

    pub fn with_algorithm(
        obj: &'a dyn Objective,
        cfg: &RunConfig,
        algorithm: Algorithm,
    ) -> Result<Self> {
        let cfg = RunConfig {
            algorithm,
            batch_size: match algorithm {
                Algorithm::Sgfla => cfg.batch_size,
                _ => None,
            },
            ..cfg.clone()
        };
        cfg.validate()?;
        let batch_size = if algorithm == Algorithm::Sgfla {
            let fs = obj
                .finite_sum()
                .ok_or_else(|| Error::MissingComponents(obj.name().to_string()))?;
            let b = cfg.batch_size.expect("validated");
            if b > fs.n_components() {
                return Err(Error::param(format!(
                    "batch_size {b} exceeds the {} components",
                    fs.n_components()
                )));
            }
            Some(b)
        } else {
            None
        };
        let drift = match algorithm {
            Algorithm::Ula => cfg.eta,
            _ => cfg.eta * c_alpha(cfg.alpha)?,
        };
        Ok(Self {
            obj,
            alpha: cfg.alpha,
            drift,
            noise_scale: increment_scale(cfg.alpha, cfg.eta, cfg.beta),
            noise: cfg.noise,
            batch_size,
            grad: vec![0.0; obj.dim()],
            prev: vec![0.0; obj.dim()],
        })
    }

    /// Scale applied to unit `SαS` draws.
    pub fn noise_scale(&self) -> f64 {
        self.noise_scale
    }

    /// Advances `w` by one update. A non-finite gradient or iterate yields
    /// [`Error::NonFinite`] carrying the state before the update.
    pub fn step<R: Rng + ?Sized>(&mut self, w: &mut [f64], rng: &mut R) -> Result<()> {
        match self.batch_size {
            Some(b) => stochastic_gradient_into(self.obj, w, b, rng, &mut self.grad)?,
            None => self.obj.grad_into(w, &mut self.grad),
        }
        if self.grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite { state: w.to_vec() });
        }
        self.prev.copy_from_slice(w);
        match self.noise {
            NoiseMode::Live => {
                for (x, g) in w.iter_mut().zip(&self.grad) {
                    *x = *x - self.drift * g + self.noise_scale * unit_draw(self.alpha, rng);
                }
            }
            NoiseMode::Suppressed => {
                for (x, g) in w.iter_mut().zip(&self.grad) {
                    *x -= self.drift * g;
                }
            }
        }
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                state: self.prev.clone(),
            });
        }
        Ok(())
    }
}

fn single_step<R: Rng + ?Sized>(
    w: &[f64],
    obj: &dyn Objective,
    cfg: &RunConfig,
    algorithm: Algorithm,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if w.len() != obj.dim() {
        return Err(Error::DimensionMismatch(w.len(), obj.dim()));
    }
    let mut stepper = Stepper::with_algorithm(obj, cfg, algorithm)?;
    let mut next = w.to_vec();
    stepper.step(&mut next, rng)?;
    Ok(next)
}

/// `w − η c_α ∇f(w) + (η/β)^{1/α} ΔL`.
pub fn fla_step<R: Rng + ?Sized>(
    w: &[f64],
    obj: &dyn Objective,
    cfg: &RunConfig,
    rng: &mut R,
) -> Result<Vec<f64>> {
    single_step(w, obj, cfg, Algorithm::Fla, rng)
}

/// `w − η ∇f(w) + √(2η/β) ΔB`; requires `cfg.alpha = 2`.
pub fn ula_step<R: Rng + ?Sized>(
    w: &[f64],
    obj: &dyn Objective,
    cfg: &RunConfig,
    rng: &mut R,
) -> Result<Vec<f64>> {
    single_step(w, obj, cfg, Algorithm::Ula, rng)
}

/// FLA step with the minibatch gradient of `cfg.batch_size` components.
pub fn sgfla_step<R: Rng + ?Sized>(
    w: &[f64],
    obj: &dyn Objective,
    cfg: &RunConfig,
    rng: &mut R,
) -> Result<Vec<f64>> {
    single_step(w, obj, cfg, Algorithm::Sgfla, rng)
}
