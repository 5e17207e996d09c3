//! FLA, tempered ULA and stochastic-gradient FLA, the replica driver, and
//! fine-step simulation of the continuous-time process.
//!
//! FLA: `W ← W − η c_α ∇f(W) + (η/β)^{1/α} ΔL`, with `ΔL` a vector of
//! independent `SαS(1)` coordinates.
//! ULA: `W ← W − η ∇f(W) + √(2η/β) ΔB`.
//!
//! Each update consumes the stream in a fixed order: minibatch indices (SG-FLA
//! only), then one noise draw per coordinate. Because `c_2 = 1` and the `α = 2`
//! noise is `√(η/β) · √2 z`, FLA at `α = 2` and ULA perform the same floating
//! point operations and produce identical iterates from identical streams.

mod reference;
mod step;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::objectives::Objective;
use crate::seeding::{replica_seed, stream, Stream};
use crate::{Error, Result};

pub use reference::{simulate_coupled, simulate_reference};
pub use step::{fla_step, sgfla_step, ula_step, Stepper};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Fla,
    Ula,
    Sgfla,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitSpec {
    #[default]
    Origin,
    Point { x: Vec<f64> },
    /// `N(0, radius² I)`, drawn first from each replica's stream.
    GaussianSphere { radius: f64 },
}

impl InitSpec {
    pub fn draw<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Result<Vec<f64>> {
        match self {
            InitSpec::Origin => Ok(vec![0.0; dim]),
            InitSpec::Point { x } => {
                if x.len() != dim {
                    return Err(Error::DimensionMismatch(x.len(), dim));
                }
                Ok(x.clone())
            }
            InitSpec::GaussianSphere { radius } => Ok((0..dim)
                .map(|_| radius * rng.sample::<f64, _>(StandardNormal))
                .collect()),
        }
    }
}

/// `Suppressed` drops the noise term and draws nothing, leaving the
/// deterministic drift step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    #[default]
    Live,
    Suppressed,
}

fn one_u64() -> u64 {
    1
}

fn one_usize() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub k: u64,
    #[serde(default)]
    pub init: InitSpec,
    pub seed: u64,
    #[serde(default = "one_usize")]
    pub replicas: usize,
    pub algorithm: Algorithm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    #[serde(default = "one_u64")]
    pub record_every: u64,
    #[serde(default)]
    pub noise: NoiseMode,
}

impl RunConfig {
    /// FLA run with one replica, recording every step from the origin.
    pub fn fla(alpha: f64, beta: f64, eta: f64, k: u64, seed: u64) -> Self {
        Self {
            alpha,
            beta,
            eta,
            k,
            init: InitSpec::Origin,
            seed,
            replicas: 1,
            algorithm: Algorithm::Fla,
            batch_size: None,
            record_every: 1,
            noise: NoiseMode::Live,
        }
    }

    /// Every violated constraint, one message each.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            out.push(format!("alpha must lie in (1, 2], got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            out.push(format!("beta must be positive, got {}", self.beta));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            out.push(format!("eta must be positive, got {}", self.eta));
        }
        if self.replicas == 0 {
            out.push("replicas must be at least 1".into());
        }
        if self.record_every == 0 {
            out.push("record_every must be at least 1".into());
        }
        if self.algorithm == Algorithm::Ula && self.alpha != 2.0 {
            out.push(format!("algorithm ula requires alpha = 2, got {}", self.alpha));
        }
        match (self.algorithm, self.batch_size) {
            (Algorithm::Sgfla, None) => out.push("algorithm sgfla requires batch_size".into()),
            (Algorithm::Sgfla, Some(0)) => out.push("batch_size must be at least 1".into()),
            (Algorithm::Fla | Algorithm::Ula, Some(_)) => {
                out.push("batch_size is only meaningful for sgfla".into())
            }
            _ => {}
        }
        if let InitSpec::GaussianSphere { radius } = self.init {
            if !(radius >= 0.0 && radius.is_finite()) {
                out.push(format!("init radius must be non-negative, got {radius}"));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::param(v.join("; ")))
        }
    }

    /// Warning when `η ≥ m/M²` for the objective's certificate at this `α`.
    pub fn step_size_warning(&self, obj: &dyn Objective) -> Option<String> {
        let cert = obj.certificate()?.scaled(self.alpha).ok()?;
        let limit = cert.m / (cert.holder * cert.holder);
        (self.eta >= limit).then(|| {
            format!(
                "eta = {} is not below m/M^2 = {limit:.6e} for `{}`; the bounds do not cover this run",
                self.eta,
                obj.name()
            )
        })
    }

    /// Steps recorded by [`run`]: multiples of `record_every`, plus `k`.
    pub fn recorded_steps(&self) -> Vec<u64> {
        let mut steps: Vec<u64> = (0..=self.k).step_by(self.record_every as usize).collect();
        if *steps.last().unwrap() != self.k {
            steps.push(self.k);
        }
        steps
    }
}

/// Recorded states of one replica.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub replica: usize,
    pub seed: u64,
    pub steps: Vec<u64>,
    /// `steps[j] · η`.
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// `f(states[j])`.
    pub f_values: Vec<f64>,
}

impl Trajectory {
    fn new(replica: usize, seed: u64, capacity: usize) -> Self {
        Self {
            replica,
            seed,
            steps: Vec::with_capacity(capacity),
            times: Vec::with_capacity(capacity),
            states: Vec::with_capacity(capacity),
            f_values: Vec::with_capacity(capacity),
        }
    }

    fn record(&mut self, step: u64, eta: f64, state: &[f64], obj: &dyn Objective) {
        self.steps.push(step);
        self.times.push(step as f64 * eta);
        self.states.push(state.to_vec());
        self.f_values.push(obj.value(state));
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory records the initial state")
    }
}

/// Runs replica `replica` of `cfg` on its own stream.
pub fn run_replica(obj: &dyn Objective, cfg: &RunConfig, replica: usize) -> Result<Trajectory> {
    let seed = replica_seed(cfg.seed, replica as u64);
    let mut rng = stream(seed);
    run_with_stream(obj, cfg, replica, seed, &mut rng)
}

pub(crate) fn run_with_stream(
    obj: &dyn Objective,
    cfg: &RunConfig,
    replica: usize,
    seed: u64,
    rng: &mut Stream,
) -> Result<Trajectory> {
    cfg.validate()?;
    let mut stepper = Stepper::new(obj, cfg)?;
    let mut w = cfg.init.draw(obj.dim(), rng)?;
    let steps = cfg.recorded_steps();
    let mut traj = Trajectory::new(replica, seed, steps.len());
    traj.record(0, cfg.eta, &w, obj);
    let mut next = steps.iter().skip(1).peekable();
    for j in 1..=cfg.k {
        stepper.step(&mut w, rng).map_err(|e| match e {
            Error::NonFinite { state } => Error::Divergence {
                replica,
                step: j as usize,
                state,
            },
            other => other,
        })?;
        if next.peek() == Some(&&j) {
            next.next();
            traj.record(j, cfg.eta, &w, obj);
        }
    }
    Ok(traj)
}

/// All replicas, each a separate `Result`, in replica order.
pub fn run_tolerant(obj: &dyn Objective, cfg: &RunConfig) -> Vec<Result<Trajectory>> {
    (0..cfg.replicas)
        .into_par_iter()
        .map(|r| run_replica(obj, cfg, r))
        .collect()
}

/// All replicas in replica order; the first failing replica's error is
/// returned.
pub fn run(obj: &dyn Objective, cfg: &RunConfig) -> Result<Vec<Trajectory>> {
    cfg.validate()?;
    run_tolerant(obj, cfg).into_iter().collect()
}

/// Per replica, the first step `j ≥ 1` with `‖W^j − target‖ ≤ radius`, or
/// `None` if no such step occurs within `cfg.k`. Streams match [`run`]; a
/// replica that diverges first yields its own error, as in [`run_tolerant`].
pub fn first_passage(
    obj: &dyn Objective,
    cfg: &RunConfig,
    target: &[f64],
    radius: f64,
) -> Result<Vec<Result<Option<u64>>>> {
    cfg.validate()?;
    if target.len() != obj.dim() {
        return Err(Error::DimensionMismatch(target.len(), obj.dim()));
    }
    Ok((0..cfg.replicas)
        .into_par_iter()
        .map(|replica| {
            let mut rng = stream(replica_seed(cfg.seed, replica as u64));
            let mut stepper = Stepper::new(obj, cfg)?;
            let mut w = cfg.init.draw(obj.dim(), &mut rng)?;
            for j in 1..=cfg.k {
                stepper.step(&mut w, &mut rng).map_err(|e| match e {
                    Error::NonFinite { state } => Error::Divergence {
                        replica,
                        step: j as usize,
                        state,
                    },
                    other => other,
                })?;
                let d2: f64 = w.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum();
                if d2.sqrt() <= radius {
                    return Ok(Some(j));
                }
            }
            Ok(None)
        })
        .collect())
}
