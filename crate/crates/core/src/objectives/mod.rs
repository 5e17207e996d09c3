//! Differentiable objectives with certified assumption constants.
//!
//! An [`Objective`] exposes `f`, `∇f`, an optional finite-sum decomposition
//! `f = (1/n) Σ f_i` and, for the shipped benchmarks, a [`Certificate`]
//! holding `(M, γ, m, b, B)` such that, with `c_α` the drift constant,
//!
//! ```text
//! c_α ‖∇f(x) − ∇f(y)‖ ≤ M ‖x − y‖^γ
//! c_α ⟨x, ∇f(x)⟩      ≥ m ‖x‖^{1+γ} − b
//! c_α ‖∇f(0)‖         ≤ B
//! ```
//!
//! Certificates are stored for `c_α = 1`; [`Certificate::scaled`] multiplies
//! them by `c_α` for a given `α`.

mod benchmarks;
mod checks;
mod simple;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::theory_bounds::c_alpha;
use crate::{Error, Result};

pub use benchmarks::{
    make_benchmark, BenchmarkParams, DoubleWell1d, FiniteSumWell, FractionalPowerWell,
    PerturbedFractional, BENCHMARK_NAMES,
};
pub use checks::{
    check_dissipative, check_gradient_growth, check_holder, DissipativityReport, GrowthReport,
    HolderReport, Region,
};
pub use simple::{Constant, Linear, Quadratic};

/// Known global minimizer `x*` and value `f* = f(x*)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimizer {
    pub x: Vec<f64>,
    pub f: f64,
}

/// Assumption constants of an objective at `c_α = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Hölder constant of the gradient.
    #[serde(rename = "M")]
    pub holder: f64,
    pub gamma: f64,
    pub m: f64,
    pub b: f64,
    /// Bound on the gradient norm at the origin.
    #[serde(rename = "B")]
    pub grad_origin: f64,
    /// `Some((lo, hi))` when the constants only hold on `[lo, hi]^d`.
    pub local_box: Option<(f64, f64)>,
}

impl Certificate {
    /// Constants multiplied by `c_α`.
    pub fn scaled(&self, alpha: f64) -> Result<Certificate> {
        let c = c_alpha(alpha)?;
        Ok(Certificate {
            holder: c * self.holder,
            m: c * self.m,
            b: c * self.b,
            grad_origin: c * self.grad_origin,
            ..*self
        })
    }

    pub fn is_local(&self) -> bool {
        self.local_box.is_some()
    }

    /// Region on which the certificate is validated: its own box when local,
    /// `[-10, 10]^d` otherwise.
    pub fn validation_region(&self) -> Region {
        match self.local_box {
            Some((lo, hi)) => Region { lo, hi },
            None => Region { lo: -10.0, hi: 10.0 },
        }
    }
}

/// Per-datum decomposition `f = (1/n) Σ_i f_i`.
pub trait FiniteSum: Send + Sync {
    fn n_components(&self) -> usize;
    fn component_value(&self, i: usize, x: &[f64]) -> f64;
    /// Writes `∇f_i(x)` into `out`.
    fn component_grad_into(&self, i: usize, x: &[f64], out: &mut [f64]);

    /// Average of the component gradients over `indices`, summed in the given
    /// order. Implementations of [`Objective::grad_into`] for finite sums call
    /// this with `0..n`, which makes the full-batch stochastic gradient equal
    /// to the exact gradient bit for bit.
    fn batch_grad_into(&self, indices: &[usize], x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let mut scratch = vec![0.0; out.len()];
        for &i in indices {
            self.component_grad_into(i, x, &mut scratch);
            for (o, s) in out.iter_mut().zip(&scratch) {
                *o += s;
            }
        }
        let n = indices.len() as f64;
        out.iter_mut().for_each(|o| *o /= n);
    }
}

pub trait Objective: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn grad_into(&self, x: &[f64], out: &mut [f64]);

    fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.grad_into(x, &mut g);
        g
    }

    fn finite_sum(&self) -> Option<&dyn FiniteSum> {
        None
    }

    fn certificate(&self) -> Option<Certificate> {
        None
    }

    fn minimizer(&self) -> Option<&Minimizer> {
        None
    }
}

/// Minibatch gradient `(1/n_s) Σ_{i∈Ω} ∇f_i(x)` with `Ω` drawn uniformly
/// without replacement. A full batch draws nothing from `rng` and returns
/// exactly `∇f(x)`.
pub fn stochastic_gradient<R: Rng + ?Sized>(
    obj: &dyn Objective,
    x: &[f64],
    batch_size: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; obj.dim()];
    stochastic_gradient_into(obj, x, batch_size, rng, &mut out)?;
    Ok(out)
}

pub(crate) fn stochastic_gradient_into<R: Rng + ?Sized>(
    obj: &dyn Objective,
    x: &[f64],
    batch_size: usize,
    rng: &mut R,
    out: &mut [f64],
) -> Result<()> {
    let fs = obj
        .finite_sum()
        .ok_or_else(|| Error::MissingComponents(obj.name().to_string()))?;
    let n = fs.n_components();
    if batch_size == 0 || batch_size > n {
        return Err(Error::param(format!(
            "batch size must lie in [1, {n}], got {batch_size}"
        )));
    }
    if x.len() != obj.dim() {
        return Err(Error::DimensionMismatch(x.len(), obj.dim()));
    }
    if batch_size == n {
        obj.grad_into(x, out);
    } else {
        let idx = rand::seq::index::sample(rng, n, batch_size).into_vec();
        fs.batch_grad_into(&idx, x, out);
    }
    Ok(())
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
