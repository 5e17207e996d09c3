//! Empirical measurements of the quantities the bounds control.
//!
//! Means over replicas come with percentile-bootstrap 95% intervals from
//! 1000 resamples; heavy tails make normal-theory intervals unreliable.

mod curves;
mod gibbs;
mod wasserstein;
mod weak_error;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use curves::{non_increasing_after, suboptimality_curve, CurvePoint};
pub use gibbs::{gibbs_reference_1d, GibbsReference1D};
pub use wasserstein::{
    sliced_wasserstein_q, wasserstein_q_1d, wasserstein_q_1d_resampled, WassersteinReport,
};
pub use weak_error::{
    fit_log_log, refinement_doubling, weak_error_study, Coupling, DoublingReport, LogLogFit,
    WeakErrorOptions, WeakErrorRow, WeakErrorTable,
};

pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Samples `x_1..x_N` in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    dim: usize,
    data: Vec<f64>,
    pub label: String,
}

impl EmpiricalDistribution {
    pub fn new(samples: &[Vec<f64>], label: impl Into<String>) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::param("an empirical distribution needs at least one sample"))?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::param("samples must have positive dimension"));
        }
        let mut data = Vec::with_capacity(dim * samples.len());
        for s in samples {
            if s.len() != dim {
                return Err(Error::DimensionMismatch(s.len(), dim));
            }
            data.extend_from_slice(s);
        }
        Self::from_flat(dim, data, label)
    }

    pub fn from_scalars(samples: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::param("an empirical distribution needs at least one sample"));
        }
        Self::from_flat(1, samples, label)
    }

    fn from_flat(dim: usize, data: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite { state: vec![*bad] });
        }
        Ok(Self {
            dim,
            data,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn samples(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Coordinates of a one-dimensional distribution.
    pub fn scalars(&self) -> Option<&[f64]> {
        (self.dim == 1).then_some(&self.data[..])
    }

    fn select(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            data.extend_from_slice(self.sample(i));
        }
        Self {
            dim: self.dim,
            data,
            label: self.label.clone(),
        }
    }

    /// `⟨x_i, u⟩` for every sample.
    fn project(&self, u: &[f64]) -> Vec<f64> {
        self.samples()
            .map(|s| s.iter().zip(u).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Median of block means of `values`, in at most `blocks` contiguous blocks.
pub fn median_of_means(values: &[f64], blocks: usize) -> Result<f64> {
    if values.is_empty() || blocks == 0 {
        return Err(Error::param("median of means needs values and blocks"));
    }
    let blocks = blocks.min(values.len());
    let n = values.len();
    let mut means: Vec<f64> = (0..blocks)
        .map(|b| {
            let (lo, hi) = (b * n / blocks, (b + 1) * n / blocks);
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    Ok(if blocks % 2 == 1 {
        means[blocks / 2]
    } else {
        0.5 * (means[blocks / 2 - 1] + means[blocks / 2])
    })
}

/// Median-of-means (32 blocks) estimate of `E‖X‖^λ`, `0 ≤ λ ≤ 2`.
pub fn fractional_moment(dist: &EmpiricalDistribution, lambda: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&lambda) {
        return Err(Error::param(format!("lambda must lie in [0, 2], got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(1.0);
    }
    let powers: Vec<f64> = dist
        .samples()
        .map(|s| s.iter().map(|v| v * v).sum::<f64>().sqrt().powf(lambda))
        .collect();
    median_of_means(&powers, 32)
}

/// Linear-interpolated quantile of sorted data.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile-bootstrap 95% interval for `stat` over resamples of `0..n`.
pub fn bootstrap_ci<R, F>(n: usize, resamples: usize, rng: &mut R, mut stat: F) -> (f64, f64)
where
    R: Rng + ?Sized,
    F: FnMut(&[usize]) -> f64,
{
    let mut idx = vec![0usize; n];
    let mut values: Vec<f64> = (0..resamples)
        .map(|_| {
            idx.iter_mut().for_each(|i| *i = rng.random_range(0..n));
            stat(&idx)
        })
        .collect();
    values.sort_by(f64::total_cmp);
    (quantile_sorted(&values, 0.025), quantile_sorted(&values, 0.975))
}
