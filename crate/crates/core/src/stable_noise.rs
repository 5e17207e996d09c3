//! Symmetric alpha-stable (SαS) random variables and Lévy-motion increments.
//!
//! Convention: `SαS(σ)` has characteristic function `exp(-(σ|ω|)^α)`, so that
//! `SαS(σ) = N(0, 2σ²)` at `α = 2` and the Lévy increment over a span `t` is
//! `SαS(t^{1/α})`. Draws use the symmetric Chambers–Mallows–Stuck transform;
//! at `α = 2` a Gaussian is drawn directly, which keeps the FLA and ULA
//! recursions on the same random stream.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::special::ln_gamma;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    alpha: f64,
    scale: f64,
}

impl StableParams {
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::param(format!("scale must be positive, got {scale}")));
        }
        Ok(Self { alpha, scale })
    }

    /// Unit-scale law `SαS(1)`.
    pub fn unit(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `E[exp(iωX)]`, real because the law is symmetric.
    pub fn characteristic_function(&self, omega: f64) -> f64 {
        (-(self.scale * omega.abs()).powf(self.alpha)).exp()
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::param(format!("alpha must lie in (1, 2], got {alpha}")))
    }
}

/// One draw from `SαS(1)`. `alpha` is assumed validated.
#[inline]
pub(crate) fn unit_draw<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    if alpha == 2.0 {
        let z: f64 = rng.sample(StandardNormal);
        return SQRT_2 * z;
    }
    // V uniform on (-π/2, π/2), W unit exponential.
    let v = loop {
        let v = PI * (rng.random::<f64>() - 0.5);
        if v > -FRAC_PI_2 {
            break v;
        }
    };
    let w = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break -u.ln();
        }
    };
    let cos_v = v.cos();
    (alpha * v).sin() / cos_v.powf(1.0 / alpha)
        * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
}

/// Draw from `SαS(scale)`.
pub fn sample_sas<R: Rng + ?Sized>(params: &StableParams, rng: &mut R) -> f64 {
    params.scale * unit_draw(params.alpha, rng)
}

/// Multiplier `(dt/β)^{1/α}` applied to unit draws to form a Lévy increment of
/// span `dt` at inverse temperature `β`.
#[inline]
pub fn increment_scale(alpha: f64, dt: f64, beta: f64) -> f64 {
    let ratio = dt / beta;
    if alpha == 2.0 {
        ratio.sqrt()
    } else {
        ratio.powf(1.0 / alpha)
    }
}

/// `dim` independent coordinates, each distributed as `(dt/β)^{1/α} SαS(1)`.
pub fn sample_levy_increment<R: Rng + ?Sized>(
    alpha: f64,
    dt: f64,
    beta: f64,
    dim: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    if !(dt > 0.0) {
        return Err(Error::param(format!("dt must be positive, got {dt}")));
    }
    if !(beta > 0.0) {
        return Err(Error::param(format!("beta must be positive, got {beta}")));
    }
    if dim == 0 {
        return Err(Error::param("dimension must be positive"));
    }
    let scale = increment_scale(alpha, dt, beta);
    Ok((0..dim).map(|_| scale * unit_draw(alpha, rng)).collect())
}

/// `E|X|^λ` for `X ~ SαS(1)`:
/// `2^λ Γ((1+λ)/2) Γ(1-λ/α) / (Γ(1/2) Γ(1-λ/2))`, valid for `-1 < λ < α`.
///
/// `α = 2` is accepted and gives the Gaussian `N(0, 2)` moments.
pub fn sas_abs_moment(alpha: f64, lambda: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(lambda > -1.0) {
        return Err(Error::param(format!("lambda must exceed -1, got {lambda}")));
    }
    if lambda >= alpha {
        return Err(Error::MomentDivergence { alpha, lambda });
    }
    if lambda == 0.0 {
        return Ok(1.0);
    }
    let log = lambda * std::f64::consts::LN_2 + ln_gamma(0.5 * (1.0 + lambda))
        + ln_gamma(1.0 - lambda / alpha)
        - ln_gamma(0.5)
        - ln_gamma(1.0 - 0.5 * lambda);
    Ok(log.exp())
}

/// Upper bound on `l_{α,λ,d} = E‖L^α(1)‖^λ` for a `d`-dimensional motion with
/// independent coordinates: `d · E|X|^λ` when `λ ≤ 1`, `d^λ · E|X|^λ` when
/// `1 < λ < α`.
pub fn levy_norm_moment_bound(alpha: f64, lambda: f64, d: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if !(lambda >= 0.0) {
        return Err(Error::param(format!("lambda must be non-negative, got {lambda}")));
    }
    if d == 0 {
        return Err(Error::param("dimension must be positive"));
    }
    let scalar = sas_abs_moment(alpha, lambda)?;
    let d = d as f64;
    Ok(if lambda <= 1.0 {
        d * scalar
    } else {
        d.powf(lambda) * scalar
    })
}
