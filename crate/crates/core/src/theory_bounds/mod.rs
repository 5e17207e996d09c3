//! Closed-form evaluators for the non-asymptotic bounds of FLA.
//!
//! Every symbol of the standing assumptions lives in [`AssumptionConstants`].
//! Constants that are proven to exist but never made explicit (the global
//! constant of the main bound, the ergodicity pair `(C_erg, λ*)`, the moment
//! constants `c` and `c_b`) are inputs defaulting to 1; unless
//! [`AssumptionConstants::calibrated`] is set, outputs carry `shape_only =
//! true` and only their dependence on `(k, η, β, d)` is meaningful.

mod bounds;
mod plan;
mod weak_error;

use serde::{Deserialize, Serialize};

use crate::objectives::Certificate;
use crate::special::ln_gamma;
use crate::{Error, Result};

pub use bounds::{
    epsilon_schedule, gibbs_suboptimality_bound, hoelder_descent_inequality, sampling_bound, sampling_exponent,
    suboptimality_bound, BoundBreakdown, EpsilonSchedule, MaxBranch, SamplingBound,
    SamplingBranch,
};
pub use plan::{check_plan, feasible_q_interval, plan_exponents, ExponentPlan, PlanViolation, GAMMA_MAX};
pub use weak_error::{
    detailed_weak_error_bound, detailed_weak_error_bound_sg, discrete_moment_bound, function_gap_bound, weak_error_constants,
    x1_x3_bound, DetailedWeakError, InitialMoments, MomentCase, WeakErrorConstants,
};

/// `c_α = Γ(α−1) / Γ(α/2)²`, exactly 1 at `α = 2`.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha > 2.0 {
        return Err(Error::param(format!("alpha must lie in (1, 2], got {alpha}")));
    }
    if alpha <= 1.0 {
        return Err(Error::CAlphaPole(alpha));
    }
    if alpha == 2.0 {
        return Ok(1.0);
    }
    Ok((ln_gamma(alpha - 1.0) - 2.0 * ln_gamma(0.5 * alpha)).exp())
}

fn one() -> f64 {
    1.0
}

/// Symbols of the standing assumptions, with `c_α` already folded into
/// `M`, `m`, `b` and `B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionConstants {
    /// Hölder constant of `c_α ∇f`.
    #[serde(rename = "M")]
    pub big_m: f64,
    /// Hölder exponent.
    pub gamma: f64,
    /// Dissipativity pair.
    pub m: f64,
    pub b: f64,
    /// Bound on `c_α ‖∇f(0)‖`.
    #[serde(rename = "B")]
    pub big_b: f64,
    /// Gap between the exact fractional drift and `−c_α ∇f`; must be `< m`.
    #[serde(rename = "L")]
    pub big_l: f64,
    /// Ergodicity rate.
    #[serde(default = "one")]
    pub lambda_star: f64,
    /// Ergodicity prefactor.
    #[serde(rename = "C_erg", default = "one")]
    pub c_erg: f64,
    /// Bound on the fractional moments of the invariant measure.
    #[serde(rename = "C_pi", default = "one")]
    pub c_pi: f64,
    pub alpha: f64,
    pub beta: f64,
    pub d: usize,
    /// Global constant of the main bound.
    #[serde(rename = "C_thm", default = "one")]
    pub c_thm: f64,
    /// Moment constant of the continuous process.
    #[serde(default = "one")]
    pub c: f64,
    /// Moment constant of the process with the exact fractional drift.
    #[serde(default = "one")]
    pub c_b: f64,
    /// Set when the unexplicit constants above were calibrated rather than
    /// left at their defaults.
    #[serde(default)]
    pub calibrated: bool,
}

impl AssumptionConstants {
    /// Constants of a certified objective at `(α, β)`. The certificate is
    /// scaled by `c_α`; `L` defaults to `m/2` and the unexplicit constants
    /// to 1.
    pub fn from_certificate(cert: &Certificate, alpha: f64, beta: f64, d: usize) -> Result<Self> {
        let s = cert.scaled(alpha)?;
        let c = Self {
            big_m: s.holder,
            gamma: s.gamma,
            m: s.m,
            b: s.b,
            big_b: s.grad_origin,
            big_l: 0.5 * s.m,
            lambda_star: 1.0,
            c_erg: 1.0,
            c_pi: 1.0,
            alpha,
            beta,
            d,
            c_thm: 1.0,
            c: 1.0,
            c_b: 1.0,
            calibrated: false,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn shape_only(&self) -> bool {
        !self.calibrated
    }

    /// `m / M²`, the step-size ceiling of the bounds.
    pub fn eta_max(&self) -> f64 {
        self.m / (self.big_m * self.big_m)
    }

    /// Full invariant check: `0 ≤ γ < 1`, `1 < α ≤ 2`, `0 ≤ L < m`, and all
    /// other constants positive (`b`, `B` may be zero).
    pub fn validate(&self) -> Result<()> {
        self.validate_minimal(false)?;
        if !(self.big_l >= 0.0 && self.big_l < self.m) {
            return Err(Error::param(format!(
                "L must lie in [0, m) = [0, {}), got {}",
                self.m, self.big_l
            )));
        }
        for (name, v) in [
            ("lambda_star", self.lambda_star),
            ("C_erg", self.c_erg),
            ("C_pi", self.c_pi),
            ("C_thm", self.c_thm),
            ("c", self.c),
            ("c_b", self.c_b),
        ] {
            positive(name, v)?;
        }
        Ok(())
    }

    /// Checks only what the closed forms need; `allow_gamma_one` admits the
    /// Lipschitz-gradient case.
    pub(crate) fn validate_minimal(&self, allow_gamma_one: bool) -> Result<()> {
        let gamma_ok = if allow_gamma_one {
            (0.0..=1.0).contains(&self.gamma)
        } else {
            (0.0..1.0).contains(&self.gamma)
        };
        if !gamma_ok {
            return Err(Error::param(format!("gamma out of range: {}", self.gamma)));
        }
        crate::stable_noise::check_alpha(self.alpha)?;
        positive("M", self.big_m)?;
        positive("m", self.m)?;
        positive("beta", self.beta)?;
        non_negative("b", self.b)?;
        non_negative("B", self.big_b)?;
        if self.d == 0 {
            return Err(Error::param("d must be positive"));
        }
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be positive, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be non-negative, got {v}")))
    }
}

fn check_eta(c: &AssumptionConstants, eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::param(format!("eta must be positive, got {eta}")));
    }
    if eta > c.eta_max() {
        return Err(Error::StepSize {
            eta,
            limit: c.eta_max(),
        });
    }
    Ok(())
}

#[cfg(test)]
pub(crate) fn test_constants() -> AssumptionConstants {
    AssumptionConstants {
        big_m: 1.0,
        gamma: 0.3,
        m: 1.0,
        b: 1.0,
        big_b: 0.5,
        big_l: 0.5,
        lambda_star: 1.0,
        c_erg: 1.0,
        c_pi: 1.0,
        alpha: 1.5,
        beta: 1.0,
        d: 1,
        c_thm: 1.0,
        c: 1.0,
        c_b: 1.0,
        calibrated: false,
    }
}
