//! Exponent tuples `(p, q, p₁, q₁)` for the Hölder splittings in the bounds.
//!
//! Required: `1/p + 1/q = 1/p₁ + 1/q₁ = 1`, `q < α`, `γp < 1`, `γq₁ < 1`,
//! `(q−1)p₁ < 1`. With `p = q₁` and `p₁ = q` these reduce to
//! `1/(1−γ) < q < min(φ, α)`, `φ` the golden ratio, which is non-empty
//! (ignoring `α`) iff `γ < (3−√5)/2`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `(3 − √5) / 2 ≈ 0.381966`.
pub const GAMMA_MAX: f64 = 0.381_966_011_250_105_1;

const PHI: f64 = 1.618_033_988_749_895;

const CONJUGACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPlan {
    pub p: f64,
    pub q: f64,
    pub p1: f64,
    pub q1: f64,
}

impl ExponentPlan {
    /// Plan with `p = q₁ = q/(q−1)` and `p₁ = q`.
    pub fn from_q(q: f64) -> Self {
        let p = q / (q - 1.0);
        Self { p, q, p1: q, q1: p }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PlanViolation {
    NonPositive,
    ConjugatePQ,
    ConjugateP1Q1,
    QBelowAlpha,
    GammaP,
    GammaQ1,
    QMinusOneP1,
}

impl std::fmt::Display for PlanViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PlanViolation::NonPositive => "all exponents > 0",
            PlanViolation::ConjugatePQ => "1/p + 1/q = 1",
            PlanViolation::ConjugateP1Q1 => "1/p1 + 1/q1 = 1",
            PlanViolation::QBelowAlpha => "q < alpha",
            PlanViolation::GammaP => "gamma * p < 1",
            PlanViolation::GammaQ1 => "gamma * q1 < 1",
            PlanViolation::QMinusOneP1 => "(q - 1) * p1 < 1",
        })
    }
}

/// Violated relations of `plan`; empty means the plan is admissible.
pub fn check_plan(plan: &ExponentPlan, gamma: f64, alpha: f64) -> Vec<PlanViolation> {
    let ExponentPlan { p, q, p1, q1 } = *plan;
    let mut out = Vec::new();
    if !(p > 0.0 && q > 0.0 && p1 > 0.0 && q1 > 0.0) {
        out.push(PlanViolation::NonPositive);
    }
    if (1.0 / p + 1.0 / q - 1.0).abs() > CONJUGACY_TOL {
        out.push(PlanViolation::ConjugatePQ);
    }
    if (1.0 / p1 + 1.0 / q1 - 1.0).abs() > CONJUGACY_TOL {
        out.push(PlanViolation::ConjugateP1Q1);
    }
    if !(q < alpha) {
        out.push(PlanViolation::QBelowAlpha);
    }
    if !(gamma * p < 1.0) {
        out.push(PlanViolation::GammaP);
    }
    if !(gamma * q1 < 1.0) {
        out.push(PlanViolation::GammaQ1);
    }
    if !((q - 1.0) * p1 < 1.0) {
        out.push(PlanViolation::QMinusOneP1);
    }
    out
}

/// Open interval of admissible `q` under `p = q₁`, `p₁ = q`, or the reason
/// it is empty.
pub fn feasible_q_interval(gamma: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::param(format!("gamma must lie in [0, 1), got {gamma}")));
    }
    crate::stable_noise::check_alpha(alpha)?;
    let lo = 1.0 / (1.0 - gamma);
    if gamma >= GAMMA_MAX || lo >= PHI {
        return Err(Error::InfeasiblePlan(format!(
            "gamma = {gamma} is not below (3 - sqrt 5)/2 = {GAMMA_MAX:.6}"
        )));
    }
    if lo >= alpha {
        return Err(Error::InfeasiblePlan(format!(
            "q must exceed 1/(1 - gamma) = {lo:.6} but stay below alpha = {alpha}"
        )));
    }
    Ok((lo, PHI.min(alpha)))
}

/// Plan with `q = lo + margin (hi − lo)` inside [`feasible_q_interval`].
pub fn plan_exponents(gamma: f64, alpha: f64, margin: f64) -> Result<ExponentPlan> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::param(format!("margin must lie in (0, 1), got {margin}")));
    }
    let (lo, hi) = feasible_q_interval(gamma, alpha)?;
    let plan = ExponentPlan::from_q(lo + margin * (hi - lo));
    let violations = check_plan(&plan, gamma, alpha);
    if violations.is_empty() {
        Ok(plan)
    } else {
        // Only reachable when the interval is narrower than rounding.
        Err(Error::InfeasiblePlan(format!(
            "interval ({lo}, {hi}) too narrow: violates {violations:?}"
        )))
    }
}
