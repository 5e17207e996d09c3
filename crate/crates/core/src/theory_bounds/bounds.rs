use serde::{Deserialize, Serialize};

use super::{c_alpha, check_eta, check_plan, AssumptionConstants, ExponentPlan};
use crate::objectives::Objective;
use crate::special::ln_gamma;
use crate::{Error, Result};

/// Which argument attains `max{1/q, γ + γ/q}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxBranch {
    InverseQ,
    GammaTerm,
}

fn max_branch(gamma: f64, q: f64) -> (f64, MaxBranch) {
    let a = 1.0 / q;
    let b = gamma + gamma / q;
    if a >= b {
        (a, MaxBranch::InverseQ)
    } else {
        (b, MaxBranch::GammaTerm)
    }
}

fn require_plan(plan: &ExponentPlan, gamma: f64, alpha: f64) -> Result<()> {
    let v = check_plan(plan, gamma, alpha);
    if v.is_empty() {
        Ok(())
    } else {
        let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        Err(Error::InfeasiblePlan(format!("violates {}", list.join(", "))))
    }
}

/// The four terms of the expected-suboptimality bound at `(k, η)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    /// Discretisation term `C k^{1+max} η^{1/q}`.
    pub a1: f64,
    /// Noise-dependent discretisation term.
    pub a2: f64,
    /// Ergodic term `C β(b + d/β)/m · exp(−λ* kη/β)`.
    pub a3: f64,
    /// Gibbs suboptimality, independent of `(k, η)`.
    pub a4: f64,
    pub total: f64,
    pub max_branch: MaxBranch,
    /// Present when `η ≥ m/M²`, outside the range where the bound is proven.
    pub warning: Option<String>,
    pub shape_only: bool,
}

pub fn suboptimality_bound(
    c: &AssumptionConstants,
    plan: &ExponentPlan,
    k: u64,
    eta: f64,
) -> Result<BoundBreakdown> {
    c.validate()?;
    require_plan(plan, c.gamma, c.alpha)?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::param(format!("eta must be positive, got {eta}")));
    }
    let warning = (eta >= c.eta_max()).then(|| {
        format!(
            "eta = {eta} is not below m/M^2 = {}; the bound is not established there",
            c.eta_max()
        )
    });
    let q = plan.q;
    let (mx, max_branch) = max_branch(c.gamma, q);
    let kf = k as f64;
    let d = c.d as f64;
    let lead = kf.powf(1.0 + mx);
    let a1 = c.c_thm * lead * eta.powf(1.0 / q);
    let a2 = c.c_thm * lead * eta.powf(1.0 / q + c.gamma / (c.alpha * q)) * d
        / c.beta.powf((q - 1.0) * c.gamma / (c.alpha * q));
    let a3 = c.c_thm * c.beta * (c.b + d / c.beta) / c.m
        * (-c.lambda_star * kf * eta / c.beta).exp();
    let a4 = gibbs_closed_form(c)?;
    Ok(BoundBreakdown {
        a1,
        a2,
        a3,
        a4,
        total: a1 + a2 + a3 + a4,
        max_branch,
        warning,
        shape_only: c.shape_only(),
    })
}

/// `M c_α⁻¹ / (β^{γ+1}(1+γ)) + β⁻¹ log((2e(b+d/β))^{d/2} Γ(d/2+1) β^d / (dm)^{d/2})`,
/// with the logarithm expanded so no factor overflows.
fn gibbs_closed_form(c: &AssumptionConstants) -> Result<f64> {
    let d = c.d as f64;
    let beta = c.beta;
    let first = c.big_m / c_alpha(c.alpha)? / (beta.powf(c.gamma + 1.0) * (1.0 + c.gamma));
    let log = 0.5 * d * (2.0 * std::f64::consts::E * (c.b + d / beta)).ln()
        + ln_gamma(0.5 * d + 1.0)
        + d * beta.ln()
        - 0.5 * d * (d * c.m).ln();
    Ok(first + log / beta)
}

/// Upper bound on `E_π f − f*` for `π ∝ exp(−βf)`.
///
/// Only `β, d, m > 0`, `M > 0`, `b ≥ 0` and `0 ≤ γ ≤ 1` are required, so the
/// Lipschitz-gradient case can be evaluated as well.
pub fn gibbs_suboptimality_bound(c: &AssumptionConstants) -> Result<f64> {
    c.validate_minimal(true)?;
    gibbs_closed_form(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingBranch {
    /// `max{2, q+γ} = 2`.
    Two,
    QPlusGamma,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingBound {
    pub terms: [f64; 3],
    pub total: f64,
    pub branch: SamplingBranch,
    pub shape_only: bool,
}

/// `max{2, q+γ}` and the branch attaining it. Admissible plans have
/// `q < φ` and `γ < (3−√5)/2`, hence `q + γ < 2`.
pub fn sampling_exponent(q: f64, gamma: f64) -> (f64, SamplingBranch) {
    if q + gamma <= 2.0 {
        (2.0, SamplingBranch::Two)
    } else {
        (q + gamma, SamplingBranch::QPlusGamma)
    }
}

/// Bound on `W_q(law of W^k, π)`.
pub fn sampling_bound(
    c: &AssumptionConstants,
    plan: &ExponentPlan,
    k: u64,
    eta: f64,
) -> Result<SamplingBound> {
    c.validate()?;
    require_plan(plan, c.gamma, c.alpha)?;
    check_eta(c, eta)?;
    let q = plan.q;
    let (top, branch) = sampling_exponent(q, c.gamma);
    let kf = k as f64;
    let lead = kf.powf(top / q);
    let t1 = c.c_thm * lead * eta.powf(1.0 / q);
    let t2 = c.c_thm
        * lead
        * eta.powf(1.0 / q + c.gamma / (q * c.alpha))
        * c.beta.powf(-c.gamma * (q - 1.0) / (q * c.alpha))
        * (c.d as f64).powf(1.0 / q);
    let t3 = c.c_thm * c.beta * (-c.lambda_star * kf * eta / c.beta).exp();
    Ok(SamplingBound {
        terms: [t1, t2, t3],
        total: t1 + t2 + t3,
        branch,
        shape_only: c.shape_only(),
    })
}

/// `(k, η)` recommendation making each of the first three terms `O(ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub k: u64,
    /// Step sizes strictly below this value are admissible.
    pub eta_threshold: f64,
    pub regime: MaxBranch,
    /// `k · eta_threshold`.
    pub horizon: f64,
    /// `(β/λ*) log(1/ε)`.
    pub horizon_required: f64,
    pub horizon_check: bool,
    /// Factor by which `k` must grow for the horizon to suffice; 1 when it
    /// already does.
    pub k_multiplier: f64,
}

pub fn epsilon_schedule(
    c: &AssumptionConstants,
    plan: &ExponentPlan,
    epsilon: f64,
) -> Result<EpsilonSchedule> {
    c.validate()?;
    require_plan(plan, c.gamma, c.alpha)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let q = plan.q;
    let g = c.gamma;
    let (_, regime) = max_branch(g, q);
    let exponent = match regime {
        MaxBranch::InverseQ => 2.0 * q + 1.0,
        MaxBranch::GammaTerm => 2.0 * q + g + g * q,
    };
    let k = (1.0 / epsilon).ceil() as u64;
    let eta_threshold = epsilon.powf(exponent);
    let horizon = k as f64 * eta_threshold;
    let horizon_required = c.beta / c.lambda_star * (1.0 / epsilon).ln();
    let horizon_check = horizon > horizon_required;
    let k_multiplier = if horizon_check {
        1.0
    } else {
        (horizon_required / horizon).floor() + 1.0
    };
    Ok(EpsilonSchedule {
        k,
        eta_threshold,
        regime,
        horizon,
        horizon_required,
        horizon_check,
        k_multiplier,
    })
}

/// `M/(1+γ) ‖x−y‖^{1+γ} − c_α |f(x) − f(y) − ⟨∇f(y), x−y⟩|`; non-negative
/// whenever `(M, γ)` is a valid Hölder certificate.
pub fn hoelder_descent_inequality(
    c: &AssumptionConstants,
    x: &[f64],
    y: &[f64],
    obj: &dyn Objective,
) -> Result<f64> {
    if x.len() != obj.dim() || y.len() != obj.dim() {
        return Err(Error::DimensionMismatch(x.len().max(y.len()), obj.dim()));
    }
    let ca = c_alpha(c.alpha)?;
    let g = obj.grad(y);
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let dist = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
    let linear: f64 = g.iter().zip(&diff).map(|(a, b)| a * b).sum();
    let lhs = ca * (obj.value(x) - obj.value(y) - linear).abs();
    let rhs = c.big_m / (1.0 + c.gamma) * dist.powf(1.0 + c.gamma);
    Ok(rhs - lhs)
}
