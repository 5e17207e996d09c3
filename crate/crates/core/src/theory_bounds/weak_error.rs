//! Explicit constants of the weak-error bound between the continuous process
//! and the FLA interpolation, and the moment bounds of the FLA iterates.

use serde::{Deserialize, Serialize};

use super::{check_eta, check_plan, AssumptionConstants, ExponentPlan};
use crate::special::ln_gamma;
use crate::stable_noise::levy_norm_moment_bound;
use crate::{Error, Result};

/// Law of the initial state, through its norm moments `E‖X(0)‖^λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialMoments {
    Origin,
    Deterministic { norm: f64 },
    /// `N(0, σ² I_d)`.
    Gaussian { sigma: f64 },
}

impl InitialMoments {
    /// `E‖X(0)‖^λ` in dimension `d`, with the convention `0⁰ = 1`.
    pub fn moment(&self, lambda: f64, d: usize) -> f64 {
        if lambda == 0.0 {
            return 1.0;
        }
        match *self {
            InitialMoments::Origin => 0.0,
            InitialMoments::Deterministic { norm } => norm.powf(lambda),
            InitialMoments::Gaussian { sigma } => {
                let d = d as f64;
                // Chi law: E R^λ = 2^{λ/2} Γ((d+λ)/2) / Γ(d/2), scaled by σ^λ.
                (std::f64::consts::SQRT_2 * sigma).powf(lambda)
                    * (ln_gamma(0.5 * (d + lambda)) - ln_gamma(0.5 * d)).exp()
            }
        }
    }
}

/// `P₁, P₂, Q₁, Q₂` of the weak-error bound and `P₃, Q₃` of the
/// function-gap bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakErrorConstants {
    pub p1: f64,
    pub p2: f64,
    pub q1: f64,
    pub q2: f64,
    pub p3: f64,
    pub q3: f64,
}

fn require_plan(c: &AssumptionConstants, plan: &ExponentPlan) -> Result<()> {
    let v = check_plan(plan, c.gamma, c.alpha);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InfeasiblePlan(format!("{v:?}")))
    }
}

/// Evaluates the constants at step size `eta`. `delta ∈ [0, 1)` is the
/// relative stochastic-gradient error; 0 gives the exact-gradient constants.
pub fn weak_error_constants(
    c: &AssumptionConstants,
    plan: &ExponentPlan,
    eta: f64,
    init: InitialMoments,
    delta: f64,
) -> Result<WeakErrorConstants> {
    c.validate()?;
    require_plan(c, plan)?;
    check_eta(c, eta)?;
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::param(format!("delta must lie in [0, 1), got {delta}")));
    }
    let ExponentPlan { p, q, p1, q1 } = *plan;
    let (alpha, beta, g) = (c.alpha, c.beta, c.gamma);
    let (mm, bb, cc) = (c.big_m, c.big_b, c.c);
    let d = c.d;
    let l = |lambda: f64| levy_norm_moment_bound(alpha, lambda, d);
    let x0 = |lambda: f64| init.moment(lambda, d);
    let drift = 2.0 * eta * (c.b + c.m);
    let noise_ratio = eta / beta;
    let c_eta_d = cc * eta * (d as f64 / beta.powf(1.0 / alpha));
    let c_eta = cc * eta;

    let qm1 = q - 1.0;
    let p1_value = c_eta_d.powf(1.0 / p1)
        + c_eta.powf(1.0 / p1)
        + drift.powf(qm1 / 2.0)
        + 2f64.powf(qm1 / 2.0) * (eta * bb).powf(qm1)
        + noise_ratio.powf(qm1 / alpha) * l(qm1 * p1)?.powf(1.0 / p1)
        + eta.powf(qm1)
            * mm.powf(qm1)
            * (drift.powf(qm1 * g / 2.0)
                + 2f64.powf(qm1 * g / 2.0) * (eta * bb).powf(qm1 * g)
                + noise_ratio.powf(qm1 * g / alpha) * l(qm1 * p1 * g)?.powf(1.0 / p1));

    let hoelder_terms = |r: f64| -> Result<f64> {
        Ok(drift.powf(g / 2.0)
            + 2f64.powf(g / 2.0) * (eta * bb).powf(g)
            + noise_ratio.powf(g / alpha) * l(g * r)?.powf(1.0 / r))
    };
    let p2 = mm
        * (c_eta_d.powf(1.0 / q1) + c_eta.powf(1.0 / q1) + (1.0 + delta) * hoelder_terms(q1)?);
    let q1_value = cc.powf(1.0 / p1)
        + x0(qm1 * p1).powf(1.0 / p1)
        + eta.powf(qm1) * (mm.powf(qm1) * x0(qm1 * p1 * g).powf(1.0 / p1) + bb.powf(qm1))
        + noise_ratio.powf(qm1 / alpha) * l(qm1 * p1)?.powf(1.0 / p1);
    let q2 = (1.0 + delta) * mm * x0(g * q1).powf(1.0 / q1) + mm * cc.powf(1.0 / q1);
    let p3 = mm * (c_eta_d.powf(1.0 / p) + c_eta.powf(1.0 / p) + hoelder_terms(p)?);
    let q3 = mm * x0(g * p).powf(1.0 / p) + mm * cc.powf(1.0 / p) + bb;
    Ok(WeakErrorConstants {
        p1: p1_value,
        p2,
        q1: q1_value,
        q2,
        p3,
        q3,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetailedWeakError {
    pub constants: WeakErrorConstants,
    /// Bound on `W_q^q` between the continuous process and FLA at `kη`.
    pub total: f64,
    pub shape_only: bool,
}

/// `qη (k² P₁P₂ + k^{1+1/p₁} P₁Q₂ + k^{1+1/q₁} P₂Q₁ + k Q₁Q₂)`.
pub fn detailed_weak_error_bound(
    c: &AssumptionConstants,
    plan: &ExponentPlan,
    k: u64,
    eta: f64,
    init: InitialMoments,
) -> Result<DetailedWeakError> {
    detailed_weak_error_bound_sg(c, plan, k, eta, init, 0.0)
}

/// As [`detailed_weak_error_bound`] with stochastic gradients whose relative
/// `q₁`-error is at most `delta`.
pub fn detailed_weak_error_bound_sg(
    c: &AssumptionConstants,
    plan: &ExponentPlan,
    k: u64,
    eta: f64,
    init: InitialMoments,
    delta: f64,
) -> Result<DetailedWeakError> {
    let w = weak_error_constants(c, plan, eta, init, delta)?;
    let kf = k as f64;
    let total = plan.q
        * eta
        * (kf * kf * w.p1 * w.p2
            + kf.powf(1.0 + 1.0 / plan.p1) * w.p1 * w.q2
            + kf.powf(1.0 + 1.0 / plan.q1) * w.p2 * w.q1
            + kf * w.q1 * w.q2);
    Ok(DetailedWeakError {
        constants: w,
        total,
        shape_only: c.shape_only(),
    })
}

/// Bound on `c_α |E f(X₁(kη)) − E f(X₂(kη))|`:
/// `(qη)^{1/q} (Q₃ + k^{1/p} P₃) Σ` with `Σ` the four `1/q`-th-power terms.
pub fn function_gap_bound(
    c: &AssumptionConstants,
    plan: &ExponentPlan,
    k: u64,
    eta: f64,
    init: InitialMoments,
) -> Result<f64> {
    let w = weak_error_constants(c, plan, eta, init, 0.0)?;
    let ExponentPlan { p, q, p1, q1 } = *plan;
    let kf = k as f64;
    let s = kf.powf(2.0 / q) * (w.p1 * w.p2).powf(1.0 / q)
        + kf.powf(1.0 / q + 1.0 / (q * p1)) * (w.p1 * w.q2).powf(1.0 / q)
        + kf.powf(1.0 / q + 1.0 / (q * q1)) * (w.p2 * w.q1).powf(1.0 / q)
        + kf.powf(1.0 / q) * (w.q1 * w.q2).powf(1.0 / q);
    Ok((q * eta).powf(1.0 / q) * (w.q3 + kf.powf(1.0 / p) * w.p3) * s)
}

/// Bound on `W_q^q` between the continuous process with drift `−c_α∇f` and
/// the one with the exact fractional drift, at time `t`.
pub fn x1_x3_bound(c: &AssumptionConstants, plan: &ExponentPlan, t: f64) -> Result<f64> {
    c.validate()?;
    require_plan(c, plan)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param(format!("t must be non-negative, got {t}")));
    }
    let q = plan.q;
    let g = c.gamma;
    let base = t * (c.d as f64 / c.beta.powf(1.0 / c.alpha) + 1.0) + 1.0;
    let cq = c.c.powf(q - 1.0) + c.c_b.powf(q - 1.0);
    Ok(q * t
        * (c.big_m * cq * (c.c.powf(g) + c.c_b.powf(g)) * base.powf(q - 1.0 + g)
            + c.big_l * cq * base.powf(q - 1.0)))
}

/// Parameter regime of the iterate moment bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentCase {
    /// `1 < λ < α` and `1 < γλ < α`.
    A,
    /// `0 ≤ λ ≤ 1`.
    B,
    /// `1 < λ < α` and `0 ≤ γλ ≤ 1`.
    C,
}

impl MomentCase {
    /// The case whose range contains `(λ, γ)`, if any.
    pub fn for_lambda(lambda: f64, gamma: f64, alpha: f64) -> Option<Self> {
        [MomentCase::B, MomentCase::C, MomentCase::A]
            .into_iter()
            .find(|case| case.admits(lambda, gamma, alpha))
    }

    fn admits(&self, lambda: f64, gamma: f64, alpha: f64) -> bool {
        let gl = gamma * lambda;
        match self {
            MomentCase::A => lambda > 1.0 && lambda < alpha && gl > 1.0 && gl < alpha,
            MomentCase::B => (0.0..=1.0).contains(&lambda),
            MomentCase::C => lambda > 1.0 && lambda < alpha && (0.0..=1.0).contains(&gl),
        }
    }
}

/// Bound on `E‖W^j‖^λ`: `B̄_{j,λ}` in case (b), `B_{j,λ}` in cases (a), (c).
#[allow(clippy::too_many_arguments)]
pub fn discrete_moment_bound(
    c: &AssumptionConstants,
    j: u64,
    eta: f64,
    lambda: f64,
    case: MomentCase,
    init: InitialMoments,
) -> Result<f64> {
    c.validate()?;
    check_eta(c, eta)?;
    if !case.admits(lambda, c.gamma, c.alpha) {
        return Err(Error::param(format!(
            "lambda = {lambda} (gamma = {}) is outside case {case:?}",
            c.gamma
        )));
    }
    let jf = j as f64;
    let drift = 2.0 * eta * (c.b + c.m);
    let ratio = eta / c.beta;
    let l = levy_norm_moment_bound(c.alpha, lambda, c.d)?;
    let x0 = init.moment(lambda, c.d);
    Ok(match case {
        MomentCase::B => {
            x0 + jf
                * (drift.powf(lambda / 2.0)
                    + 2f64.powf(lambda / 2.0) * (eta * c.big_b).powf(lambda)
                    + ratio.powf(lambda / c.alpha) * l)
        }
        MomentCase::A | MomentCase::C => (x0.powf(1.0 / lambda)
            + jf * (drift.sqrt()
                + std::f64::consts::SQRT_2 * eta * c.big_b
                + ratio.powf(1.0 / c.alpha) * l.powf(1.0 / lambda)))
        .powf(lambda),
    })
}
