//! Gamma-function helpers. Every closed form in this crate is a ratio of
//! gamma values, so everything is routed through log-gamma.

use statrs::function::gamma::ln_gamma as statrs_ln_gamma;

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma called with non-positive argument {x}");
    statrs_ln_gamma(x)
}

/// Gamma function for `x > 0`, evaluated as `exp(ln_gamma(x))`.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: Stirling series on a shifted argument, walked back
    // with the recurrence ln Γ(x) = ln Γ(x + n) - Σ ln(x + i).
    fn stirling_ln_gamma(x: f64) -> f64 {
        let mut shift = 0.0;
        let mut z = x;
        while z < 30.0 {
            shift += z.ln();
            z += 1.0;
        }
        let inv = 1.0 / z;
        let inv2 = inv * inv;
        let series = inv
            * (1.0 / 12.0
                - inv2
                    * (1.0 / 360.0
                        - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
        (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
    }

    #[test]
    fn matches_stirling_oracle_on_unit_to_fifty() {
        let mut x = 0.05;
        while x < 50.0 {
            let a = gamma(x);
            let b = stirling_ln_gamma(x).exp();
            assert!(((a - b) / b).abs() < 1e-12, "x = {x}: {a} vs {b}");
            x += 0.173;
        }
    }

    #[test]
    fn known_values() {
        assert!((gamma(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((gamma(1.0) - 1.0).abs() < 1e-15);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
    }
}
