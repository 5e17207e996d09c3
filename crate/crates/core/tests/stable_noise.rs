mod common;

use flmc::diagnostics::median_of_means;
use flmc::seeding::stream;
use flmc::stable_noise::{
    levy_norm_moment_bound, sample_levy_increment, sample_sas, sas_abs_moment, StableParams,
};
use flmc::Error;
use proptest::prelude::*;

fn draws(alpha: f64, scale: f64, n: usize, seed: u64) -> Vec<f64> {
    let p = StableParams::new(alpha, scale).unwrap();
    let mut rng = stream(seed);
    (0..n).map(|_| sample_sas(&p, &mut rng)).collect()
}

fn empirical_cf(x: &[f64], omega: f64) -> f64 {
    x.iter().map(|v| (omega * v).cos()).sum::<f64>() / x.len() as f64
}

#[test]
fn characteristic_function_matches() {
    for (i, alpha) in [1.2, 1.5, 1.8, 2.0].into_iter().enumerate() {
        let x = draws(alpha, 1.0, 1_000_000, 100 + i as u64);
        for omega in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let got = empirical_cf(&x, omega);
            let want = (-f64::powf(omega, alpha)).exp();
            assert!((got - want).abs() < 0.01, "alpha {alpha} omega {omega}: {got} vs {want}");
        }
    }
}

#[test]
fn scaled_characteristic_function() {
    let x = draws(1.5, 2.0, 1_000_000, 7);
    for omega in [0.25, 0.5, 1.0] {
        let want = (-f64::powf(2.0 * omega, 1.5)).exp();
        assert!((empirical_cf(&x, omega) - want).abs() < 0.01);
    }
}

#[test]
fn symmetric_signs() {
    for alpha in [1.2, 1.7, 2.0] {
        let x = draws(alpha, 1.0, 1_000_000, 11);
        let s = x.iter().map(|v| v.signum()).sum::<f64>() / x.len() as f64;
        assert!(s.abs() < 3e-3, "alpha {alpha}: mean sign {s}");
    }
}

#[test]
fn gaussian_at_two() {
    let x = draws(2.0, 1.0, 1_000_000, 5);
    let mut sorted = x.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let f = common::normal_cdf(v / 2f64.sqrt());
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max);
    assert!(d < 1.95 / n.sqrt(), "KS distance to N(0, 2): {d}");
}

#[test]
fn scale_enters_linearly() {
    for alpha in [1.3, 1.8] {
        let a = draws(alpha, 3.0, 100_000, 21);
        let b: Vec<f64> = draws(alpha, 1.0, 100_000, 22).iter().map(|v| 3.0 * v).collect();
        let d = common::ks_two_sample(&a, &b);
        assert!(d < 0.01, "alpha {alpha}: KS {d}");
    }
}

#[test]
fn increments_are_additive() {
    let n = 100_000;
    let mut rng = stream(31);
    let halves: Vec<f64> = (0..n)
        .map(|_| {
            sample_levy_increment(1.5, 0.5, 1.0, 1, &mut rng).unwrap()[0]
                + sample_levy_increment(1.5, 0.5, 1.0, 1, &mut rng).unwrap()[0]
        })
        .collect();
    let whole: Vec<f64> = (0..n)
        .map(|_| sample_levy_increment(1.5, 1.0, 1.0, 1, &mut rng).unwrap()[0])
        .collect();
    let d = common::ks_two_sample(&halves, &whole);
    assert!(d < 0.01, "KS {d}");
}

#[test]
fn gaussian_increment_variance() {
    let (eta, beta) = (0.01, 4.0);
    let mut rng = stream(8);
    let x = sample_levy_increment(2.0, eta, beta, 100_000, &mut rng).unwrap();
    let var = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    assert!((var / (2.0 * eta / beta) - 1.0).abs() < 0.02);
}

#[test]
fn bad_increment_inputs() {
    let mut rng = stream(0);
    assert!(sample_levy_increment(1.5, -1.0, 1.0, 1, &mut rng).is_err());
    assert!(sample_levy_increment(1.5, 1.0, 0.0, 1, &mut rng).is_err());
    assert!(sample_levy_increment(1.5, 1.0, 1.0, 0, &mut rng).is_err());
}

#[test]
fn half_normal_limit() {
    let want = 2.0 / std::f64::consts::PI.sqrt();
    assert!((sas_abs_moment(2.0, 1.0).unwrap() - want).abs() < 1e-12);
    assert!((sas_abs_moment(1.999_999, 1.0).unwrap() - want).abs() < 1e-5);
}

/// Grid points with `λ ≤ α − 0.3` and a finite-variance or near-finite
/// `|X|^λ`; see `moment_boundary_bias` for `λ = α − 0.3` itself.
#[test]
fn moment_truth() {
    let grid = [(1.2, 0.3), (1.2, 0.5), (1.5, 0.5), (1.5, 1.0), (1.8, 0.5), (1.8, 1.0), (2.0, 1.7)];
    for (i, (alpha, lambda)) in grid.into_iter().enumerate() {
        let x = draws(alpha, 1.0, 2_000_000, 200 + i as u64);
        let powers: Vec<f64> = x.iter().map(|v| v.abs().powf(lambda)).collect();
        let mc = median_of_means(&powers, 32).unwrap();
        let exact = sas_abs_moment(alpha, lambda).unwrap();
        assert!((mc / exact - 1.0).abs() < 0.02, "({alpha}, {lambda}): {mc} vs {exact}");
    }
}

/// At `λ = α − 0.3 > α/2` the variance of `|X|^λ` is infinite and the
/// median of block means sits below the mean. The closed form must still lie
/// inside the spread of plain sample means over independent seeds.
#[test]
fn moment_boundary_bias() {
    let (alpha, lambda) = (1.5, 1.2);
    let exact = sas_abs_moment(alpha, lambda).unwrap();
    let means: Vec<f64> = (0..6)
        .map(|s| {
            let x = draws(alpha, 1.0, 1_000_000, 300 + s);
            x.iter().map(|v| v.abs().powf(lambda)).sum::<f64>() / x.len() as f64
        })
        .collect();
    let lo = means.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = means.iter().cloned().fold(0.0, f64::max);
    assert!(lo < exact * 1.01 && hi > exact * 0.97, "{means:?} vs {exact}");
}

#[test]
fn divergent_moment_witness() {
    let alpha = 1.5;
    let reference = sas_abs_moment(alpha, alpha - 0.3).unwrap();
    let x = draws(alpha, 1.0, 1_000_000, 41);
    let lambda = alpha + 0.2;
    let mut sum = 0.0;
    let mut peak: f64 = 0.0;
    for (i, v) in x.iter().enumerate() {
        sum += v.abs().powf(lambda);
        if i >= 1000 {
            peak = peak.max(sum / (i + 1) as f64);
        }
    }
    assert!(peak > 3.0 * reference, "running mean peaked at {peak}");
    assert!(matches!(
        sas_abs_moment(alpha, lambda),
        Err(Error::MomentDivergence { .. })
    ));
}

#[test]
fn norm_moment_bound_cases() {
    assert_eq!(levy_norm_moment_bound(1.5, 0.0, 7).unwrap(), 7.0);
    let m1 = sas_abs_moment(1.5, 1.0).unwrap();
    assert!((levy_norm_moment_bound(1.5, 1.0, 3).unwrap() - 3.0 * m1).abs() < 1e-14);
    assert!(levy_norm_moment_bound(1.5, 1.5, 3).is_err());
}

#[test]
fn norm_moment_bound_dominates() {
    let (alpha, lambda, d) = (1.8, 1.2, 2);
    let bound = levy_norm_moment_bound(alpha, lambda, d).unwrap();
    let mut rng = stream(51);
    let n = 1_000_000;
    let mean = (0..n)
        .map(|_| {
            let v = sample_levy_increment(alpha, 1.0, 1.0, d, &mut rng).unwrap();
            (v[0] * v[0] + v[1] * v[1]).sqrt().powf(lambda)
        })
        .sum::<f64>()
        / n as f64;
    assert!(mean <= bound, "{mean} > {bound}");
}

proptest! {
    #[test]
    fn moment_formula_matches_second_gamma(alpha in 1.05f64..2.0, frac in -0.95f64..0.95) {
        let lambda = frac * alpha.min(1.0);
        let lg = common::lanczos_ln_gamma;
        let want = (lambda * std::f64::consts::LN_2 + lg(0.5 * (1.0 + lambda))
            + lg(1.0 - lambda / alpha) - lg(0.5) - lg(1.0 - 0.5 * lambda)).exp();
        let got = sas_abs_moment(alpha, lambda).unwrap();
        prop_assert!((got / want - 1.0).abs() < 1e-11);
    }

    #[test]
    fn params_validation(alpha in -1.0f64..3.0, scale in -1.0f64..2.0) {
        let ok = alpha > 1.0 && alpha <= 2.0 && scale > 0.0;
        prop_assert_eq!(StableParams::new(alpha, scale).is_ok(), ok);
    }
}
