mod common;

use flmc::diagnostics::{
    fit_log_log, fractional_moment, gibbs_reference_1d, non_increasing_after,
    sliced_wasserstein_q, suboptimality_curve, wasserstein_q_1d, weak_error_study, Coupling,
    EmpiricalDistribution, WeakErrorOptions,
};
use flmc::dynamics::{run, InitSpec, RunConfig};
use flmc::objectives::{DoubleWell1d, FractionalPowerWell, Objective, Quadratic};
use flmc::seeding::stream;
use flmc::stable_noise::{sample_sas, sas_abs_moment, StableParams};
use flmc::theory_bounds::{
    detailed_weak_error_bound, gibbs_suboptimality_bound, plan_exponents, AssumptionConstants,
    InitialMoments,
};
use proptest::prelude::*;
use rand::Rng;

fn scalars(v: &[f64]) -> EmpiricalDistribution {
    EmpiricalDistribution::from_scalars(v.to_vec(), "x").unwrap()
}

#[test]
fn wasserstein_matches_brute_force() {
    let mut rng = stream(1);
    for _ in 0..50 {
        let n = rng.random_range(1..=8);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let q = rng.random_range(1.0..3.0);
        let got = wasserstein_q_1d(&scalars(&a), &scalars(&b), q).unwrap();
        let want = common::brute_force_wq(&a, &b, q);
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn sliced_distance_of_a_shift() {
    // Projections of a shift by v move every sample by <u, v>; the mean of
    // |<u, v>| over the circle is 2|v|/π.
    let mut rng = stream(2);
    let a: Vec<Vec<f64>> = (0..500)
        .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
        .collect();
    let v = [0.6, -0.8];
    let b: Vec<Vec<f64>> = a.iter().map(|x| vec![x[0] + v[0], x[1] + v[1]]).collect();
    let a = EmpiricalDistribution::new(&a, "a").unwrap();
    let b = EmpiricalDistribution::new(&b, "b").unwrap();
    let s = sliced_wasserstein_q(&a, &b, 1.0, 20_000, &mut stream(3)).unwrap();
    assert!((s - 2.0 / std::f64::consts::PI).abs() < 0.01, "{s}");
    let s2 = sliced_wasserstein_q(&a, &b, 2.0, 200, &mut stream(4)).unwrap();
    assert!(s2 <= 1.0 + 1e-12);
}

#[test]
fn gaussian_gibbs_reference() {
    let beta = 2.0;
    let q = Quadratic::new(1, 1.0);
    let g = gibbs_reference_1d(&q, beta, -10.0, 10.0, 1 << 17).unwrap();
    // π = N(0, 1/β).
    let sd = 1.0 / beta.sqrt();
    let norm = 1.0 / (sd * (2.0 * std::f64::consts::PI).sqrt());
    for (x, p) in g.grid.iter().zip(&g.density).step_by(997) {
        let want = norm * (-0.5 * (x / sd).powi(2)).exp();
        assert!((p - want).abs() < 1e-6);
        assert!((g.cdf_at(*x) - common::normal_cdf(x / sd)).abs() < 1e-6);
    }
    assert!((g.expectation(|_| 1.0) - 1.0).abs() < 1e-8);
    for u in [0.01, 0.1, 0.5, 0.9, 0.99] {
        assert!((common::normal_cdf(g.quantile(u) / sd) - u).abs() < 1e-6);
    }
    let var = g.expectation(|x| x * x);
    assert!((var - 1.0 / beta).abs() < 1e-8);
    assert!(gibbs_reference_1d(&q, beta, -1.0, 1.0, 1000).is_err());
}

#[test]
fn gibbs_concentration() {
    let dw = DoubleWell1d::new(0.2, 0.3).unwrap();
    let g = gibbs_reference_1d(&dw, 20.0, -4.0, 4.0, 1 << 16).unwrap();
    let star = dw.minimizer().unwrap().x[0];
    assert!(g.mass_within(star, 0.3) >= 0.95, "{}", g.mass_within(star, 0.3));

    let w = FractionalPowerWell::new(1, 1.0, 0.01, 0.3).unwrap();
    let cert = w.certificate().unwrap();
    let f_star = w.minimizer().unwrap().f;
    for beta in [1.0, 5.0, 20.0] {
        let g = gibbs_reference_1d(&w, beta, -60.0, 60.0, 1 << 18).unwrap();
        let gap = g.expectation(|x| w.value(&[x])) - f_star;
        let c = AssumptionConstants::from_certificate(&cert, 1.5, beta, 1).unwrap();
        let bound = gibbs_suboptimality_bound(&c).unwrap();
        assert!(gap >= 0.0 && gap <= bound, "beta {beta}: {gap} vs {bound}");
    }
}

#[test]
fn fractional_moment_of_stable_draws() {
    let p = StableParams::new(1.5, 1.0).unwrap();
    let mut rng = stream(9);
    let x: Vec<f64> = (0..10_000_000).map(|_| sample_sas(&p, &mut rng)).collect();
    let got = fractional_moment(&scalars(&x), 0.5).unwrap();
    let want = sas_abs_moment(1.5, 0.5).unwrap();
    assert!((got / want - 1.0).abs() < 0.02, "{got} vs {want}");

    let same = EmpiricalDistribution::new(&vec![vec![3.0, 4.0]; 10], "c").unwrap();
    assert!((fractional_moment(&same, 0.5).unwrap() - 5f64.sqrt()).abs() < 1e-12);
    assert_eq!(fractional_moment(&same, 0.0).unwrap(), 1.0);
}

#[test]
fn suboptimality_settles() {
    let w = FractionalPowerWell::new(2, 1.0, 0.01, 0.3).unwrap();
    let mut cfg = RunConfig::fla(1.7, 100.0, 0.01, 2000, 4);
    cfg.replicas = 64;
    cfg.record_every = 100;
    cfg.init = InitSpec::Point { x: vec![3.0, -3.0] };
    let trajs = run(&w, &cfg).unwrap();
    let curve = suboptimality_curve(&trajs, &w).unwrap();
    assert!(non_increasing_after(&curve, 0.1), "{curve:?}");
    assert!(curve.last().unwrap().mean_gap < curve[0].mean_gap);
    for p in &curve {
        assert!(p.ci_lo <= p.mean_gap && p.mean_gap <= p.ci_hi);
    }
    assert_eq!(curve, suboptimality_curve(&trajs, &w).unwrap());
}

/// At `α = 2` the scheme targets `π` up to an `O(η)` bias; the distance to
/// quadrature draws falls from the start and then sits at the sampling floor.
#[test]
fn posterior_convergence_at_two() {
    let w = FractionalPowerWell::new(1, 1.0, 0.01, 0.3).unwrap();
    let g = gibbs_reference_1d(&w, 1.0, -60.0, 60.0, 1 << 18).unwrap();
    let n = 2000;
    let reference = scalars(&g.sample(n, &mut stream(3)));
    let mut cfg = RunConfig::fla(2.0, 1.0, 1e-3, 100_000, 13);
    cfg.replicas = n;
    cfg.record_every = 1000;
    let trajs = run(&w, &cfg).unwrap();
    let at = |step: u64| {
        let j = trajs[0].steps.iter().position(|s| *s == step).unwrap();
        let xs: Vec<f64> = trajs.iter().map(|t| t.states[j][0]).collect();
        wasserstein_q_1d(&scalars(&xs), &reference, 1.2).unwrap()
    };
    let (early, mid, late) = (at(1000), at(10_000), at(100_000));
    assert!(mid < early && late < early, "{early} {mid} {late}");
    assert!(late < 0.06, "{late}");
}

#[test]
fn weak_error_study_shape() {
    let w = FractionalPowerWell::new(1, 1.0, 0.01, 0.3).unwrap();
    let mut cfg = RunConfig::fla(1.5, 1.0, 1e-3, 100, 7);
    cfg.init = InitSpec::Point { x: vec![1.0] };
    let opts = WeakErrorOptions {
        refinement: 4,
        replicas: 500,
        q: 1.2,
        coupling: Coupling::Shared,
        bootstrap: 100,
        projections: 1,
    };
    let etas = [4e-3, 2e-3, 1e-3];
    let t = weak_error_study(&w, &cfg, &etas, &opts).unwrap();
    assert_eq!(t.rows.len(), 3);
    for (r, eta) in t.rows.iter().zip(etas) {
        assert_eq!(r.eta, eta);
        assert!(r.ci_lo <= r.wq && r.wq <= r.ci_hi.max(r.wq));
    }
    assert_eq!(t, weak_error_study(&w, &cfg, &etas, &opts).unwrap());
    assert!(weak_error_study(&w, &cfg, &etas[..2], &opts).is_err());
    assert!(fit_log_log(&[1.0, 2.0, 4.0], &[1.0, 0.0, 2.0]).is_err());
}

/// With `C_thm` calibrated at the largest η, the bound on `W_q^q` dominates
/// the estimate at the smaller steps.
#[test]
fn calibrated_bound_dominates() {
    let w = FractionalPowerWell::new(1, 1.0, 0.01, 0.3).unwrap();
    let (alpha, k) = (1.5, 100);
    let plan = plan_exponents(0.3, alpha, 0.5).unwrap();
    let mut c = AssumptionConstants::from_certificate(&w.certificate().unwrap(), alpha, 1.0, 1)
        .unwrap();
    let mut cfg = RunConfig::fla(alpha, 1.0, 1e-3, k, 17);
    cfg.init = InitSpec::Origin;
    let opts = WeakErrorOptions {
        refinement: 4,
        replicas: 1000,
        q: plan.q,
        coupling: Coupling::Shared,
        bootstrap: 100,
        projections: 1,
    };
    let etas = [4e-3, 2e-3, 1e-3];
    let table = weak_error_study(&w, &cfg, &etas, &opts).unwrap();
    let bound = |c: &AssumptionConstants, eta: f64| {
        detailed_weak_error_bound(c, &plan, k, eta, InitialMoments::Origin).unwrap().total
    };
    let first = &table.rows[0];
    let scale = (first.wq.powf(plan.q) / bound(&c, first.eta)).max(1.0);
    c.c_thm = scale;
    c.calibrated = true;
    for r in &table.rows[1..] {
        let b = scale * bound(&c, r.eta);
        assert!(r.wq.powf(plan.q) <= b, "eta {}: {} > {b}", r.eta, r.wq.powf(plan.q));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn metric_axioms(
        a in prop::collection::vec(-10.0f64..10.0, 1..=8),
        seed in any::<u64>(),
        q in 1.0f64..4.0,
    ) {
        let n = a.len();
        let mut rng = stream(seed);
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let (da, db, dc) = (scalars(&a), scalars(&b), scalars(&c));
        let ab = wasserstein_q_1d(&da, &db, q).unwrap();
        prop_assert_eq!(ab, wasserstein_q_1d(&db, &da, q).unwrap());
        prop_assert_eq!(wasserstein_q_1d(&da, &da, q).unwrap(), 0.0);
        let ac = wasserstein_q_1d(&da, &dc, q).unwrap();
        let cb = wasserstein_q_1d(&dc, &db, q).unwrap();
        prop_assert!(ab <= ac + cb + 1e-12);
        prop_assert!((ab - common::brute_force_wq(&a, &b, q)).abs() < 1e-12);
    }
}
