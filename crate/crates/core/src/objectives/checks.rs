//! Monte Carlo checks of the certificate inequalities.
//!
//! Points are drawn from two mixtures: uniform in the region, and (for the
//! Hölder check) pairs at log-uniform separations from `1e-6` to the region
//! width, or (for the growth checks) points at log-uniform radii. The second
//! component probes the small scales where fractional exponents bite.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{norm, Objective};
use crate::theory_bounds::c_alpha;
use crate::{Error, Result};

/// The hypercube `[lo, hi]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lo: f64,
    pub hi: f64,
}

impl Region {
    fn validate(&self) -> Result<()> {
        if self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi {
            Ok(())
        } else {
            Err(Error::param(format!(
                "region [{}, {}] is degenerate",
                self.lo, self.hi
            )))
        }
    }

    fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    fn uniform<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Vec<f64> {
        (0..dim).map(|_| self.lo + self.width() * rng.random::<f64>()).collect()
    }
}

fn unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&u);
        if n > 1e-12 {
            return u.into_iter().map(|v| v / n).collect();
        }
    }
}

fn log_uniform<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp()
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::param("probe count must be at least 1"))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub max_ratio: f64,
    pub worst_pair: (Vec<f64>, Vec<f64>),
    pub passed: bool,
}

/// Largest sampled `c_α ‖∇f(x) − ∇f(y)‖ / ‖x − y‖^γ`; passes iff `≤ M`.
#[allow(clippy::too_many_arguments)]
pub fn check_holder<R: Rng + ?Sized>(
    obj: &dyn Objective,
    alpha: f64,
    gamma: f64,
    big_m: f64,
    n_pairs: usize,
    region: Region,
    rng: &mut R,
) -> Result<HolderReport> {
    check_count(n_pairs)?;
    region.validate()?;
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::param(format!("gamma must lie in [0, 1], got {gamma}")));
    }
    let ca = c_alpha(alpha)?;
    let d = obj.dim();
    let mut gx = vec![0.0; d];
    let mut gy = vec![0.0; d];
    let mut report = HolderReport {
        max_ratio: 0.0,
        worst_pair: (vec![0.0; d], vec![0.0; d]),
        passed: true,
    };
    for i in 0..n_pairs {
        let x = region.uniform(d, rng);
        let y = if i % 2 == 0 {
            region.uniform(d, rng)
        } else {
            let u = unit_vector(d, rng);
            let t = log_uniform(1e-6, region.width(), rng);
            x.iter().zip(&u).map(|(a, b)| region.clamp(a + t * b)).collect()
        };
        let dist = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if dist == 0.0 {
            continue;
        }
        obj.grad_into(&x, &mut gx);
        obj.grad_into(&y, &mut gy);
        let num = gx.iter().zip(&gy).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let ratio = ca * num / dist.powf(gamma);
        if ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.worst_pair = (x, y);
        }
    }
    report.passed = report.max_ratio <= big_m;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissipativityReport {
    pub min_slack: f64,
    pub worst_point: Vec<f64>,
    pub passed: bool,
}

fn probe_point<R: Rng + ?Sized>(i: usize, d: usize, region: Region, rng: &mut R) -> Vec<f64> {
    match i {
        0 => vec![region.clamp(0.0); d],
        _ if i % 2 == 1 => region.uniform(d, rng),
        _ => {
            let u = unit_vector(d, rng);
            let r = log_uniform(1e-6, region.width(), rng);
            u.iter().map(|v| region.clamp(r * v)).collect()
        }
    }
}

/// Smallest sampled `c_α ⟨x, ∇f(x)⟩ − m ‖x‖^{1+γ} + b`; passes iff `≥ 0`.
/// The first probe is the origin whenever the region contains it.
#[allow(clippy::too_many_arguments)]
pub fn check_dissipative<R: Rng + ?Sized>(
    obj: &dyn Objective,
    alpha: f64,
    m: f64,
    b: f64,
    gamma: f64,
    n_points: usize,
    region: Region,
    rng: &mut R,
) -> Result<DissipativityReport> {
    check_count(n_points)?;
    region.validate()?;
    let ca = c_alpha(alpha)?;
    let d = obj.dim();
    let mut g = vec![0.0; d];
    let mut report = DissipativityReport {
        min_slack: f64::INFINITY,
        worst_point: vec![0.0; d],
        passed: true,
    };
    for i in 0..n_points {
        let x = probe_point(i, d, region, rng);
        obj.grad_into(&x, &mut g);
        let inner: f64 = x.iter().zip(&g).map(|(a, b)| a * b).sum();
        let slack = ca * inner - m * norm(&x).powf(1.0 + gamma) + b;
        if slack < report.min_slack {
            report.min_slack = slack;
            report.worst_point = x;
        }
    }
    report.passed = report.min_slack >= 0.0;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub min_slack: f64,
    pub worst_point: Vec<f64>,
    pub passed: bool,
}

/// Smallest sampled `M ‖x‖^γ + B − c_α ‖∇f(x)‖`; passes iff `≥ 0`.
#[allow(clippy::too_many_arguments)]
pub fn check_gradient_growth<R: Rng + ?Sized>(
    obj: &dyn Objective,
    alpha: f64,
    big_m: f64,
    big_b: f64,
    gamma: f64,
    n_points: usize,
    region: Region,
    rng: &mut R,
) -> Result<GrowthReport> {
    check_count(n_points)?;
    region.validate()?;
    let ca = c_alpha(alpha)?;
    let d = obj.dim();
    let mut g = vec![0.0; d];
    let mut report = GrowthReport {
        min_slack: f64::INFINITY,
        worst_point: vec![0.0; d],
        passed: true,
    };
    for i in 0..n_points {
        let x = probe_point(i, d, region, rng);
        obj.grad_into(&x, &mut g);
        let slack = big_m * norm(&x).powf(gamma) + big_b - ca * norm(&g);
        if slack < report.min_slack {
            report.min_slack = slack;
            report.worst_point = x;
        }
    }
    report.passed = report.min_slack >= 0.0;
    Ok(report)
}
