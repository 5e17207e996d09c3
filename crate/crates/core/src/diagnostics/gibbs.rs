use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::objectives::Objective;
use crate::{Error, Result};

/// Tolerated tail-mass proxy outside the grid.
const TAIL_TOLERANCE: f64 = 1e-8;

/// `π(x) ∝ exp(−β f(x))` on a uniform grid, normalized by the trapezoid rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsReference1D {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    /// Cumulative trapezoid integral; starts at 0 and ends at exactly 1.
    pub cdf: Vec<f64>,
    /// `(π(lo) + π(hi)) · (hi − lo)`, a proxy for the mass outside the grid.
    pub tail_mass: f64,
}

/// Quadrature reference for a one-dimensional objective. Fails with
/// [`Error::Coverage`] when the endpoint density suggests more than `1e-8`
/// of the mass lies outside `[lo, hi]`.
pub fn gibbs_reference_1d(
    obj: &dyn Objective,
    beta: f64,
    lo: f64,
    hi: f64,
    n_grid: usize,
) -> Result<GibbsReference1D> {
    if obj.dim() != 1 {
        return Err(Error::DimensionMismatch(obj.dim(), 1));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::param(format!("beta must be positive, got {beta}")));
    }
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::param(format!("grid [{lo}, {hi}] is degenerate")));
    }
    if n_grid < 3 {
        return Err(Error::param("n_grid must be at least 3"));
    }
    let h = (hi - lo) / (n_grid - 1) as f64;
    let grid: Vec<f64> = (0..n_grid).map(|i| lo + h * i as f64).collect();
    let log_w: Vec<f64> = grid.iter().map(|&x| -beta * obj.value(&[x])).collect();
    let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Err(Error::NonFinite { state: vec![top] });
    }
    let mut density: Vec<f64> = log_w.iter().map(|l| (l - top).exp()).collect();
    let mut cdf = Vec::with_capacity(n_grid);
    cdf.push(0.0);
    for i in 1..n_grid {
        cdf.push(cdf[i - 1] + 0.5 * h * (density[i - 1] + density[i]));
    }
    let z = cdf[n_grid - 1];
    density.iter_mut().for_each(|p| *p /= z);
    cdf.iter_mut().for_each(|c| *c /= z);
    cdf[n_grid - 1] = 1.0;
    let tail_mass = (density[0] + density[n_grid - 1]) * (hi - lo);
    if tail_mass > TAIL_TOLERANCE {
        return Err(Error::Coverage { tail_mass });
    }
    Ok(GibbsReference1D {
        grid,
        density,
        cdf,
        tail_mass,
    })
}

impl GibbsReference1D {
    fn step(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// Trapezoid integral of `g π`.
    pub fn expectation(&self, g: impl Fn(f64) -> f64) -> f64 {
        let h = self.step();
        let n = self.grid.len();
        let mut s = 0.0;
        for i in 0..n {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            s += w * g(self.grid[i]) * self.density[i];
        }
        s * h
    }

    /// Trapezoid integral of `π` over `[center − radius, center + radius]`,
    /// interpolating the CDF at the ends.
    pub fn mass_within(&self, center: f64, radius: f64) -> f64 {
        self.cdf_at(center + radius) - self.cdf_at(center - radius)
    }

    /// Piecewise-linear CDF.
    pub fn cdf_at(&self, x: f64) -> f64 {
        let (lo, hi) = (self.grid[0], *self.grid.last().unwrap());
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let t = (x - lo) / self.step();
        let i = (t.floor() as usize).min(self.grid.len() - 2);
        let frac = t - i as f64;
        self.cdf[i] + frac * (self.cdf[i + 1] - self.cdf[i])
    }

    /// Inverse of the piecewise-linear CDF.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let i = self.cdf.partition_point(|&c| c < u);
        if i == 0 {
            return self.grid[0];
        }
        if i >= self.cdf.len() {
            return *self.grid.last().unwrap();
        }
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        self.grid[i - 1] + frac * self.step()
    }

    /// Inverse-CDF draws.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.quantile(rng.random())).collect()
    }
}
