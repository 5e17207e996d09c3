//! Closed-form objectives used as test fixtures and analytic references.

use super::{Minimizer, Objective};

/// `f(x) = (κ/2) ‖x‖²`; `κ` may be negative.
#[derive(Debug, Clone)]
pub struct Quadratic {
    dim: usize,
    curvature: f64,
    minimizer: Option<Minimizer>,
}

impl Quadratic {
    pub fn new(dim: usize, curvature: f64) -> Self {
        let minimizer = (curvature >= 0.0).then(|| Minimizer {
            x: vec![0.0; dim],
            f: 0.0,
        });
        Self {
            dim,
            curvature,
            minimizer,
        }
    }
}

impl Objective for Quadratic {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.curvature * x.iter().map(|v| v * v).sum::<f64>()
    }

    fn grad_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, v) in out.iter_mut().zip(x) {
            *o = self.curvature * v;
        }
    }

    fn minimizer(&self) -> Option<&Minimizer> {
        self.minimizer.as_ref()
    }
}

/// `f(x) = ⟨v, x⟩`.
#[derive(Debug, Clone)]
pub struct Linear {
    slope: Vec<f64>,
}

impl Linear {
    pub fn new(slope: Vec<f64>) -> Self {
        Self { slope }
    }
}

impl Objective for Linear {
    fn name(&self) -> &str {
        "linear"
    }

    fn dim(&self) -> usize {
        self.slope.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.slope.iter().zip(x).map(|(s, v)| s * v).sum()
    }

    fn grad_into(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.slope);
    }
}

/// `f(x) = value`; every point is a minimizer.
#[derive(Debug, Clone)]
pub struct Constant {
    dim: usize,
    value: f64,
    minimizer: Minimizer,
}

impl Constant {
    pub fn new(dim: usize, value: f64) -> Self {
        Self {
            dim,
            value,
            minimizer: Minimizer {
                x: vec![0.0; dim],
                f: value,
            },
        }
    }
}

impl Objective for Constant {
    fn name(&self) -> &str {
        "constant"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, _x: &[f64]) -> f64 {
        self.value
    }

    fn grad_into(&self, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }

    fn minimizer(&self) -> Option<&Minimizer> {
        Some(&self.minimizer)
    }
}
