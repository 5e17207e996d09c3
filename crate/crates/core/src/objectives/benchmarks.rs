use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{norm, Certificate, FiniteSum, Minimizer, Objective};
use crate::seeding::stream;
use crate::{Error, Result};

pub const BENCHMARK_NAMES: [&str; 4] = [
    "fractional_power_well",
    "double_well_1d",
    "perturbed_fractional",
    "finite_sum_well",
];

/// Named real parameters of a benchmark; absent names take defaults.
pub type BenchmarkParams = BTreeMap<String, f64>;

/// Build a registered benchmark.
///
/// | name | parameters (defaults) |
/// |---|---|
/// | `fractional_power_well` | `a` (1), `eps0` (0.01), `gamma` (0.3) |
/// | `double_well_1d` | `c` (0.2), `gamma` (0.3); `dim` must be 1 |
/// | `perturbed_fractional` | well parameters plus `kappa` (0.5), `omega` (4), `shift` (0.5) |
/// | `finite_sum_well` | well parameters plus `n` (32), `radius` (1), `center_seed` (0) |
pub fn make_benchmark(
    name: &str,
    dim: usize,
    params: &BenchmarkParams,
) -> Result<Box<dyn Objective>> {
    let allowed: &[&str] = match name {
        "fractional_power_well" => &["a", "eps0", "gamma"],
        "double_well_1d" => &["c", "gamma"],
        "perturbed_fractional" => &["a", "eps0", "gamma", "kappa", "omega", "shift"],
        "finite_sum_well" => &["a", "eps0", "gamma", "n", "radius", "center_seed"],
        _ => return Err(Error::UnknownBenchmark(name.to_string())),
    };
    if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::param(format!(
            "benchmark `{name}` has no parameter `{bad}` (expected one of {allowed:?})"
        )));
    }
    let get = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
    let a = get("a", 1.0);
    let eps0 = get("eps0", 0.01);
    let gamma = get("gamma", 0.3);
    Ok(match name {
        "fractional_power_well" => Box::new(FractionalPowerWell::new(dim, a, eps0, gamma)?),
        "double_well_1d" => {
            if dim != 1 {
                return Err(Error::param(format!("double_well_1d requires dim = 1, got {dim}")));
            }
            Box::new(DoubleWell1d::new(get("c", 0.2), gamma)?)
        }
        "perturbed_fractional" => Box::new(PerturbedFractional::new(
            dim,
            a,
            eps0,
            gamma,
            get("kappa", 0.5),
            get("omega", 4.0),
            get("shift", 0.5),
        )?),
        _ => {
            let n = as_count("n", get("n", 32.0))?;
            let seed = as_count("center_seed", get("center_seed", 0.0))? as u64;
            Box::new(FiniteSumWell::new(dim, a, eps0, gamma, n, get("radius", 1.0), seed)?)
        }
    })
}

fn as_count(key: &str, v: f64) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v < 1e15 {
        Ok(v as usize)
    } else {
        Err(Error::param(format!("`{key}` must be a non-negative integer, got {v}")))
    }
}

fn check_well(dim: usize, a: f64, eps0: f64, gamma: f64) -> Result<()> {
    if dim == 0 {
        return Err(Error::param("dimension must be positive"));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::param(format!("a must be positive, got {a}")));
    }
    if !(eps0 > 0.0 && eps0.is_finite()) {
        return Err(Error::param(format!("eps0 must be positive, got {eps0}")));
    }
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::param(format!("gamma must lie in [0, 1), got {gamma}")));
    }
    Ok(())
}

/// Radial profile `a (ε₀ + r²)^{(1+γ)/2}` shared by the well-type benchmarks.
#[derive(Debug, Clone, Copy)]
struct Profile {
    a: f64,
    eps0: f64,
    gamma: f64,
}

impl Profile {
    fn p(&self) -> f64 {
        1.0 + self.gamma
    }

    fn value_r2(&self, r2: f64) -> f64 {
        self.a * (self.eps0 + r2).powf(0.5 * self.p())
    }

    /// `∇f(y) = factor(‖y‖²) · y`.
    fn grad_factor(&self, r2: f64) -> f64 {
        self.a * self.p() * (self.eps0 + r2).powf(0.5 * (self.gamma - 1.0))
    }

    /// `a p 2^{1−γ}`: sharp Hölder constant of `y ↦ r^{γ−1}`-type fields.
    fn holder(&self) -> f64 {
        self.a * self.p() * 2f64.powf(1.0 - self.gamma)
    }

    /// Dissipativity offset for `m = a p / 2`. Below the radius where
    /// `(r²/(ε₀+r²))^{(1−γ)/2} = 1/2` the inner product is dropped entirely.
    fn b_half(&self) -> f64 {
        let s = 2f64.powf(-2.0 / (1.0 - self.gamma));
        0.5 * self.a * self.p() * (self.eps0 * s / (1.0 - s)).powf(0.5 * self.p())
    }
}

/// `f(x) = a (ε₀ + ‖x‖²)^{(1+γ)/2}`; the gradient is globally `γ`-Hölder.
#[derive(Debug, Clone)]
pub struct FractionalPowerWell {
    dim: usize,
    profile: Profile,
    minimizer: Minimizer,
}

impl FractionalPowerWell {
    pub fn new(dim: usize, a: f64, eps0: f64, gamma: f64) -> Result<Self> {
        check_well(dim, a, eps0, gamma)?;
        let profile = Profile { a, eps0, gamma };
        Ok(Self {
            dim,
            profile,
            minimizer: Minimizer {
                x: vec![0.0; dim],
                f: profile.value_r2(0.0),
            },
        })
    }
}

impl Objective for FractionalPowerWell {
    fn name(&self) -> &str {
        "fractional_power_well"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.profile.value_r2(x.iter().map(|v| v * v).sum())
    }

    fn grad_into(&self, x: &[f64], out: &mut [f64]) {
        let k = self.profile.grad_factor(x.iter().map(|v| v * v).sum());
        for (o, v) in out.iter_mut().zip(x) {
            *o = k * v;
        }
    }

    fn certificate(&self) -> Option<Certificate> {
        let p = &self.profile;
        Some(Certificate {
            holder: p.holder(),
            gamma: p.gamma,
            m: 0.5 * p.a * p.p(),
            b: p.b_half(),
            grad_origin: 0.0,
            local_box: None,
        })
    }

    fn minimizer(&self) -> Option<&Minimizer> {
        Some(&self.minimizer)
    }
}

/// `f(x) = (x² − 1)² + c x` on the real line, `0 < c < 1/2`.
///
/// Two basins; the global minimum sits near `−1` and the shallow one near
/// `+1`. The quartic gradient is not globally Hölder, so the certificate is
/// local to `[−2, 2]`.
#[derive(Debug, Clone)]
pub struct DoubleWell1d {
    c: f64,
    gamma: f64,
    minimizer: Minimizer,
    shallow: f64,
    b: f64,
}

impl DoubleWell1d {
    pub const BOX: (f64, f64) = (-2.0, 2.0);

    pub fn new(c: f64, gamma: f64) -> Result<Self> {
        if !(c > 0.0 && c < 0.5) {
            return Err(Error::param(format!("c must lie in (0, 0.5), got {c}")));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::param(format!("gamma must lie in [0, 1), got {gamma}")));
        }
        let x_star = newton_root(c, -1.0);
        let shallow = newton_root(c, 1.0);
        let f = |x: f64| (x * x - 1.0).powi(2) + c * x;
        // b = sup_{|x|≤2} (|x|^{1+γ} − x f'(x)) with m = 1, on a fine grid
        // plus a cushion covering the grid spacing.
        let n = 400_000;
        let (lo, hi) = Self::BOX;
        let mut worst = f64::NEG_INFINITY;
        for i in 0..=n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            let fp = 4.0 * x * x * x - 4.0 * x + c;
            worst = worst.max(x.abs().powf(1.0 + gamma) - x * fp);
        }
        Ok(Self {
            c,
            gamma,
            minimizer: Minimizer {
                x: vec![x_star],
                f: f(x_star),
            },
            shallow,
            b: worst.max(0.0) + 1e-3,
        })
    }

    /// Local minimizer of the shallow basin.
    pub fn shallow_minimizer(&self) -> f64 {
        self.shallow
    }

    /// Location of the barrier between the two basins.
    pub fn barrier(&self) -> f64 {
        newton_root(self.c, 0.0)
    }
}

/// Root of `4x³ − 4x + c` reached by Newton iteration from `x0`.
fn newton_root(c: f64, x0: f64) -> f64 {
    let mut x = x0;
    for _ in 0..100 {
        let g = 4.0 * x * x * x - 4.0 * x + c;
        let h = 12.0 * x * x - 4.0;
        let next = x - g / h;
        if (next - x).abs() < 1e-15 {
            return next;
        }
        x = next;
    }
    x
}

impl Objective for DoubleWell1d {
    fn name(&self) -> &str {
        "double_well_1d"
    }

    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &[f64]) -> f64 {
        let x = x[0];
        (x * x - 1.0).powi(2) + self.c * x
    }

    fn grad_into(&self, x: &[f64], out: &mut [f64]) {
        let x = x[0];
        out[0] = 4.0 * x * x * x - 4.0 * x + self.c;
    }

    fn certificate(&self) -> Option<Certificate> {
        // |f''| ≤ 44 on the box, and |x − y|^{1−γ} ≤ 4^{1−γ} there.
        Some(Certificate {
            holder: 44.0 * 4f64.powf(1.0 - self.gamma),
            gamma: self.gamma,
            m: 1.0,
            b: self.b,
            grad_origin: self.c,
            local_box: Some(Self::BOX),
        })
    }

    fn minimizer(&self) -> Option<&Minimizer> {
        Some(&self.minimizer)
    }
}

/// Fractional power well plus a cosine ripple
/// `κ Σ_i (1 − cos(ω (x_i − s)))`, multimodal for the default parameters.
#[derive(Debug, Clone)]
pub struct PerturbedFractional {
    dim: usize,
    profile: Profile,
    kappa: f64,
    omega: f64,
    shift: f64,
    minimizer: Option<Minimizer>,
}

impl PerturbedFractional {
    pub fn new(
        dim: usize,
        a: f64,
        eps0: f64,
        gamma: f64,
        kappa: f64,
        omega: f64,
        shift: f64,
    ) -> Result<Self> {
        check_well(dim, a, eps0, gamma)?;
        if gamma == 0.0 {
            return Err(Error::param(
                "perturbed_fractional needs gamma > 0 to remain dissipative",
            ));
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::param(format!("kappa must be non-negative, got {kappa}")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::param(format!("omega must be positive, got {omega}")));
        }
        if !shift.is_finite() {
            return Err(Error::param("shift must be finite"));
        }
        let mut obj = Self {
            dim,
            profile: Profile { a, eps0, gamma },
            kappa,
            omega,
            shift,
            minimizer: None,
        };
        if dim <= 2 {
            let x = obj.grid_minimize();
            obj.minimizer = Some(Minimizer {
                f: obj.value(&x),
                x,
            });
        }
        Ok(obj)
    }

    fn ripple_grad_bound(&self) -> f64 {
        self.kappa * self.omega * (self.dim as f64).sqrt()
    }

    /// Grid search over the sublevel set `{f ≤ f(0)}`, then repeated local
    /// refinement around the incumbent.
    fn grid_minimize(&self) -> Vec<f64> {
        let f0 = self.value(&vec![0.0; self.dim]);
        // f ≥ a r^{1+γ}, so every point beating the origin lies in this ball.
        let radius = (f0 / self.profile.a).powf(1.0 / self.profile.p()) + 1e-9;
        let period = 2.0 * std::f64::consts::PI / self.omega;
        let per_axis = match self.dim {
            1 => ((2.0 * radius / period) * 200.0).ceil().max(2001.0) as usize,
            _ => ((2.0 * radius / period) * 40.0).ceil().max(401.0) as usize,
        };
        let mut best = vec![0.0; self.dim];
        let mut best_f = f0;
        let mut h = 2.0 * radius / per_axis as f64;
        self.scan(&vec![-radius; self.dim], h, per_axis, &mut best, &mut best_f);
        for _ in 0..40 {
            let lo: Vec<f64> = best.iter().map(|b| b - 2.0 * h).collect();
            let step = h / 5.0;
            self.scan(&lo, step, 20, &mut best, &mut best_f);
            h = step;
            if h < 1e-13 {
                break;
            }
        }
        best
    }

    fn scan(&self, lo: &[f64], h: f64, n: usize, best: &mut [f64], best_f: &mut f64) {
        let mut x = lo.to_vec();
        let mut visit = |x: &[f64]| {
            let v = self.value(x);
            if v < *best_f {
                *best_f = v;
                best.copy_from_slice(x);
            }
        };
        if self.dim == 1 {
            for i in 0..=n {
                x[0] = lo[0] + h * i as f64;
                visit(&x);
            }
        } else {
            for i in 0..=n {
                x[0] = lo[0] + h * i as f64;
                for j in 0..=n {
                    x[1] = lo[1] + h * j as f64;
                    visit(&x);
                }
            }
        }
    }
}

impl Objective for PerturbedFractional {
    fn name(&self) -> &str {
        "perturbed_fractional"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let ripple: f64 = x
            .iter()
            .map(|v| 1.0 - (self.omega * (v - self.shift)).cos())
            .sum();
        self.profile.value_r2(x.iter().map(|v| v * v).sum()) + self.kappa * ripple
    }

    fn grad_into(&self, x: &[f64], out: &mut [f64]) {
        let k = self.profile.grad_factor(x.iter().map(|v| v * v).sum());
        let ko = self.kappa * self.omega;
        for (o, v) in out.iter_mut().zip(x) {
            *o = k * v + ko * (self.omega * (v - self.shift)).sin();
        }
    }

    fn certificate(&self) -> Option<Certificate> {
        let p = &self.profile;
        let g = p.gamma;
        // Ripple gradient differences are at most min(κω²‖Δ‖, 2κω√d).
        let ripple_holder = (self.kappa * self.omega * self.omega).powf(g)
            * (2.0 * self.ripple_grad_bound()).powf(1.0 - g);
        // With m = ap/4 the well keeps ap/4 r^{1+γ} spare against the ripple's
        // −K r, whose worst deficit is K r* γ/(1+γ).
        let k = self.ripple_grad_bound();
        let c = 0.25 * p.a * p.p();
        let r_star = (k / (c * (1.0 + g))).powf(1.0 / g);
        Some(Certificate {
            holder: p.holder() + ripple_holder,
            gamma: g,
            m: c,
            b: p.b_half() + k * r_star * g / (1.0 + g),
            grad_origin: k * (self.omega * self.shift).sin().abs(),
            local_box: None,
        })
    }

    fn minimizer(&self) -> Option<&Minimizer> {
        self.minimizer.as_ref()
    }
}

/// Average of shifted wells `f_i(x) = a (ε₀ + ‖x − ξ_i‖²)^{(1+γ)/2}` with
/// centres in `±` pairs, so `∇f(0) = 0` and the minimizer is the origin.
#[derive(Debug, Clone)]
pub struct FiniteSumWell {
    dim: usize,
    profile: Profile,
    centers: Vec<Vec<f64>>,
    radius: f64,
    minimizer: Minimizer,
}

impl FiniteSumWell {
    /// `n` (even) centres with norms in `[radius/2, radius]`, drawn from the
    /// stream of `center_seed`.
    pub fn new(
        dim: usize,
        a: f64,
        eps0: f64,
        gamma: f64,
        n: usize,
        radius: f64,
        center_seed: u64,
    ) -> Result<Self> {
        check_well(dim, a, eps0, gamma)?;
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::param(format!("n must be a positive even count, got {n}")));
        }
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::param(format!("radius must be non-negative, got {radius}")));
        }
        let mut rng = stream(center_seed);
        let mut centers = Vec::with_capacity(n);
        for _ in 0..n / 2 {
            let u: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let len = norm(&u).max(f64::MIN_POSITIVE);
            let r = radius * (0.5 + 0.5 * rng.random::<f64>());
            let xi: Vec<f64> = u.iter().map(|v| r * v / len).collect();
            centers.push(xi.iter().map(|v| -v).collect());
            centers.push(xi);
        }
        let radius = centers.iter().map(|c| norm(c)).fold(0.0, f64::max);
        let mut obj = Self {
            dim,
            profile: Profile { a, eps0, gamma },
            centers,
            radius,
            minimizer: Minimizer { x: vec![0.0; dim], f: 0.0 },
        };
        obj.minimizer.f = obj.value(&vec![0.0; dim]);
        Ok(obj)
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }
}

impl FiniteSum for FiniteSumWell {
    fn n_components(&self) -> usize {
        self.centers.len()
    }

    fn component_value(&self, i: usize, x: &[f64]) -> f64 {
        let r2 = x.iter().zip(&self.centers[i]).map(|(v, c)| (v - c) * (v - c)).sum();
        self.profile.value_r2(r2)
    }

    fn component_grad_into(&self, i: usize, x: &[f64], out: &mut [f64]) {
        let c = &self.centers[i];
        let r2 = x.iter().zip(c).map(|(v, c)| (v - c) * (v - c)).sum();
        let k = self.profile.grad_factor(r2);
        for ((o, v), c) in out.iter_mut().zip(x).zip(c) {
            *o = k * (v - c);
        }
    }
}

impl Objective for FiniteSumWell {
    fn name(&self) -> &str {
        "finite_sum_well"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let n = self.centers.len();
        (0..n).map(|i| self.component_value(i, x)).sum::<f64>() / n as f64
    }

    fn grad_into(&self, x: &[f64], out: &mut [f64]) {
        let all: Vec<usize> = (0..self.centers.len()).collect();
        self.batch_grad_into(&all, x, out);
    }

    fn finite_sum(&self) -> Option<&dyn FiniteSum> {
        Some(self)
    }

    fn certificate(&self) -> Option<Certificate> {
        let p = &self.profile;
        let g = p.gamma;
        let ap = p.a * p.p();
        let r = self.radius;
        // Per component, with y = x − ξ: ⟨x, ∇f_i⟩ ≥ ap/2 ‖y‖^{1+γ} − apR‖y‖^γ − b_half
        // and ‖x‖^{1+γ} ≤ 2(‖y‖^{1+γ} + R^{1+γ}).
        let s_star = 4.0 * r * g / (1.0 + g);
        Some(Certificate {
            holder: p.holder(),
            gamma: g,
            m: ap / 8.0,
            b: p.b_half() + 0.25 * ap * r.powf(1.0 + g) + ap * r * s_star.powf(g) / (1.0 + g),
            grad_origin: norm(&self.grad(&vec![0.0; self.dim])),
            local_box: None,
        })
    }

    fn minimizer(&self) -> Option<&Minimizer> {
        Some(&self.minimizer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_rejects_unknown_and_bad_params() {
        let p = BenchmarkParams::new();
        assert!(matches!(
            make_benchmark("rosenbrock", 2, &p),
            Err(Error::UnknownBenchmark(_))
        ));
        assert!(make_benchmark("double_well_1d", 2, &p).is_err());
        let mut bad = BenchmarkParams::new();
        bad.insert("colour".into(), 1.0);
        assert!(make_benchmark("fractional_power_well", 2, &bad).is_err());
        bad.clear();
        bad.insert("gamma".into(), 1.0);
        assert!(make_benchmark("fractional_power_well", 2, &bad).is_err());
        for name in BENCHMARK_NAMES {
            let dim = if name == "double_well_1d" { 1 } else { 2 };
            let obj = make_benchmark(name, dim, &p).unwrap();
            assert_eq!(obj.name(), name);
            assert_eq!(obj.dim(), dim);
        }
    }

    #[test]
    fn well_gradient_vanishes_at_origin() {
        let w = FractionalPowerWell::new(3, 1.0, 0.01, 0.3).unwrap();
        assert_eq!(w.grad(&[0.0; 3]), vec![0.0; 3]);
        assert_eq!(w.certificate().unwrap().grad_origin, 0.0);
    }

    #[test]
    fn double_well_basins() {
        let dw = DoubleWell1d::new(0.2, 0.3).unwrap();
        let xs = dw.minimizer().unwrap().x[0];
        assert!((xs + 1.025).abs() < 5e-3, "{xs}");
        assert!(dw.value(&[xs]) < dw.value(&[dw.shallow_minimizer()]));
        assert!(dw.barrier() > xs && dw.barrier() < dw.shallow_minimizer());
        assert!(dw.certificate().unwrap().is_local());
    }

    #[test]
    fn finite_sum_centres_pair_up() {
        let fs = FiniteSumWell::new(2, 1.0, 0.01, 0.3, 10, 2.0, 3).unwrap();
        for pair in fs.centers().chunks(2) {
            assert_eq!(pair[0][0], -pair[1][0]);
            assert!(norm(&pair[1]) <= 2.0 + 1e-12 && norm(&pair[1]) >= 1.0 - 1e-12);
        }
        assert!(fs.certificate().unwrap().grad_origin < 1e-12);
    }
}
