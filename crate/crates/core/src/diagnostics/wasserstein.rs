use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::EmpiricalDistribution;
use crate::{Error, Result};

fn check_q(q: f64) -> Result<()> {
    if q >= 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("q must be at least 1, got {q}")))
    }
}

/// `((1/N) Σ |a_(i) − b_(i)|^q)^{1/q}` over order statistics.
fn sorted_distance(mut a: Vec<f64>, mut b: Vec<f64>, q: f64) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let n = a.len() as f64;
    let s: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs().powf(q)).sum();
    (s / n).powf(1.0 / q)
}

/// Exact `W_q` between two one-dimensional empirical measures of equal size.
pub fn wasserstein_q_1d(
    a: &EmpiricalDistribution,
    b: &EmpiricalDistribution,
    q: f64,
) -> Result<f64> {
    check_q(q)?;
    let (xa, xb) = match (a.scalars(), b.scalars()) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(Error::param("wasserstein_q_1d needs one-dimensional samples")),
    };
    if xa.len() != xb.len() {
        return Err(Error::param(format!(
            "sample counts differ ({} vs {}); use wasserstein_q_1d_resampled",
            xa.len(),
            xb.len()
        )));
    }
    Ok(sorted_distance(xa.to_vec(), xb.to_vec(), q))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WassersteinReport {
    pub value: f64,
    /// `(original, reduced)` size of the side that was down-sampled.
    pub resampled: Option<(usize, usize)>,
}

/// Down-samples the larger side without replacement, then
/// `wasserstein_q_1d`.
pub fn wasserstein_q_1d_resampled<R: Rng + ?Sized>(
    a: &EmpiricalDistribution,
    b: &EmpiricalDistribution,
    q: f64,
    rng: &mut R,
) -> Result<WassersteinReport> {
    let (a, b, resampled) = equalize(a, b, rng);
    Ok(WassersteinReport {
        value: wasserstein_q_1d(&a, &b, q)?,
        resampled,
    })
}

fn equalize<R: Rng + ?Sized>(
    a: &EmpiricalDistribution,
    b: &EmpiricalDistribution,
    rng: &mut R,
) -> (EmpiricalDistribution, EmpiricalDistribution, Option<(usize, usize)>) {
    let (na, nb) = (a.len(), b.len());
    if na == nb {
        return (a.clone(), b.clone(), None);
    }
    let n = na.min(nb);
    let big = if na > nb { a } else { b };
    let idx = rand::seq::index::sample(rng, big.len(), n).into_vec();
    let reduced = big.select(&idx);
    let info = Some((big.len(), n));
    if na > nb {
        (reduced, b.clone(), info)
    } else {
        (a.clone(), reduced, info)
    }
}

/// Mean over `n_projections` uniform random directions of the `W_q` between
/// projected samples. In one dimension every direction is `±1`, so the
/// result is `wasserstein_q_1d` itself and `rng` is not used.
pub fn sliced_wasserstein_q<R: Rng + ?Sized>(
    a: &EmpiricalDistribution,
    b: &EmpiricalDistribution,
    q: f64,
    n_projections: usize,
    rng: &mut R,
) -> Result<f64> {
    check_q(q)?;
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    if n_projections == 0 {
        return Err(Error::param("n_projections must be at least 1"));
    }
    let (a, b, _) = equalize(a, b, rng);
    if a.dim() == 1 {
        return wasserstein_q_1d(&a, &b, q);
    }
    let d = a.dim();
    let mut total = 0.0;
    for _ in 0..n_projections {
        let u = loop {
            let u: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let n = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 1e-12 {
                break u.into_iter().map(|v| v / n).collect::<Vec<_>>();
            }
        };
        total += sorted_distance(a.project(&u), b.project(&u), q);
    }
    Ok(total / n_projections as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::stream;

    fn scalars(v: &[f64]) -> EmpiricalDistribution {
        EmpiricalDistribution::from_scalars(v.to_vec(), "t").unwrap()
    }

    #[test]
    fn identical_and_point_masses() {
        let a = scalars(&[0.3, -1.0, 2.0]);
        assert_eq!(wasserstein_q_1d(&a, &a, 1.5).unwrap(), 0.0);
        let z = scalars(&[0.0; 5]);
        let o = scalars(&[1.0; 5]);
        for q in [1.0, 1.3, 2.0, 7.0] {
            assert!((wasserstein_q_1d(&z, &o, q).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!(wasserstein_q_1d(&z, &o, 0.5).is_err());
    }

    #[test]
    fn unequal_sizes_are_reported() {
        let a = scalars(&[0.0; 10]);
        let b = scalars(&[1.0; 4]);
        assert!(wasserstein_q_1d(&a, &b, 1.0).is_err());
        let r = wasserstein_q_1d_resampled(&a, &b, 1.0, &mut stream(0)).unwrap();
        assert_eq!(r.resampled, Some((10, 4)));
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn sliced_in_one_dimension_is_exact() {
        let a = scalars(&[0.1, 0.5, -2.0, 3.0]);
        let b = scalars(&[1.0, 0.0, 0.2, -0.7]);
        let exact = wasserstein_q_1d(&a, &b, 1.4).unwrap();
        for n in [1, 7, 50] {
            assert_eq!(sliced_wasserstein_q(&a, &b, 1.4, n, &mut stream(n as u64)).unwrap(), exact);
        }
    }

    #[test]
    fn sliced_dimension_mismatch() {
        let a = scalars(&[0.0]);
        let b = EmpiricalDistribution::new(&[vec![0.0, 1.0]], "b").unwrap();
        assert!(matches!(
            sliced_wasserstein_q(&a, &b, 1.0, 3, &mut stream(0)),
            Err(Error::DimensionMismatch(1, 2))
        ));
    }
}
