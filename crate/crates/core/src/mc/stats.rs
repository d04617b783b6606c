//! Empirical point estimates with confidence intervals.

use super::rng::{par_map_gaussian, GaussianStreams};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A Monte Carlo estimate with 95% interval and seed provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmpiricalEstimate {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
    pub seed: u64,
    pub statistic: String,
}

const Z95: f64 = 1.959963984540054;

/// Median with a binomial order-statistic 95% interval from an unsorted
/// value list.
pub fn empirical_median(
    mut values: Vec<f64>,
    seed: u64,
    statistic: impl Into<String>,
) -> Result<EmpiricalEstimate> {
    let s = values.len();
    if s < 100 {
        return Err(Error::InvalidParams(format!("need >= 100 samples for a median, got {s}")));
    }
    values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN sample"));
    let point = if s % 2 == 1 {
        values[s / 2]
    } else {
        0.5 * (values[s / 2 - 1] + values[s / 2])
    };
    // normal approximation to Binomial(s, 1/2) quantiles
    let half = 0.5 * Z95 * (s as f64).sqrt();
    let lo = ((s as f64 / 2.0 - half).floor().max(0.0)) as usize;
    let hi = (((s as f64 / 2.0 + half).ceil()) as usize).min(s - 1);
    Ok(EmpiricalEstimate {
        point,
        ci_low: values[lo],
        ci_high: values[hi],
        samples: s,
        seed,
        statistic: statistic.into(),
    })
}

/// Median of `statistic(x)` over Gaussian samples in dimension `n`.
pub fn empirical_median_of(
    statistic: impl Fn(Vec<f64>) -> f64 + Sync,
    n: usize,
    samples: usize,
    seed: u64,
    name: impl Into<String>,
) -> Result<EmpiricalEstimate> {
    let streams = GaussianStreams::new(seed);
    let values = par_map_gaussian(&streams, samples, n, |_, x| statistic(x));
    empirical_median(values, seed, name)
}

/// Wilson score interval for a proportion at 95%.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = phat + z2 / (2.0 * n);
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    (((centre - half) / denom).max(0.0), ((centre + half) / denom).min(1.0))
}

/// Proportion estimate with a Wilson 95% interval.
pub fn proportion_estimate(
    successes: usize,
    trials: usize,
    seed: u64,
    statistic: impl Into<String>,
) -> Result<EmpiricalEstimate> {
    if trials < 100 {
        return Err(Error::InvalidParams(format!("need >= 100 samples, got {trials}")));
    }
    let (lo, hi) = wilson_interval(successes, trials);
    Ok(EmpiricalEstimate {
        point: successes as f64 / trials as f64,
        ci_low: lo,
        ci_high: hi,
        samples: trials,
        seed,
        statistic: statistic.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_first_coordinate_is_near_zero() {
        let est = empirical_median_of(|x| x[0], 4, 20_000, crate::DEFAULT_SEED, "x1").unwrap();
        assert!(est.point.abs() < 4.0 / (est.samples as f64).sqrt() * 1.5, "{}", est.point);
        assert!(est.ci_low <= est.point && est.point <= est.ci_high);
    }

    #[test]
    fn chi_median_ratio() {
        // median |X|_2 at n = 1e4 is within 1% of sqrt(n)
        let n = 10_000usize;
        let est = empirical_median_of(
            |x| x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            n,
            2_000,
            crate::DEFAULT_SEED,
            "|x|_2",
        )
        .unwrap();
        let ratio = est.point / (n as f64).sqrt();
        assert!((0.99..=1.01).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn median_is_deterministic() {
        let a = empirical_median_of(|x| x[1], 3, 500, 99, "d").unwrap();
        let b = empirical_median_of(|x| x[1], 3, 500, 99, "d").unwrap();
        assert_eq!(a.point.to_bits(), b.point.to_bits());
    }

    #[test]
    fn small_samples_rejected() {
        assert!(empirical_median(vec![1.0; 50], 0, "s").is_err());
        assert!(proportion_estimate(1, 50, 0, "s").is_err());
    }

    #[test]
    fn wilson_basics() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && 0.5 < hi);
        let (lo, _) = wilson_interval(0, 1000);
        assert!(lo.abs() < 1e-12);
        let (_, hi) = wilson_interval(1000, 1000);
        assert!((hi - 1.0).abs() < 1e-12);
        // zero successes still give a usable upper bound
        let (_, hi) = wilson_interval(0, 1000);
        assert!(hi > 0.0 && hi < 0.01);
    }
}
