//! Empirical verification of the order-statistic envelopes, the coverage
//! claim of the main bound, and the sharpness profile of the target tail.

use super::rng::{par_map_gaussian, GaussianStreams};
use super::stats::{proportion_estimate, EmpiricalEstimate};
use crate::lorentz::{psi_sorted, sphere_sup};
use crate::params::Params;
use crate::rearrange::rearrange;
use crate::sharp::{BoundCertificate, SharpNorm};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Half-range limit of the order-statistic claims: indices `1..=(n+1)/2`.
fn half_range(n: usize) -> usize {
    (n + 1) / 2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub n: usize,
    pub t: f64,
    pub constant_used: f64,
    pub empirical_violation_prob: EmpiricalEstimate,
    pub target: f64,
}

/// Probability that some order statistic in the first half exceeds
/// `constant * (ln(n/i) + t^2/i)^{1/2}`, against the target `2 exp(-t^2)`.
pub fn order_stat_envelope_check(
    n: usize,
    t: f64,
    constant: f64,
    samples: usize,
    seed: u64,
) -> Result<EnvelopeReport> {
    if n < 3 || t < 0.0 {
        return Err(Error::InvalidParams(format!("need n >= 3, t >= 0, got n={n} t={t}")));
    }
    let half = half_range(n);
    let envelope: Vec<f64> = (1..=half)
        .map(|i| constant * ((n as f64 / i as f64).ln() + t * t / i as f64).sqrt())
        .collect();
    let streams = GaussianStreams::new(seed);
    let flags = par_map_gaussian(&streams, samples, n, |_, x| {
        let sorted = rearrange(&x).expect("nonempty");
        sorted.values()[..half].iter().zip(&envelope).any(|(v, e)| v > e)
    });
    let violations = flags.iter().filter(|f| **f).count();
    Ok(EnvelopeReport {
        n,
        t,
        constant_used: constant,
        empirical_violation_prob: proportion_estimate(
            violations,
            samples,
            seed,
            format!("orderstat violation n={n} t={t}"),
        )?,
        target: 2.0 * (-t * t).exp(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandReport {
    pub n: usize,
    pub c_low: f64,
    pub c_high: f64,
    pub inside: EmpiricalEstimate,
    pub threshold: f64,
    pub pass: bool,
}

/// Probability that every order statistic in the first half lies inside the
/// band `[c sqrt(ln n/i), C sqrt(ln n/i)]`; passes when the estimate clears
/// `0.51` up to the interval width.
pub fn simultaneous_median_band_check(
    n: usize,
    samples: usize,
    seed: u64,
    c_low: f64,
    c_high: f64,
) -> Result<BandReport> {
    if n < 3 {
        return Err(Error::InvalidParams(format!("need n >= 3, got {n}")));
    }
    let half = half_range(n);
    let root_log: Vec<f64> = (1..=half).map(|i| (n as f64 / i as f64).ln().sqrt()).collect();
    let streams = GaussianStreams::new(seed);
    let flags = par_map_gaussian(&streams, samples, n, |_, x| {
        let sorted = rearrange(&x).expect("nonempty");
        sorted.values()[..half]
            .iter()
            .zip(&root_log)
            .all(|(v, s)| c_low * s <= *v && *v <= c_high * s)
    });
    let inside_count = flags.iter().filter(|f| **f).count();
    let inside =
        proportion_estimate(inside_count, samples, seed, format!("band inside n={n}"))?;
    let width = inside.ci_high - inside.ci_low;
    let threshold = 0.51;
    let pass = inside.point >= threshold - width;
    Ok(BandReport { n, c_low, c_high, inside, threshold, pass })
}

/// Estimate `P{ |X|_sharp > S }` for an exact-mode certificate; the caller
/// compares against `2 exp(-t^2/2)`. A degenerate certificate (infinite `S`)
/// never exceeds.
pub fn coverage_check(
    params: &Params,
    cert: &BoundCertificate,
    sn: &SharpNorm,
    samples: usize,
    seed: u64,
) -> Result<EmpiricalEstimate> {
    let streams = GaussianStreams::new(seed);
    let flags =
        par_map_gaussian(&streams, samples, params.n, |_, x| sn.eval_owned(x) > cert.s);
    let exceed = flags.iter().filter(|f| **f).count();
    proportion_estimate(
        exceed,
        samples,
        seed,
        format!("P{{sharp > S}} case {} n={} t={}", cert.case, params.n, params.t),
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SharpnessPoint {
    pub u: f64,
    pub tail: f64,
    pub count: usize,
    pub skipped: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub b_sup: f64,
    pub samples: usize,
    pub seed: u64,
    pub inclusion_violations: usize,
    pub points: Vec<SharpnessPoint>,
    pub slope: Option<f64>,
}

/// Sharpness profile of the target tail.
///
/// (a) Exact inclusion: for every sample,
/// `psi(X, 2r, 2(p-1))^{1/(2(p-1))} <= b |X|_2` with `b` the sphere
/// supremum — a set-inclusion fact admitting zero violations.
/// (b) Tail shape: the slope of `-ln(tail)` against `(u/b)^2` over a
/// quantile-anchored grid `u_j = q50 + t_j * spread`; grid points whose
/// empirical tail is too thin are skipped and flagged.
pub fn sharpness_profile(
    params: &Params,
    t_grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<SharpnessReport> {
    if params.p <= 1.0 {
        return Err(Error::InvalidParams("sharpness profile needs p > 1".into()));
    }
    let p_exp = params.target_exponent();
    let b = sphere_sup(params.n, 2.0 * params.r, p_exp);
    let streams = GaussianStreams::new(seed);
    let pairs = par_map_gaussian(&streams, samples, params.n, |_, x| {
        let sorted = rearrange(&x).expect("nonempty");
        let y = psi_sorted(&sorted, 2.0 * params.r, p_exp).powf(1.0 / p_exp);
        let e2 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        (y, y > b * e2 * (1.0 + 1e-12))
    });
    let inclusion_violations = pairs.iter().filter(|(_, bad)| *bad).count();
    let mut ys: Vec<f64> = pairs.into_iter().map(|(y, _)| y).collect();
    ys.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN"));
    let q = |level: f64| -> f64 {
        let idx = ((samples as f64 - 1.0) * level).round() as usize;
        ys[idx.min(samples - 1)]
    };
    let q50 = q(0.5);
    let spread = (q(0.9) - q50) / 1.2815515655446004;
    let min_tail_count = 20usize;
    let mut points = Vec::with_capacity(t_grid.len());
    let mut fit: Vec<(f64, f64)> = Vec::new();
    for &tj in t_grid {
        let u = q50 + tj * spread;
        let count = ys.len() - ys.partition_point(|v| *v <= u);
        let tail = count as f64 / samples as f64;
        let skipped = count < min_tail_count;
        if !skipped {
            fit.push(((u / b) * (u / b), -tail.ln()));
        }
        points.push(SharpnessPoint { u, tail, count, skipped });
    }
    let slope = if fit.len() >= 2 {
        let m = fit.len() as f64;
        let mx = fit.iter().map(|(x, _)| x).sum::<f64>() / m;
        let my = fit.iter().map(|(_, y)| y).sum::<f64>() / m;
        let sxy: f64 = fit.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = fit.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
        if sxx > 0.0 {
            Some(sxy / sxx)
        } else {
            None
        }
    } else {
        None
    };
    Ok(SharpnessReport { b_sup: b, samples, seed, inclusion_violations, points, slope })
}
