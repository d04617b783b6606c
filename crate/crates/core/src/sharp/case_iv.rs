//! Case IVa internals: the scale `A`, the crossover index `A0` where the two
//! branches of `beta_i^{-1}` balance, and the `beta` sequence, plus a
//! numerical stationarity probe of the recipe.

use super::cases::support_n_over_e;
use crate::mc::rng::{par_map_gaussian, GaussianStreams};
use crate::mc::stats::empirical_median;
use crate::params::{CaseTag, Params};
use crate::rearrange::rearrange_top;
use crate::sharp::McConfig;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct CaseIvInternals {
    /// `A = (1-2r)^p ln n / n^{1-2r}`.
    pub a: f64,
    /// Crossover index: the unique solution of `(n/i)/ln(n/i) = A^{1/(p-1)} n`.
    pub a0: f64,
    /// `beta_i = A i^{-2r} (ln n/i)^{p-1} + 1/i` for `i <= floor(n/e)`.
    pub beta: Vec<f64>,
    pub m: usize,
    n: usize,
    p: f64,
}

impl CaseIvInternals {
    /// Residual of the defining identity `A0 ln(n/A0) A^{1/(p-1)} = 1`.
    pub fn aa0_residual(&self) -> f64 {
        let z = self.n as f64 / self.a0;
        (self.a0 * z.ln() * self.a.powf(1.0 / (self.p - 1.0)) - 1.0).abs()
    }

    /// `n^{1 - 3/(2e)} <= A0 <= e^{-2} n`.
    pub fn a0_in_range(&self) -> bool {
        let n = self.n as f64;
        let lo = n.powf(1.0 - 3.0 / (2.0 * std::f64::consts::E));
        let hi = n / (std::f64::consts::E * std::f64::consts::E);
        lo <= self.a0 && self.a0 <= hi
    }

    /// Both inequalities
    /// `ln(A^{1/(p-1)} n) <= ln(n/A0) <= (1-1/e)^{-1} ln(A^{1/(p-1)} n)`.
    pub fn logsall_ok(&self) -> (bool, bool) {
        let lhs = (self.a.powf(1.0 / (self.p - 1.0)) * self.n as f64).ln();
        let mid = (self.n as f64 / self.a0).ln();
        let factor = 1.0 / (1.0 - 1.0 / std::f64::consts::E);
        let slack = 1e-12 * (1.0 + mid.abs());
        (lhs <= mid + slack, mid <= factor * lhs + slack)
    }

    /// The norm coefficients `w_i = i^{-r/(p-1)} beta_i^{-(3-2p)/(2(p-1))}`.
    pub fn weights(&self, params: &Params) -> Vec<f64> {
        let (r, p) = (params.r, params.p);
        let expo = -(3.0 - 2.0 * p) / (2.0 * (p - 1.0));
        self.beta
            .iter()
            .enumerate()
            .map(|(idx, b)| ((idx + 1) as f64).powf(-r / (p - 1.0)) * b.powf(expo))
            .collect()
    }
}

/// Relative tolerance of the crossover bisection.
pub const A0_REL_TOL: f64 = 1e-12;

/// Compute the Case IVa internals, validating the admissible-range
/// inequality on both sides before solving. Failure signals the small-`n`
/// escape hatch of the construction.
pub fn compute_case_iv_internals(params: &Params) -> Result<CaseIvInternals> {
    if params.case() != CaseTag::IVa {
        return Err(Error::InvalidParams(format!(
            "case IVa internals requested for case {}",
            params.case()
        )));
    }
    let (n, r, p) = (params.n as f64, params.r, params.p);
    let ln_n = n.ln();
    let a = (1.0 - 2.0 * r).powf(p) * ln_n / n.powf(1.0 - 2.0 * r);
    let target = a.powf(1.0 / (p - 1.0)) * n;
    let e = std::f64::consts::E;
    let lo_bound = 0.5 * e * e;
    let hi_bound = 2.0 * e / (3.0 * ln_n) * n.powf(3.0 / (2.0 * e));
    if !(lo_bound <= target) {
        return Err(Error::OutsideCaseIva(format!(
            "A^(1/(p-1)) n = {target} below e^2/2 = {lo_bound}"
        )));
    }
    if !(target <= hi_bound) {
        return Err(Error::OutsideCaseIva(format!(
            "A^(1/(p-1)) n = {target} above (2e/3 ln n) n^(3/2e) = {hi_bound}"
        )));
    }
    // z/ln z is increasing on [e, inf); bisect on z = n/i over
    // [e^2, n^(3/2e)], where the range check guarantees a sign change.
    let mut lo = e * e;
    let mut hi = n.powf(3.0 / (2.0 * e));
    let h = |z: f64| z / z.ln() - target;
    debug_assert!(h(lo) <= 0.0 && h(hi) >= 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= A0_REL_TOL * mid.abs() {
            break;
        }
    }
    let z = 0.5 * (lo + hi);
    let a0 = n / z;
    let m = support_n_over_e(params.n);
    let beta: Vec<f64> = (1..=m)
        .map(|i| {
            let i_f = i as f64;
            a * i_f.powf(-2.0 * r) * (n / i_f).ln().powf(p - 1.0) + 1.0 / i_f
        })
        .collect();
    // i^{2r/(3-2p)} beta_i must be non-decreasing (the norm property).
    let g_expo = 2.0 * r / (3.0 - 2.0 * p);
    let mut prev = beta[0];
    for (idx, b) in beta.iter().enumerate().skip(1) {
        let g = ((idx + 1) as f64).powf(g_expo) * b;
        if g < prev * (1.0 - 1e-12) {
            return Err(Error::MonotonicityViolation { index: idx, prev, next: g });
        }
        prev = g;
    }
    Ok(CaseIvInternals { a, a0, beta, m, n: params.n, p })
}

/// Monotonicity-preserving multiplicative perturbation of `beta`.
fn perturb_beta(beta: &[f64], g_expo: f64, eps: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(beta.len());
    let mut running = 0.0f64;
    for (idx, (b, e)) in beta.iter().zip(eps).enumerate() {
        let i_f = (idx + 1) as f64;
        let g = i_f.powf(g_expo) * b * (1.0 + e);
        running = if idx == 0 { g } else { running.max(g) };
        out.push(running * i_f.powf(-g_expo));
    }
    out
}

#[derive(Debug, Clone)]
pub struct StationarityReport {
    pub worst_ratio: f64,
    pub perturbations: usize,
    pub baseline_objective: f64,
    /// Worst improvement stays within the slack factor 4.
    pub slack_ok: bool,
}

fn probe_objective(params: &Params, beta: &[f64], rows: &[Vec<f64>], seed: u64) -> f64 {
    let (r, p, t) = (params.r, params.p, params.t);
    let expo = -(3.0 - 2.0 * p) / (2.0 * (p - 1.0));
    let w: Vec<f64> = beta
        .iter()
        .enumerate()
        .map(|(idx, b)| ((idx + 1) as f64).powf(-r / (p - 1.0)) * b.powf(expo))
        .collect();
    let lip = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let evals: Vec<f64> = rows
        .iter()
        .map(|row| row.iter().zip(&w).map(|(x, wi)| x * wi).sum::<f64>())
        .collect();
    let median = empirical_median(evals, seed, "probe").expect("samples >= 100").point;
    let beta_sum: f64 = beta.iter().sum();
    beta_sum.powf(3.0 - 2.0 * p) * (median + t * lip).powf(2.0 * (p - 1.0))
}

/// Random multiplicative perturbations of the `beta` recipe (up to 10%,
/// monotonicity preserved) must not improve the implied bound
/// `(sum beta)^{3-2p} (median + t Lip)^{2(p-1)}` by more than the slack
/// factor 4; reports the worst improvement ratio found.
pub fn lagrange_stationarity_probe(
    params: &Params,
    perturbations: usize,
    mc: &McConfig,
) -> Result<StationarityReport> {
    let internals = compute_case_iv_internals(params)?;
    let m = internals.m;
    let streams = GaussianStreams::new(mc.seed);
    let rows: Vec<Vec<f64>> = par_map_gaussian(&streams, mc.samples, params.n, |_, mut x| {
        rearrange_top(&mut x, m).values().to_vec()
    });
    let baseline = probe_objective(params, &internals.beta, &rows, mc.seed);
    let g_expo = 2.0 * params.r / (3.0 - 2.0 * params.p);
    use rand::Rng;
    use rayon::prelude::*;
    let ratios: Vec<f64> = (0..perturbations)
        .into_par_iter()
        .map(|k| {
            let mut rng = streams.rng(u64::MAX - k as u64);
            let eps: Vec<f64> = (0..m).map(|_| rng.gen_range(-0.1..0.1)).collect();
            let beta = perturb_beta(&internals.beta, g_expo, &eps);
            probe_objective(params, &beta, &rows, mc.seed) / baseline
        })
        .collect();
    let worst_ratio = ratios.iter().copied().fold(1.0f64, f64::min);
    Ok(StationarityReport {
        worst_ratio,
        perturbations,
        baseline_objective: baseline,
        slack_ok: worst_ratio >= 0.25,
    })
}
