//! Registry entries whose oracles are Monte Carlo: median envelopes of
//! weighted order-statistic sums, the order-statistic envelope and band
//! constants, and the tail-slope window.

use super::checks::{order_stat_envelope_check, sharpness_profile, simultaneous_median_band_check};
use super::rng::{par_map_gaussian, GaussianStreams};
use super::stats::empirical_median;
use crate::constants::{FittedConstants, FIT_INFLATION};
use crate::family::{BoundFamily, CoreShape, OracleCtx, RatioFamily};
use crate::lorentz::psi_sorted;
use crate::numeric::fnv1a64;
use crate::params::Params;
use crate::rearrange::rearrange;
use crate::report::ReportRow;
use crate::Result;

/// Deterministic per-point stream seed.
fn point_seed(ctx: &OracleCtx, name: &str, pt: [f64; 4]) -> u64 {
    let bytes = name
        .bytes()
        .chain(pt.iter().flat_map(|v| v.to_le_bytes()));
    fnv1a64(bytes) ^ ctx.seed
}

/// Monte Carlo median of `sum_i i^{-r} X_[i]^p` in dimension `n`.
fn mc_median_psi(n: usize, r: f64, p: f64, samples: usize, seed: u64) -> f64 {
    let streams = GaussianStreams::new(seed);
    let values = par_map_gaussian(&streams, samples, n, |_, x| {
        psi_sorted(&rearrange(&x).expect("nonempty"), r, p)
    });
    empirical_median(values, seed, "psi median").expect("samples >= 100").point
}

// ---------------------------------------------------------------------------
// Median of sum i^{-r} X_[i]^p, branching at r = 1.
// ---------------------------------------------------------------------------

const MED_N: &[f64] = &[10.0, 50.0, 200.0, 1000.0];
const MED_R: &[f64] = &[0.0, 0.25, 0.5, 0.8, 1.0, 1.25, 2.0, 3.0];
const MED_P: &[f64] = &[0.0, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0];

pub struct MedianFormula;

impl MedianFormula {
    pub fn core(n: f64, r: f64, p: f64) -> CoreShape {
        let ln_n = n.ln();
        let core = if r <= 1.0 {
            (1.0 + p).powf(0.5 * p) * n.powf(1.0 - r) * ln_n.powf(1.0 + 0.5 * p)
                / (1.0 + p + (1.0 - r) * ln_n).powf(1.0 + 0.5 * p)
        } else {
            ln_n.powf(1.0 + 0.5 * p) / (1.0 + (r - 1.0) * ln_n) + ln_n.powf(0.5 * p)
        };
        CoreShape { lower_core: core, upper_core: core, nu: 1.0 + p }
    }
}

impl RatioFamily for MedianFormula {
    fn ratio_name(&self) -> &'static str {
        "median-formula"
    }
    fn grid(&self) -> Vec<[f64; 4]> {
        let mut g = Vec::new();
        for &n in MED_N {
            for &r in MED_R {
                for &p in MED_P {
                    g.push([n, r, p, 0.0]);
                }
            }
        }
        g
    }
    fn refined_grid(&self) -> Vec<[f64; 4]> {
        let mut g = Vec::new();
        for &n in MED_N {
            for &r in MED_R {
                for &p in MED_P {
                    g.push([n, r, p, 0.0]);
                    g.push([n, r + 0.1, p + 0.2, 0.0]);
                }
            }
        }
        g
    }
    fn verify_grid(&self) -> Vec<[f64; 4]> {
        let mut g = Vec::new();
        for n in [10.0, 100.0, 1000.0] {
            for r in [0.0, 0.6, 1.0, 2.0] {
                for p in [0.0, 0.8, 1.0, 2.0] {
                    g.push([n, r, p, 0.0]);
                }
            }
        }
        g
    }
    fn oracle(&self, pt: [f64; 4], ctx: &OracleCtx) -> f64 {
        mc_median_psi(
            pt[0] as usize,
            pt[1],
            pt[2],
            ctx.samples,
            point_seed(ctx, "median-formula", pt),
        )
    }
    fn cores(&self, pt: [f64; 4]) -> CoreShape {
        Self::core(pt[0], pt[1], pt[2])
    }
    fn label(&self, pt: [f64; 4]) -> String {
        format!("n={} r={} p={}", pt[0], pt[1], pt[2])
    }
}

// ---------------------------------------------------------------------------
// Median of the target functional sum i^{-2r} X_[i]^{2(p-1)} for 1 < p < 3/2,
// r <= 2, in the simplified two-branch form.
// ---------------------------------------------------------------------------

/// `(r, p)` sample points of the simplified median display.
pub const TARGET_MEDIAN_RP: &[(f64, f64)] =
    &[(0.1, 1.2), (0.3, 1.4), (0.45, 1.2), (0.8, 1.2), (1.5, 1.3), (2.0, 1.1)];

pub struct TargetMedian;

impl TargetMedian {
    pub fn core(n: f64, r: f64, p: f64) -> CoreShape {
        let ln_n = n.ln();
        let core = if r <= 0.5 {
            n.powf(1.0 - 2.0 * r) * ln_n.powf(p) / (1.0 + (1.0 - 2.0 * r) * ln_n).powf(p)
        } else {
            ln_n.powf(p) / (1.0 + (2.0 * r - 1.0) * ln_n)
        };
        CoreShape { lower_core: core, upper_core: core, nu: 1.0 }
    }
}

impl RatioFamily for TargetMedian {
    fn ratio_name(&self) -> &'static str {
        "target-median"
    }
    fn grid(&self) -> Vec<[f64; 4]> {
        let mut g = Vec::new();
        for &n in &[1_000.0, 10_000.0, 100_000.0] {
            for &(r, p) in TARGET_MEDIAN_RP {
                g.push([n, r, p, 0.0]);
            }
        }
        g
    }
    fn refined_grid(&self) -> Vec<[f64; 4]> {
        let mut g = self.grid();
        for &n in &[3_000.0, 30_000.0] {
            for &(r, p) in TARGET_MEDIAN_RP {
                g.push([n, r, p, 0.0]);
            }
        }
        g
    }
    fn verify_grid(&self) -> Vec<[f64; 4]> {
        TARGET_MEDIAN_RP.iter().map(|&(r, p)| [1_000.0, r, p, 0.0]).collect()
    }
    fn oracle(&self, pt: [f64; 4], ctx: &OracleCtx) -> f64 {
        mc_median_psi(
            pt[0] as usize,
            2.0 * pt[1],
            2.0 * (pt[2] - 1.0),
            ctx.samples,
            point_seed(ctx, "target-median", pt),
        )
    }
    fn cores(&self, pt: [f64; 4]) -> CoreShape {
        Self::core(pt[0], pt[1], pt[2])
    }
    fn label(&self, pt: [f64; 4]) -> String {
        format!("n={} r={} p={}", pt[0], pt[1], pt[2])
    }
}

// ---------------------------------------------------------------------------
// Order-statistic envelope constant: X_[i] <= C (ln(n/i) + t^2/i)^{1/2}.
// ---------------------------------------------------------------------------

const ENV_N: &[usize] = &[10, 100, 1_000, 10_000];
const ENV_T: &[f64] = &[0.5, 1.0, 1.5, 2.0];

pub struct OrderStatEnvelope;

impl BoundFamily for OrderStatEnvelope {
    fn name(&self) -> &'static str {
        "order-stat-envelope"
    }

    fn fit(&self, refined: bool, ctx: &OracleCtx) -> Result<(f64, f64, String)> {
        let samples = ctx.samples.saturating_mul(5).clamp(1_000, 200_000);
        let mut worst = 0.0f64;
        let ns: Vec<usize> =
            if refined { ENV_N.iter().chain(&[3_000usize]).copied().collect() } else { ENV_N.to_vec() };
        for &n in &ns {
            let half = (n + 1) / 2;
            let seed = point_seed(ctx, "order-stat-envelope", [n as f64, 0.0, 0.0, 0.0]);
            let streams = GaussianStreams::new(seed);
            // per-sample max ratio against the t-dependent envelope shape
            let per_t: Vec<Vec<f64>> = {
                let shapes: Vec<Vec<f64>> = ENV_T
                    .iter()
                    .map(|t| {
                        (1..=half)
                            .map(|i| ((n as f64 / i as f64).ln() + t * t / i as f64).sqrt())
                            .collect()
                    })
                    .collect();
                let maxima = par_map_gaussian(&streams, samples, n, |_, x| {
                    let sorted = rearrange(&x).expect("nonempty");
                    let vals = &sorted.values()[..half];
                    shapes
                        .iter()
                        .map(|shape| {
                            vals.iter()
                                .zip(shape)
                                .fold(0.0f64, |m, (v, s)| m.max(v / s))
                        })
                        .collect::<Vec<f64>>()
                });
                (0..ENV_T.len())
                    .map(|j| maxima.iter().map(|row| row[j]).collect())
                    .collect()
            };
            for (j, t) in ENV_T.iter().enumerate() {
                let mut ratios = per_t[j].clone();
                ratios.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN"));
                let level = 1.0 - (-t * t).exp();
                let idx = ((samples as f64 - 1.0) * level).floor() as usize;
                worst = worst.max(ratios[idx.min(samples - 1)]);
            }
        }
        let k = worst * FIT_INFLATION;
        Ok((k, k, format!("n in {ENV_N:?}, t in {ENV_T:?}, {samples} samples, seed {}", ctx.seed)))
    }

    fn check(&self, fc: &FittedConstants, ctx: &OracleCtx) -> Vec<ReportRow> {
        let samples = ctx.samples.max(4000);
        let mut rows = Vec::new();
        for (n, t) in [(1_000usize, 1.0f64), (1_000, 2.0), (1_000, 3.0), (10_000, 2.0)] {
            let rep = order_stat_envelope_check(n, t, fc.c_cap, samples, ctx.seed)
                .expect("valid check arguments");
            let pass = rep.empirical_violation_prob.ci_low <= rep.target;
            rows.push(ReportRow {
                family: self.name().into(),
                case_tag: None,
                n: Some(n),
                r: None,
                p: None,
                t: Some(t),
                statistic: "violation prob".into(),
                point: rep.empirical_violation_prob.point,
                ci_low: Some(rep.empirical_violation_prob.ci_low),
                ci_high: Some(rep.empirical_violation_prob.ci_high),
                target: Some(rep.target),
                pass,
            });
        }
        // sanity: a quarter of the constant must be visibly violated
        let rep = order_stat_envelope_check(1_000, 1.0, fc.c_cap / 4.0, samples, ctx.seed)
            .expect("valid check arguments");
        rows.push(ReportRow {
            family: self.name().into(),
            case_tag: None,
            n: Some(1_000),
            r: None,
            p: None,
            t: Some(1.0),
            statistic: "violation prob at C/4 (sanity: must violate)".into(),
            point: rep.empirical_violation_prob.point,
            ci_low: Some(rep.empirical_violation_prob.ci_low),
            ci_high: Some(rep.empirical_violation_prob.ci_high),
            target: None,
            pass: rep.empirical_violation_prob.point > 0.0,
        });
        rows
    }
}

// ---------------------------------------------------------------------------
// Simultaneous median band: c sqrt(ln n/i) <= X_[i] <= C sqrt(ln n/i) with
// probability at least 0.51.
// ---------------------------------------------------------------------------

pub struct MedianBand;

impl BoundFamily for MedianBand {
    fn name(&self) -> &'static str {
        "median-band"
    }

    fn fit(&self, refined: bool, ctx: &OracleCtx) -> Result<(f64, f64, String)> {
        let samples = ctx.samples.saturating_mul(5).clamp(1_000, 200_000);
        let mut c_low = f64::INFINITY;
        let mut c_high = 0.0f64;
        let ns: Vec<usize> =
            if refined { ENV_N.iter().chain(&[3_000usize]).copied().collect() } else { ENV_N.to_vec() };
        for &n in &ns {
            let half = (n + 1) / 2;
            let shape: Vec<f64> =
                (1..=half).map(|i| (n as f64 / i as f64).ln().sqrt()).collect();
            let seed = point_seed(ctx, "median-band", [n as f64, 0.0, 0.0, 0.0]);
            let streams = GaussianStreams::new(seed);
            let extremes = par_map_gaussian(&streams, samples, n, |_, x| {
                let sorted = rearrange(&x).expect("nonempty");
                let vals = &sorted.values()[..half];
                let mut lo = f64::INFINITY;
                let mut hi = 0.0f64;
                for (v, s) in vals.iter().zip(&shape) {
                    let ratio = v / s;
                    lo = lo.min(ratio);
                    hi = hi.max(ratio);
                }
                (lo, hi)
            });
            let mut lows: Vec<f64> = extremes.iter().map(|(l, _)| *l).collect();
            let mut highs: Vec<f64> = extremes.iter().map(|(_, h)| *h).collect();
            lows.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN"));
            highs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN"));
            // 20% / 80% quantiles: the band then holds with probability
            // >= 0.6 per dimension by a union bound, before widening.
            let idx_lo = ((samples as f64 - 1.0) * 0.2) as usize;
            let idx_hi = ((samples as f64 - 1.0) * 0.8) as usize;
            c_low = c_low.min(lows[idx_lo]);
            c_high = c_high.max(highs[idx_hi]);
        }
        let c = (c_low / 1.1).max(1e-6);
        let cap = c_high * 1.1;
        Ok((c, cap, format!("n in {ENV_N:?}, {samples} samples, seed {}", ctx.seed)))
    }

    fn check(&self, fc: &FittedConstants, ctx: &OracleCtx) -> Vec<ReportRow> {
        let samples = ctx.samples.max(2000);
        let mut rows = Vec::new();
        for n in [100usize, 1_000, 10_000] {
            let rep = simultaneous_median_band_check(n, samples, ctx.seed, fc.c_fit, fc.c_cap)
                .expect("valid band arguments");
            rows.push(ReportRow {
                family: self.name().into(),
                case_tag: None,
                n: Some(n),
                r: None,
                p: None,
                t: None,
                statistic: "band probability".into(),
                point: rep.inside.point,
                ci_low: Some(rep.inside.ci_low),
                ci_high: Some(rep.inside.ci_high),
                target: Some(rep.threshold),
                pass: rep.pass,
            });
        }
        rows
    }
}

// ---------------------------------------------------------------------------
// Tail-slope window of -ln P{psi^{1/(2(p-1))} > u} against (u/b)^2.
// ---------------------------------------------------------------------------

/// `(n, r, p)` sample points of the slope fit.
pub const SLOPE_POINTS: &[(usize, f64, f64)] =
    &[(100, 0.0, 1.5), (100, 0.3, 1.4), (1_000, 0.1, 1.2), (1_000, 0.45, 1.2)];

/// Grid of deviation multiples used for the slope fit.
pub const SLOPE_T_GRID: &[f64] = &[0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5];

pub struct SharpnessSlope;

impl SharpnessSlope {
    pub fn slope_at(n: usize, r: f64, p: f64, samples: usize, seed: u64) -> Option<f64> {
        let params = Params::new(n, r, p, 1.0).expect("valid slope point");
        sharpness_profile(&params, SLOPE_T_GRID, samples, seed)
            .expect("p > 1 at slope points")
            .slope
    }
}

impl BoundFamily for SharpnessSlope {
    fn name(&self) -> &'static str {
        "tail-slope"
    }

    fn fit(&self, refined: bool, ctx: &OracleCtx) -> Result<(f64, f64, String)> {
        let samples = ctx.samples.saturating_mul(10).clamp(2_000, 200_000);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        let mut used = 0usize;
        let extra = [(300usize, 0.2, 1.3)];
        let points: Vec<(usize, f64, f64)> = if refined {
            SLOPE_POINTS.iter().chain(extra.iter()).copied().collect()
        } else {
            SLOPE_POINTS.to_vec()
        };
        for (n, r, p) in points {
            let seed = point_seed(ctx, "tail-slope", [n as f64, r, p, 0.0]);
            if let Some(s) = Self::slope_at(n, r, p, samples, seed) {
                lo = lo.min(s);
                hi = hi.max(s);
                used += 1;
            }
        }
        if used < 2 {
            return Err(crate::Error::GridTooSmall(used));
        }
        Ok((
            lo / FIT_INFLATION,
            hi * FIT_INFLATION,
            format!("points {SLOPE_POINTS:?}, t grid {SLOPE_T_GRID:?}, {samples} samples, seed {}", ctx.seed),
        ))
    }

    fn check(&self, fc: &FittedConstants, ctx: &OracleCtx) -> Vec<ReportRow> {
        let samples = ctx.samples.saturating_mul(10).clamp(2_000, 200_000);
        let mut rows = Vec::new();
        for &(n, r, p) in &[SLOPE_POINTS[0], SLOPE_POINTS[3]] {
            let seed = point_seed(ctx, "tail-slope", [n as f64, r, p, 0.0]);
            let slope = Self::slope_at(n, r, p, samples, seed).unwrap_or(f64::NAN);
            let pass = slope.is_finite() && fc.c_fit <= slope && slope <= fc.c_cap;
            rows.push(ReportRow {
                family: self.name().into(),
                case_tag: None,
                n: Some(n),
                r: Some(r),
                p: Some(p),
                t: None,
                statistic: "tail slope".into(),
                point: slope,
                ci_low: Some(fc.c_fit),
                ci_high: Some(fc.c_cap),
                target: None,
                pass,
            });
        }
        rows
    }
}
