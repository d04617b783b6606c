//! Independent verification oracles.
//!
//! Everything here deliberately avoids the implementation paths it is used
//! to check: naive sorting instead of the library sort, double-double
//! accumulation instead of plain/Kahan summation, power series instead of
//! quadrature, and random-restart ascent instead of the closed-form sphere
//! supremum.

use rand::Rng;

/// Selection-sorted absolute values, largest first. O(n^2), test sizes only.
pub fn naive_sorted_abs(x: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = x.iter().map(|a| a.abs()).collect();
    for i in 0..v.len() {
        let mut best = i;
        for j in i + 1..v.len() {
            if v[j] > v[best] {
                best = j;
            }
        }
        v.swap(i, best);
    }
    v
}

/// Double-double (~31 significant digits) accumulator for re-summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    pub fn add(&mut self, v: f64) {
        // two-sum
        let s = self.hi + v;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (v - bb);
        self.hi = s;
        self.lo += err;
        // renormalize
        let t = self.hi + self.lo;
        self.lo -= t - self.hi;
        self.hi = t;
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

/// High-precision re-summation of a term stream.
pub fn dd_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = DoubleDouble::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// `int_0^b e^{s*w} w^q dw` by termwise integration of the exponential
/// series: `sum_k s^k b^{q+k+1} / (k! (q+k+1))`. Accurate for moderate `b`
/// (all terms positive when `s = +1`).
pub fn exp_series_integral(b: f64, q: f64, s: f64) -> f64 {
    let mut acc = DoubleDouble::default();
    let mut coeff = 1.0f64; // s^k / k!
    let mut k = 0usize;
    loop {
        let term = coeff * b.powf(q + k as f64 + 1.0) / (q + k as f64 + 1.0);
        acc.add(term);
        if k >= 20 && term.abs() < 1e-18 * acc.value().abs() {
            break;
        }
        if k > 500 {
            break;
        }
        k += 1;
        coeff *= s / k as f64;
    }
    acc.value()
}

/// Standard normal CDF (statrs implementation).
pub fn normal_cdf(x: f64) -> f64 {
    use statrs::distribution::ContinuousCDF;
    statrs::distribution::Normal::new(0.0, 1.0).unwrap().cdf(x)
}

/// Two-sided Kolmogorov-Smirnov statistic of a sample against the standard
/// normal distribution.
pub fn ks_statistic_normal(sample: &mut [f64]) -> f64 {
    sample.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let m = sample.len() as f64;
    let mut d = 0.0f64;
    for (i, x) in sample.iter().enumerate() {
        let f = normal_cdf(*x);
        let hi = (i as f64 + 1.0) / m - f;
        let lo = f - i as f64 / m;
        d = d.max(hi).max(lo);
    }
    d
}

/// Objective of the sphere problem: `(sum_i i^{-r} theta_[i]^p)^{1/p}`.
pub fn sphere_objective(theta: &[f64], r: f64, p: f64) -> f64 {
    let mut sorted: Vec<f64> = theta.iter().map(|v| v.abs()).collect();
    sorted.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    let s: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, v)| ((i + 1) as f64).powf(-r) * if *v == 0.0 { 0.0 } else { v.powf(p) })
        .sum();
    s.powf(1.0 / p)
}

/// Projected-gradient ascent of [`sphere_objective`] over the Euclidean unit
/// sphere from a given start, with step halving; stops when the projected
/// gradient norm falls below `1e-10` or the step underflows.
pub fn sphere_ascent(start: &[f64], r: f64, p: f64) -> f64 {
    let n = start.len();
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut theta: Vec<f64> = start.to_vec();
    let scale = norm(&theta);
    for v in theta.iter_mut() {
        *v /= scale;
    }
    let mut best = sphere_objective(&theta, r, p);
    let mut step = 0.25f64;
    for _ in 0..4000 {
        // gradient of sum i^{-r} |theta|_[i]^p in original coordinates
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_unstable_by(|&a, &b| theta[b].abs().partial_cmp(&theta[a].abs()).unwrap());
        let mut grad = vec![0.0f64; n];
        for (rank, &j) in idx.iter().enumerate() {
            let w = ((rank + 1) as f64).powf(-r);
            let a = theta[j].abs().max(1e-300);
            grad[j] = w * p * a.powf(p - 1.0) * theta[j].signum();
        }
        // project onto the tangent space
        let dot: f64 = grad.iter().zip(&theta).map(|(g, t)| g * t).sum();
        for (g, t) in grad.iter_mut().zip(&theta) {
            *g -= dot * t;
        }
        if norm(&grad) < 1e-10 {
            break;
        }
        let mut improved = false;
        while step > 1e-16 {
            let mut cand: Vec<f64> =
                theta.iter().zip(&grad).map(|(t, g)| t + step * g).collect();
            let s = norm(&cand);
            for v in cand.iter_mut() {
                *v /= s;
            }
            let val = sphere_objective(&cand, r, p);
            if val > best {
                theta = cand;
                best = val;
                step *= 1.5;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    best
}

/// Best value found by `restarts` random-restart ascents (plus the supplied
/// witness directions, when given).
pub fn sphere_search(
    n: usize,
    r: f64,
    p: f64,
    restarts: usize,
    witnesses: &[Vec<f64>],
    rng: &mut impl Rng,
) -> f64 {
    let mut best = f64::MIN;
    for w in witnesses {
        best = best.max(sphere_ascent(w, r, p));
    }
    for k in 0..restarts {
        let start: Vec<f64> = if k % 3 == 2 {
            // sparse start
            let nnz = 1 + rng.gen_range(0..n.min(8));
            let mut v = vec![0.0; n];
            for _ in 0..nnz {
                let j = rng.gen_range(0..n);
                v[j] = rng.gen_range(-1.0..1.0f64);
            }
            if v.iter().all(|x| *x == 0.0) {
                v[0] = 1.0;
            }
            v
        } else {
            (0..n).map(|_| rng.gen_range(-1.0..1.0f64)).collect()
        };
        best = best.max(sphere_ascent(&start, r, p));
    }
    best
}

/// Max of `|f(x) - f(y)| / |x - y|` over random Gaussian pairs: an empirical
/// lower bound for a Lipschitz constant.
pub fn lipschitz_probe(
    f: impl Fn(&[f64]) -> f64,
    n: usize,
    pairs: usize,
    rng: &mut impl Rng,
) -> f64 {
    use rand_distr::StandardNormal;
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let x: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let y: Vec<f64> = if rng.gen_bool(0.5) {
            (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
        } else {
            // nearby pair exercises the local constant
            x.iter()
                .map(|v| v + 1e-4 * rng.sample::<f64, _>(StandardNormal))
                .collect()
        };
        let dist: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if dist > 0.0 {
            worst = worst.max((f(&x) - f(&y)).abs() / dist);
        }
    }
    worst
}
