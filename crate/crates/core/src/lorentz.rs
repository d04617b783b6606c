//! Lorentz quasi-norms, the target functional `psi`, and the exact sphere
//! supremum with its simplified envelope.

use crate::bounds::{envelope, TwoSidedBound};
use crate::constants::ConstantsStore;
use crate::family::{sphere_sup_cores, SphereSupSimplified};
use crate::numeric::{pow0, sum_terms};
use crate::rearrange::{rearrange, SortedAbs};
use crate::sums::power_sum_exact;
use crate::{Error, Result};

/// Non-increasing weights with `w_1 = 1`.
#[derive(Debug, Clone)]
pub struct WeightSequence(Vec<f64>);

impl WeightSequence {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyVector);
        }
        if weights[0] != 1.0 {
            return Err(Error::InvalidParams(format!("w_1 must be 1, got {}", weights[0])));
        }
        for (i, w) in weights.windows(2).enumerate() {
            if !(w[1] > 0.0) || w[1] > w[0] {
                return Err(Error::MonotonicityViolation { index: i + 1, prev: w[0], next: w[1] });
            }
        }
        Ok(Self(weights))
    }

    /// The power weights `w_i = i^{-r}`.
    pub fn power(n: usize, r: f64) -> Self {
        Self((1..=n).map(|i| (i as f64).powf(-r)).collect())
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }
}

/// Value of a Lorentz quasi-norm together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzValue {
    pub value: f64,
    pub r: f64,
    pub p: f64,
}

/// `(sum_i i^{-r} x_[i]^p)^{1/p}` for `p >= 1`.
pub fn lorentz_norm(x: &[f64], r: f64, p: f64) -> Result<LorentzValue> {
    if !(p >= 1.0) {
        return Err(Error::ExponentBelowOne(p));
    }
    let sorted = rearrange(x)?;
    let value = psi_sorted(&sorted, r, p).powf(1.0 / p);
    Ok(LorentzValue { value, r, p })
}

/// `(sum_i w_i x_[i]^p)^{1/p}` for general non-increasing weights.
pub fn lorentz_norm_weighted(x: &[f64], w: &WeightSequence, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::ExponentBelowOne(p));
    }
    let sorted = rearrange(x)?;
    let vals = sorted.values();
    let m = vals.len().min(w.0.len());
    let s = sum_terms(m, |i| w.0[i - 1] * pow0(vals[i - 1], p));
    Ok(s.powf(1.0 / p))
}

/// The target functional `psi(x, r, p) = sum_i i^{-r} x_[i]^p` with the
/// `0^0 = 1` convention; accepts any `p >= 0` (the main bound uses the
/// exponent `2(p-1)` which may fall below 1).
pub fn psi(x: &[f64], r: f64, p: f64) -> Result<f64> {
    Ok(psi_sorted(&rearrange(x)?, r, p))
}

/// `psi` on a pre-sorted (possibly truncated) vector. With `p = 0` every
/// coordinate contributes `i^{-r}` regardless of its value, so the sum runs
/// over the full ambient dimension.
pub fn psi_sorted(sorted: &SortedAbs, r: f64, p: f64) -> f64 {
    debug_assert!(p >= 0.0);
    if p == 0.0 {
        return power_sum_exact(sorted.ambient_n(), r);
    }
    let vals = sorted.values();
    sum_terms(vals.len(), |i| (i as f64).powf(-r) * pow0(vals[i - 1], p))
}

/// Exact supremum of `(sum i^{-r} theta_[i]^p)^{1/p}` over the Euclidean
/// unit sphere: `(sum_i i^{-2r/(2-p)})^{(2-p)/(2p)}` for `p < 2`, else 1.
pub fn sphere_sup(n: usize, r: f64, p: f64) -> f64 {
    debug_assert!(p > 0.0);
    if p >= 2.0 {
        return 1.0;
    }
    power_sum_exact(n, 2.0 * r / (2.0 - p)).powf((2.0 - p) / (2.0 * p))
}

/// The maximizing direction: `theta_i = i^{-r/(2-p)} / sqrt(sum_j j^{-2r/(2-p)})`
/// for `p` in `(0,2)`; for `p >= 2` the maximizer is the first basis vector,
/// returned explicitly.
pub fn sphere_maximizer(n: usize, r: f64, p: f64) -> Result<Vec<f64>> {
    if !(p > 0.0) {
        return Err(Error::MaximizerRange(p));
    }
    if p >= 2.0 {
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        return Ok(e1);
    }
    let expo = r / (2.0 - p);
    let norm = power_sum_exact(n, 2.0 * expo).sqrt();
    Ok((1..=n).map(|i| (i as f64).powf(-expo) / norm).collect())
}

/// Simplified two-sided envelope for [`sphere_sup`], `p` in `(0,2)`, with
/// frozen constants.
pub fn sphere_sup_bound(n: usize, r: f64, p: f64, store: &ConstantsStore) -> Result<TwoSidedBound> {
    if !(p > 0.0 && p < 2.0) {
        return Err(Error::InvalidParams(format!("sphere_sup_bound needs p in (0,2), got {p}")));
    }
    if n < 2 {
        return Err(Error::InvalidParams(format!("sphere_sup_bound needs n >= 2, got {n}")));
    }
    let _ = SphereSupSimplified; // cores shared with the fit family
    envelope(sphere_sup_cores(n as f64, r, p), store, "sphere-sup-simplified")
}
