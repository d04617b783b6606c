//! Shared numeric conventions: the `0^0 = 1` power, compensated summation
//! and the FNV-1a digest used for certificate audits.

use crate::{Error, Result};

/// Threshold above which long sums switch to compensated accumulation.
pub const COMPENSATED_SUM_THRESHOLD: usize = 10_000;

/// `x^q` with the convention `0^0 = 1`, for `x >= 0`, `q >= 0`.
pub fn powzero(x: f64, q: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::NegativeBase { base: x, exponent: q });
    }
    if q < 0.0 {
        return Err(Error::InvalidParams(format!("powzero exponent must be >= 0, got {q}")));
    }
    Ok(pow0(x, q))
}

/// Unchecked fast path of [`powzero`]; callers guarantee `x >= 0`.
#[inline]
pub fn pow0(x: f64, q: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if q == 0.0 {
        1.0
    } else if q == 1.0 {
        x
    } else {
        x.powf(q)
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sum of `f(i)` for `i = 1..=n`, compensated when `n` exceeds
/// [`COMPENSATED_SUM_THRESHOLD`].
pub fn sum_terms(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    if n > COMPENSATED_SUM_THRESHOLD {
        compensated_sum((1..=n).map(f))
    } else {
        (1..=n).map(f).sum()
    }
}

/// Sum of a slice, compensated when long.
pub fn sum_slice(values: &[f64]) -> f64 {
    if values.len() > COMPENSATED_SUM_THRESHOLD {
        compensated_sum(values.iter().copied())
    } else {
        values.iter().sum()
    }
}

/// 64-bit FNV-1a over a byte stream.
pub fn fnv1a64(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// FNV-1a digest of a coefficient vector (little-endian bytes of each value).
pub fn coeff_digest(coeffs: &[f64]) -> u64 {
    fnv1a64(coeffs.iter().flat_map(|c| c.to_le_bytes()))
}
