//! Non-increasing rearrangement of absolute values.

use crate::{Error, Result};

/// The non-increasing rearrangement of the absolute values of a vector,
/// possibly truncated: a `SortedAbs` with `values.len() < ambient_n` stands
/// for a vector whose remaining `ambient_n - len` order statistics are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedAbs {
    values: Vec<f64>,
    ambient_n: usize,
}

impl SortedAbs {
    /// Sorted values, largest first.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Dimension of the underlying vector.
    pub fn ambient_n(&self) -> usize {
        self.ambient_n
    }

    /// Build from values already sorted non-increasingly (debug-checked).
    pub fn from_sorted(values: Vec<f64>, ambient_n: usize) -> Self {
        debug_assert!(values.len() <= ambient_n);
        debug_assert!(values.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(values.last().map_or(true, |v| *v >= 0.0));
        Self { values, ambient_n }
    }
}

/// Sort `|x_i|` in non-increasing order. Ties are broken arbitrarily;
/// order statistics are tie-insensitive.
pub fn rearrange(x: &[f64]) -> Result<SortedAbs> {
    if x.is_empty() {
        return Err(Error::EmptyVector);
    }
    let mut values: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    values.sort_unstable_by(|a, b| b.partial_cmp(a).expect("NaN in rearrange input"));
    Ok(SortedAbs { ambient_n: values.len(), values })
}

/// Sorted absolute values of the nonzero entries of a sparse vector living
/// in dimension `ambient_n`.
pub fn rearrange_sparse(nonzero: &[f64], ambient_n: usize) -> Result<SortedAbs> {
    if ambient_n == 0 {
        return Err(Error::EmptyVector);
    }
    debug_assert!(nonzero.len() <= ambient_n);
    let mut values: Vec<f64> = nonzero.iter().map(|v| v.abs()).collect();
    values.sort_unstable_by(|a, b| b.partial_cmp(a).expect("NaN in rearrange input"));
    Ok(SortedAbs { values, ambient_n })
}

/// The top `m` order statistics of `|x|`, non-increasing. Used where only a
/// weighted-sum prefix is needed; `x` is consumed as scratch space.
pub fn rearrange_top(x: &mut [f64], m: usize) -> SortedAbs {
    let n = x.len();
    for v in x.iter_mut() {
        *v = v.abs();
    }
    let m = m.min(n);
    if m < n {
        // Partition so that the m largest land in the prefix.
        x.select_nth_unstable_by(m, |a, b| b.partial_cmp(a).expect("NaN"));
    }
    let prefix = &mut x[..m];
    prefix.sort_unstable_by(|a, b| b.partial_cmp(a).expect("NaN"));
    SortedAbs { values: prefix.to_vec(), ambient_n: n }
}
