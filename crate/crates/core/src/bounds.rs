//! Two-sided envelopes of the analytic lemmas, evaluated with frozen
//! constants.

use crate::constants::ConstantsStore;
use crate::family::{CoreShape, IncGammaMinus, IncGammaPlus, PowerIntegral, RatioFamily, WeightedLogSum};
use crate::mc::families::MedianFormula;
use crate::quad::GammaSign;
use crate::Result;

/// A two-sided estimate; universal constants are measured against the
/// `normalization_exponent` power (`1 + q` style displays).
#[derive(Debug, Clone, Copy)]
pub struct TwoSidedBound {
    pub lower: f64,
    pub upper: f64,
    pub normalization_exponent: f64,
}

impl TwoSidedBound {
    pub fn contains(&self, v: f64) -> bool {
        let slack = 1e-12 * (1.0 + v.abs());
        self.lower <= v + slack && v <= self.upper + slack
    }
}

pub(crate) fn envelope(shape: CoreShape, store: &ConstantsStore, family: &str) -> Result<TwoSidedBound> {
    let fc = store.get(family)?;
    Ok(TwoSidedBound {
        lower: fc.c_fit.powf(shape.nu) * shape.lower_core,
        upper: fc.c_cap.powf(shape.nu) * shape.upper_core,
        normalization_exponent: shape.nu,
    })
}

/// Envelope for `int_0^b e^{∓w} w^q dw`.
pub fn incomplete_gamma_bounds(
    b: f64,
    q: f64,
    sign: GammaSign,
    store: &ConstantsStore,
) -> Result<TwoSidedBound> {
    let pt = [b, q, 0.0, 0.0];
    match sign {
        GammaSign::Minus => envelope(IncGammaMinus.cores(pt), store, "incomplete-gamma-minus"),
        GammaSign::Plus => envelope(IncGammaPlus.cores(pt), store, "incomplete-gamma-plus"),
    }
}

/// Envelope for `sum_{i<=n} i^{-a} (ln n/i)^q`, branching at `a = 1`.
pub fn weighted_log_sum_bound(
    n: usize,
    a: f64,
    q: f64,
    store: &ConstantsStore,
) -> Result<TwoSidedBound> {
    envelope(WeightedLogSum.cores([n as f64, a, q, 0.0]), store, "weighted-log-sum")
}

/// Envelope for `int_1^T x^{-a} dx`.
pub fn power_integral_bound(a: f64, t_end: f64, store: &ConstantsStore) -> Result<TwoSidedBound> {
    envelope(PowerIntegral.cores([a, t_end, 0.0, 0.0]), store, "power-integral")
}

/// Envelope for the median of `sum i^{-r} X_[i]^p`, branching at `r = 1`.
pub fn median_formula_bound(
    n: usize,
    r: f64,
    p: f64,
    store: &ConstantsStore,
) -> Result<TwoSidedBound> {
    envelope(MedianFormula.cores([n as f64, r, p, 0.0]), store, "median-formula")
}
