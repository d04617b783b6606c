//! Seeded, parallel Gaussian sampling and the empirical verification suite.
//!
//! Determinism contract: every estimate is a pure function of
//! `(seed, samples, parameters)`. Sampling uses one ChaCha stream per sample
//! index, parallel work is map-only over indices, and every reduction runs
//! sequentially in index order, so results are bit-identical regardless of
//! worker count.

pub mod checks;
pub mod families;
pub mod rng;
pub mod stats;

pub use checks::{
    coverage_check, order_stat_envelope_check, sharpness_profile, simultaneous_median_band_check,
    BandReport, EnvelopeReport, SharpnessReport,
};
pub use rng::{sample_gaussian, GaussianStreams};
pub use stats::{empirical_median, empirical_median_of, EmpiricalEstimate};
