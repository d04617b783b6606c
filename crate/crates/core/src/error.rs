use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty vector")]
    EmptyVector,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("negative base {base} with exponent {exponent}")]
    NegativeBase { base: f64, exponent: f64 },

    #[error("exponent below 1 unsupported here (p = {0})")]
    ExponentBelowOne(f64),

    #[error("maximizer formula requires p in (0,2), got p = {0}")]
    MaximizerRange(f64),

    #[error("quadrature did not converge: achieved relative tolerance {achieved:e}, requested {requested:e}")]
    QuadratureNoConverge { achieved: f64, requested: f64 },

    #[error("function is not non-increasing at x = {0}")]
    NotNonIncreasing(f64),

    #[error("constants for family '{0}' not frozen: run fit-constants first")]
    ConstantsNotFrozen(String),

    #[error("unknown family '{0}'")]
    UnknownFamily(String),

    #[error("unknown case '{0}'")]
    UnknownCase(String),

    #[error("constants file {path}: {detail}")]
    ConstantsIo { path: String, detail: String },

    #[error("coefficient monotonicity violated at index {index} ({prev} < {next})")]
    MonotonicityViolation { index: usize, prev: f64, next: f64 },

    #[error("outside Case IVa validity (n <= n0 regime): {0}")]
    OutsideCaseIva(String),

    #[error("fit grid too small: {0} points (need >= 8)")]
    GridTooSmall(usize),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization failure: {0}")]
    Serde(#[from] serde_json::Error),
}
