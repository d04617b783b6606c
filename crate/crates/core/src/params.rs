//! Problem parameters and case dispatch.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// The problem quadruple `(n, r, p, t)`.
///
/// `n` is the dimension, `r` the weight exponent, `p` the Lorentz exponent
/// and `t` the deviation parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub r: f64,
    pub p: f64,
    pub t: f64,
}

impl Params {
    pub fn new(n: usize, r: f64, p: f64, t: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParams(format!("n must be >= 3, got {n}")));
        }
        for (name, v) in [("r", r), ("p", p), ("t", t)] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
            }
        }
        if r < 0.0 {
            return Err(Error::InvalidParams(format!("r must be >= 0, got {r}")));
        }
        if p < 1.0 {
            return Err(Error::InvalidParams(format!("p must be >= 1, got {p}")));
        }
        if t <= 0.0 {
            return Err(Error::InvalidParams(format!("t must be > 0, got {t}")));
        }
        Ok(Self { n, r, p, t })
    }

    pub fn case(&self) -> CaseTag {
        dispatch_case(self.r, self.p, self.n)
    }

    /// Exponent of the target functional `sum i^{-2r} x_[i]^{2(p-1)}`.
    pub fn target_exponent(&self) -> f64 {
        2.0 * (self.p - 1.0)
    }

    /// Degenerate regime: at `p = 1` the target functional is the
    /// deterministic constant `sum i^{-2r}`.
    pub fn is_degenerate(&self) -> bool {
        self.p == 1.0
    }
}

/// Which construction applies at a parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    I,
    II,
    III,
    IVa,
    IVb,
}

impl CaseTag {
    pub fn name(&self) -> &'static str {
        match self {
            CaseTag::I => "I",
            CaseTag::II => "II",
            CaseTag::III => "III",
            CaseTag::IVa => "IVa",
            CaseTag::IVb => "IVb",
        }
    }
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CaseTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" => Ok(CaseTag::I),
            "II" => Ok(CaseTag::II),
            "III" => Ok(CaseTag::III),
            "IVa" => Ok(CaseTag::IVa),
            "IVb" => Ok(CaseTag::IVb),
            other => Err(Error::UnknownCase(other.to_string())),
        }
    }
}

/// Assign the unique case tag for `(r, p, n)`.
///
/// The partition is: `I` iff `p >= 3/2`; `III` iff `p < 3/2 - 2r`;
/// `IVa`/`IVb` iff `p = 2(1-r)` with `r` in `(1/4, 1/2]`, split by whether
/// `(1-2r) ln n >= e`; `II` otherwise. Case IV takes precedence over II on
/// its line. The boundary `p = 3/2` belongs to Case I, and `r = 1/4` on the
/// line `p = 3/2` routes to Case I as well. The Case IV line is matched by
/// exact floating-point equality.
pub fn dispatch_case(r: f64, p: f64, n: usize) -> CaseTag {
    debug_assert!(r >= 0.0 && p >= 1.0 && n >= 3);
    if p >= 1.5 {
        return CaseTag::I;
    }
    if p < 1.5 - 2.0 * r {
        return CaseTag::III;
    }
    if r > 0.25 && r <= 0.5 && p == 2.0 * (1.0 - r) {
        let ln_n = (n as f64).ln();
        if (1.0 - 2.0 * r) * ln_n >= std::f64::consts::E {
            return CaseTag::IVa;
        }
        return CaseTag::IVb;
    }
    CaseTag::II
}
