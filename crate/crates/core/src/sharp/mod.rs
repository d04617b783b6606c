//! Convex sharp-norm constructions.
//!
//! Each case of the main bound supplies, behind [`CaseConstruction`]:
//! a coefficient recipe for the norm, an exact finite-sum Hölder factor `F`
//! with `psi(x, 2r, 2(p-1)) <= F |x|_#^{2(p-1)}` for all `x`, and the
//! asymptotic `(S, R)` formulas used in paper mode. Exact mode builds
//! `S = median + t * Lip` from Monte Carlo and `R = F S^{2(p-1)}`, making
//! the implication `|x|_# <= S  =>  psi <= R` a deterministic set-inclusion
//! check.

pub mod case_iv;
pub mod cases;
pub mod paper;
pub mod stress;

pub use case_iv::{
    compute_case_iv_internals, lagrange_stationarity_probe, CaseIvInternals, StationarityReport,
};

use crate::constants::ConstantsStore;
use crate::lorentz::{psi_sorted, sphere_sup};
use crate::mc::rng::{par_map_gaussian, GaussianStreams};
use crate::mc::stats::{empirical_median, EmpiricalEstimate};
use crate::numeric::{coeff_digest, pow0, sum_terms};
use crate::params::{CaseTag, Params};
use crate::rearrange::{rearrange, rearrange_top, SortedAbs};
use crate::{Error, Result, DEFAULT_SEED};
use serde::{Deserialize, Serialize};

/// How a sharp norm consumes the sorted vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EvalKind {
    /// `sum_i w_i x_[i]` over the coefficient support.
    WeightedSum,
    /// `(sum_i w_i x_[i]^e)^{1/e}` over the full dimension.
    LorentzPower { exponent: f64 },
    /// The Euclidean norm.
    Euclidean,
}

/// A built sharp norm: immutable and shareable.
#[derive(Debug, Clone)]
pub struct SharpNorm {
    pub case: CaseTag,
    pub params: Params,
    pub coeffs: Vec<f64>,
    pub kind: EvalKind,
}

impl SharpNorm {
    /// Number of coefficients (`n`, or `floor(n/e)` for the truncated
    /// constructions).
    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn digest(&self) -> u64 {
        coeff_digest(&self.coeffs)
    }

    /// Evaluate on a raw vector.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.params.n {
            return Err(Error::InvalidParams(format!(
                "vector has length {}, construction expects {}",
                x.len(),
                self.params.n
            )));
        }
        Ok(self.eval_owned(x.to_vec()))
    }

    /// Evaluate consuming a scratch vector (no extra allocation).
    pub fn eval_owned(&self, mut x: Vec<f64>) -> f64 {
        match self.kind {
            EvalKind::Euclidean => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            EvalKind::WeightedSum => {
                let sorted = rearrange_top(&mut x, self.coeffs.len());
                self.eval_sorted(&sorted)
            }
            EvalKind::LorentzPower { .. } => {
                let sorted = rearrange(&x).expect("nonempty");
                self.eval_sorted(&sorted)
            }
        }
    }

    /// Evaluate on a pre-sorted (possibly truncated) vector.
    pub fn eval_sorted(&self, sorted: &SortedAbs) -> f64 {
        debug_assert_eq!(sorted.ambient_n(), self.params.n);
        let vals = sorted.values();
        match self.kind {
            EvalKind::Euclidean => vals.iter().map(|v| v * v).sum::<f64>().sqrt(),
            EvalKind::WeightedSum => {
                let m = vals.len().min(self.coeffs.len());
                sum_terms(m, |i| self.coeffs[i - 1] * vals[i - 1])
            }
            EvalKind::LorentzPower { exponent } => {
                let m = vals.len().min(self.coeffs.len());
                sum_terms(m, |i| self.coeffs[i - 1] * pow0(vals[i - 1], exponent))
                    .powf(1.0 / exponent)
            }
        }
    }

    /// Lipschitz constant with respect to the Euclidean norm: the Euclidean
    /// norm of the coefficient vector for weighted sums of order statistics,
    /// 1 for the Euclidean norm, and the sphere supremum for the
    /// Lorentz-power kind.
    pub fn lipschitz(&self) -> f64 {
        match self.kind {
            EvalKind::Euclidean => 1.0,
            EvalKind::WeightedSum => {
                sum_terms(self.coeffs.len(), |i| self.coeffs[i - 1] * self.coeffs[i - 1]).sqrt()
            }
            EvalKind::LorentzPower { exponent } => {
                sphere_sup(self.params.n, 2.0 * self.params.r, exponent)
            }
        }
    }
}

/// Lipschitz constant of a built sharp norm.
pub fn sharp_lipschitz(sn: &SharpNorm) -> f64 {
    sn.lipschitz()
}

/// Exact Hölder factor, with the `p = 1` degenerate flag (the target sum is
/// then the deterministic constant itself).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HolderFactor {
    pub value: f64,
    pub degenerate: bool,
}

/// One construction strategy per case, registered by tag and by name.
pub trait CaseConstruction: Sync {
    fn tag(&self) -> CaseTag;
    fn name(&self) -> &'static str;
    fn build(&self, params: &Params) -> Result<SharpNorm>;
    fn holder_factor(&self, params: &Params, sn: &SharpNorm) -> Result<HolderFactor>;
    /// Asymptotic `(S, R)` with the fitted scale constant `k`.
    fn paper_s_r(&self, params: &Params, k: f64) -> (f64, f64);
}

pub fn registry() -> &'static [&'static dyn CaseConstruction; 5] {
    static REGISTRY: [&dyn CaseConstruction; 5] = [
        &cases::CaseI,
        &cases::CaseII,
        &cases::CaseIII,
        &cases::CaseIVa,
        &cases::CaseIVb,
    ];
    &REGISTRY
}

pub fn for_tag(tag: CaseTag) -> &'static dyn CaseConstruction {
    *registry()
        .iter()
        .find(|c| c.tag() == tag)
        .expect("all tags registered")
}

pub fn by_name(name: &str) -> Result<&'static dyn CaseConstruction> {
    registry()
        .iter()
        .copied()
        .find(|c| c.name() == name)
        .ok_or_else(|| Error::UnknownCase(name.to_string()))
}

/// Build the sharp norm for the dispatched case of `params`.
pub fn build_sharp_norm(params: &Params) -> Result<SharpNorm> {
    for_tag(params.case()).build(params)
}

/// Coefficient monotonicity guard (what makes the weighted sum a norm).
pub(crate) fn validate_non_increasing(coeffs: &[f64]) -> Result<()> {
    for (i, w) in coeffs.windows(2).enumerate() {
        if !(w[1] > 0.0) || w[1] > w[0] * (1.0 + 1e-12) {
            return Err(Error::MonotonicityViolation { index: i + 1, prev: w[0], next: w[1] });
        }
    }
    Ok(())
}

/// Certificate mode: asymptotic formulas with fitted constants, or exact
/// finite-sum / Monte Carlo quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertMode {
    Paper,
    Exact,
}

impl std::str::FromStr for CertMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(CertMode::Paper),
            "exact" => Ok(CertMode::Exact),
            other => Err(Error::InvalidParams(format!("mode must be paper|exact, got {other}"))),
        }
    }
}

mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// The certificate for one parameter point: `|X|_# <= S` implies
/// `psi(X, 2r, 2(p-1)) <= R`, and the sharp ball has Gaussian mass at least
/// `1 - tail_bound`. Degenerate (`p = 1`) certificates carry `S = null`
/// (infinity): the target is deterministic and every vector satisfies the
/// conclusion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub case: CaseTag,
    pub n: usize,
    pub r: f64,
    pub p: f64,
    pub t: f64,
    pub mode: CertMode,
    #[serde(rename = "S", with = "inf_as_null")]
    pub s: f64,
    #[serde(rename = "R")]
    pub r_bound: f64,
    pub holder_factor: f64,
    pub degenerate: bool,
    pub tail_bound: f64,
    pub coeffs_digest: u64,
}

/// Monte Carlo configuration for exact-mode certificates.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub seed: u64,
    pub samples: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, samples: 10_000 }
    }
}

/// Monte Carlo median of `|X|_#` for a built construction.
pub fn median_of_sharp(sn: &SharpNorm, mc: &McConfig) -> EmpiricalEstimate {
    let streams = GaussianStreams::new(mc.seed);
    let values = par_map_gaussian(&streams, mc.samples, sn.params.n, |_, x| sn.eval_owned(x));
    empirical_median(values, mc.seed, format!("median |X|_# case {}", sn.case))
        .expect("samples >= 100")
}

fn assemble(
    params: &Params,
    sn: &SharpNorm,
    mode: CertMode,
    s: f64,
    r_bound: f64,
    hf: HolderFactor,
) -> BoundCertificate {
    BoundCertificate {
        case: sn.case,
        n: params.n,
        r: params.r,
        p: params.p,
        t: params.t,
        mode,
        s,
        r_bound,
        holder_factor: hf.value,
        degenerate: hf.degenerate,
        tail_bound: 2.0 * (-params.t * params.t / 2.0).exp(),
        coeffs_digest: sn.digest(),
    }
}

/// Exact-mode certificate with a supplied median estimate for `|X|_#`
/// (callers that sweep `t` can reuse one median).
pub fn certificate_exact_with_median(
    params: &Params,
    sn: &SharpNorm,
    median: f64,
) -> Result<BoundCertificate> {
    let construction = for_tag(sn.case);
    let hf = construction.holder_factor(params, sn)?;
    if hf.degenerate {
        return Ok(assemble(params, sn, CertMode::Exact, f64::INFINITY, hf.value, hf));
    }
    let s = median + params.t * sn.lipschitz();
    let r_bound = hf.value * s.powf(params.target_exponent());
    Ok(assemble(params, sn, CertMode::Exact, s, r_bound, hf))
}

/// Exact-mode certificate: `S = median + t Lip`, `R = F S^{2(p-1)}`.
pub fn certificate_exact(params: &Params, mc: &McConfig) -> Result<(SharpNorm, BoundCertificate)> {
    let sn = build_sharp_norm(params)?;
    let hf = for_tag(sn.case).holder_factor(params, &sn)?;
    if hf.degenerate {
        let cert = assemble(params, &sn, CertMode::Exact, f64::INFINITY, hf.value, hf);
        return Ok((sn, cert));
    }
    let median = median_of_sharp(&sn, mc).point;
    let cert = certificate_exact_with_median(params, &sn, median)?;
    Ok((sn, cert))
}

/// Paper-mode certificate from the quoted asymptotic formulas with the
/// frozen per-case constant.
pub fn certificate_paper(
    params: &Params,
    store: &ConstantsStore,
) -> Result<(SharpNorm, BoundCertificate)> {
    let sn = build_sharp_norm(params)?;
    let construction = for_tag(sn.case);
    let hf = construction.holder_factor(params, &sn)?;
    let k = store.get(paper::family_name(sn.case))?.c_cap;
    let (s, r_bound) = construction.paper_s_r(params, k);
    let cert = assemble(params, &sn, CertMode::Paper, s, r_bound, hf);
    Ok((sn, cert))
}

/// Relative float slack of the deterministic inclusion check.
pub const IMPLICATION_SLACK: f64 = 1e-9;

/// The deterministic convex-subset inclusion: true iff `|x|_# > S` or
/// `psi(x, 2r, 2(p-1)) <= R (1 + slack)`. Must hold for every `x` against an
/// exact-mode certificate.
pub fn implication_check(x: &[f64], cert: &BoundCertificate, sn: &SharpNorm) -> Result<bool> {
    if x.len() != sn.params.n {
        return Err(Error::InvalidParams(format!(
            "vector has length {}, construction expects {}",
            x.len(),
            sn.params.n
        )));
    }
    Ok(implication_check_sorted(&rearrange(x)?, cert, sn))
}

/// [`implication_check`] on a pre-sorted (possibly truncated) vector.
pub fn implication_check_sorted(
    sorted: &SortedAbs,
    cert: &BoundCertificate,
    sn: &SharpNorm,
) -> bool {
    if sn.eval_sorted(sorted) > cert.s {
        return true;
    }
    let psi = psi_sorted(sorted, 2.0 * sn.params.r, sn.params.target_exponent());
    psi <= cert.r_bound * (1.0 + IMPLICATION_SLACK)
}
