//! The five case constructions.

use super::case_iv::compute_case_iv_internals;
use super::{validate_non_increasing, CaseConstruction, EvalKind, HolderFactor, SharpNorm};
use crate::numeric::{pow0, sum_terms};
use crate::params::{CaseTag, Params};
use crate::sums::power_sum_exact;
use crate::{Error, Result};

fn check_tag(params: &Params, want: CaseTag) -> Result<()> {
    let got = params.case();
    if got != want {
        return Err(Error::InvalidParams(format!(
            "parameters dispatch to case {got}, construction is for case {want}"
        )));
    }
    Ok(())
}

/// Truncation point `floor(n/e)` of the Case II / IVa sums (at least 1 for
/// `n >= 3`).
pub fn support_n_over_e(n: usize) -> usize {
    ((n as f64) / std::f64::consts::E).floor() as usize
}

/// Exact tail-peel constant: restricting a non-increasing term sum to its
/// first `m = floor(n/e)` indices costs a factor `2n/m`.
pub fn peel_constant(n: usize) -> f64 {
    2.0 * n as f64 / support_n_over_e(n) as f64
}

fn degenerate_factor(params: &Params) -> HolderFactor {
    HolderFactor { value: power_sum_exact(params.n, 2.0 * params.r), degenerate: true }
}

// ---------------------------------------------------------------------------
// Case I: p >= 3/2. The sharp norm is the target Lorentz norm itself.
// ---------------------------------------------------------------------------

pub struct CaseI;

impl CaseConstruction for CaseI {
    fn tag(&self) -> CaseTag {
        CaseTag::I
    }
    fn name(&self) -> &'static str {
        "case-i"
    }

    fn build(&self, params: &Params) -> Result<SharpNorm> {
        check_tag(params, CaseTag::I)?;
        let coeffs: Vec<f64> =
            (1..=params.n).map(|i| (i as f64).powf(-2.0 * params.r)).collect();
        Ok(SharpNorm {
            case: CaseTag::I,
            params: *params,
            coeffs,
            kind: EvalKind::LorentzPower { exponent: params.target_exponent() },
        })
    }

    fn holder_factor(&self, _params: &Params, _sn: &SharpNorm) -> Result<HolderFactor> {
        // psi = |x|_#^{2(p-1)} identically
        Ok(HolderFactor { value: 1.0, degenerate: false })
    }

    fn paper_s_r(&self, params: &Params, k: f64) -> (f64, f64) {
        let (n, r, p, t) = (params.n as f64, params.r, params.p, params.t);
        let ln_n = n.ln();
        let p_exp = params.target_exponent();
        let a = if r <= 0.5 {
            k.powf(p) * p.powf(p) * n.powf(1.0 - 2.0 * r) * ln_n.powf(p)
                / (p + (1.0 - 2.0 * r) * ln_n).powf(p)
        } else {
            k.powf(p) * ln_n.powf(p) / (1.0 + (2.0 * r - 1.0) * ln_n)
                + k.powf(p) * ln_n.powf(p - 1.0)
        };
        let b = if p < 2.0 {
            let e = 2.0 - 2.0 * r - p;
            k * (1.0
                + (ln_n / (1.0 + e.abs() * ln_n)).powf(2.0 - p) * (1.0 + n.powf(e)))
        } else {
            k.powf(p)
        };
        let r_bound = a + b * t.powf(p_exp);
        (r_bound.powf(1.0 / p_exp), r_bound)
    }
}

// ---------------------------------------------------------------------------
// Case II: p in [1, 3/2), coefficients i^{-2r} (ln(n/i) + t^2/i)^{-(3-2p)/2}
// on the first floor(n/e) indices.
// ---------------------------------------------------------------------------

pub struct CaseII;

/// The deterministic weight sum `T = sum_{i<=n/e} i^{-2r} (ln(n/i)+t^2/i)^{p-1}`.
pub fn case_ii_weight_sum(params: &Params) -> f64 {
    let m = support_n_over_e(params.n);
    let (n, r, p, t) = (params.n as f64, params.r, params.p, params.t);
    sum_terms(m, |i| {
        let g = (n / i as f64).ln() + t * t / i as f64;
        (i as f64).powf(-2.0 * r) * pow0(g, p - 1.0)
    })
}

impl CaseConstruction for CaseII {
    fn tag(&self) -> CaseTag {
        CaseTag::II
    }
    fn name(&self) -> &'static str {
        "case-ii"
    }

    fn build(&self, params: &Params) -> Result<SharpNorm> {
        check_tag(params, CaseTag::II)?;
        let m = support_n_over_e(params.n);
        let (n, r, p, t) = (params.n as f64, params.r, params.p, params.t);
        let expo = -(3.0 - 2.0 * p) / 2.0;
        let coeffs: Vec<f64> = (1..=m)
            .map(|i| {
                let g = (n / i as f64).ln() + t * t / i as f64;
                (i as f64).powf(-2.0 * r) * g.powf(expo)
            })
            .collect();
        validate_non_increasing(&coeffs)?;
        Ok(SharpNorm { case: CaseTag::II, params: *params, coeffs, kind: EvalKind::WeightedSum })
    }

    fn holder_factor(&self, params: &Params, _sn: &SharpNorm) -> Result<HolderFactor> {
        if params.is_degenerate() {
            return Ok(degenerate_factor(params));
        }
        let t_sum = case_ii_weight_sum(params);
        Ok(HolderFactor {
            value: peel_constant(params.n) * t_sum.powf(3.0 - 2.0 * params.p),
            degenerate: false,
        })
    }

    fn paper_s_r(&self, params: &Params, k: f64) -> (f64, f64) {
        let s = k * case_ii_weight_sum(params);
        (s, s)
    }
}

// ---------------------------------------------------------------------------
// Case III: p < 3/2 - 2r, coefficients i^{-2r} over the full range.
// ---------------------------------------------------------------------------

pub struct CaseIII;

impl CaseConstruction for CaseIII {
    fn tag(&self) -> CaseTag {
        CaseTag::III
    }
    fn name(&self) -> &'static str {
        "case-iii"
    }

    fn build(&self, params: &Params) -> Result<SharpNorm> {
        check_tag(params, CaseTag::III)?;
        let coeffs: Vec<f64> =
            (1..=params.n).map(|i| (i as f64).powf(-2.0 * params.r)).collect();
        validate_non_increasing(&coeffs)?;
        Ok(SharpNorm { case: CaseTag::III, params: *params, coeffs, kind: EvalKind::WeightedSum })
    }

    fn holder_factor(&self, params: &Params, _sn: &SharpNorm) -> Result<HolderFactor> {
        if params.is_degenerate() {
            return Ok(degenerate_factor(params));
        }
        let w = power_sum_exact(params.n, 2.0 * params.r);
        Ok(HolderFactor { value: w.powf(3.0 - 2.0 * params.p), degenerate: false })
    }

    fn paper_s_r(&self, params: &Params, k: f64) -> (f64, f64) {
        let (n, r, p, t) = (params.n as f64, params.r, params.p, params.t);
        let ln_n = n.ln();
        let s = k * n.powf(1.0 - 2.0 * r)
            + k * n.powf((1.0 - 4.0 * r) / 2.0)
                * (ln_n / (1.0 + (1.0 - 4.0 * r) * ln_n)).sqrt()
                * t;
        let r_bound =
            k * n.powf((1.0 - 2.0 * r) * (3.0 - 2.0 * p)) * pow0(s, params.target_exponent());
        (s, r_bound)
    }
}

// ---------------------------------------------------------------------------
// Case IVa: p = 2(1-r), r in (1/4, 1/2], (1-2r) ln n >= e. Coefficients
// beta_i^{-(3-2p)/(2(p-1))} i^{-r/(p-1)} on the first floor(n/e) indices.
// ---------------------------------------------------------------------------

pub struct CaseIVa;

impl CaseConstruction for CaseIVa {
    fn tag(&self) -> CaseTag {
        CaseTag::IVa
    }
    fn name(&self) -> &'static str {
        "case-iva"
    }

    fn build(&self, params: &Params) -> Result<SharpNorm> {
        check_tag(params, CaseTag::IVa)?;
        let internals = compute_case_iv_internals(params)?;
        let coeffs = internals.weights(params);
        validate_non_increasing(&coeffs)?;
        Ok(SharpNorm { case: CaseTag::IVa, params: *params, coeffs, kind: EvalKind::WeightedSum })
    }

    fn holder_factor(&self, params: &Params, _sn: &SharpNorm) -> Result<HolderFactor> {
        let internals = compute_case_iv_internals(params)?;
        let beta_sum = sum_terms(internals.beta.len(), |i| internals.beta[i - 1]);
        Ok(HolderFactor {
            value: peel_constant(params.n) * beta_sum.powf(3.0 - 2.0 * params.p),
            degenerate: false,
        })
    }

    fn paper_s_r(&self, params: &Params, k: f64) -> (f64, f64) {
        let (n, r, p, t) = (params.n as f64, params.r, params.p, params.t);
        let ln_n = n.ln();
        let kk = k.powf(1.0 / (p - 1.0));
        let s = kk
            * (1.0 - 2.0 * r).powf(-p / (2.0 * (p - 1.0)))
            * ln_n.powf(-(3.0 - 2.0 * p) / (2.0 * (p - 1.0)))
            * n.sqrt()
            + kk * ln_n.sqrt() * t;
        let r_bound = k * ln_n.powf(3.0 - 2.0 * p) * s.powf(params.target_exponent());
        (s, r_bound)
    }
}

// ---------------------------------------------------------------------------
// Case IVb: p = 2(1-r), (1-2r) ln n < e. The Euclidean norm.
// ---------------------------------------------------------------------------

pub struct CaseIVb;

impl CaseConstruction for CaseIVb {
    fn tag(&self) -> CaseTag {
        CaseTag::IVb
    }
    fn name(&self) -> &'static str {
        "case-ivb"
    }

    fn build(&self, params: &Params) -> Result<SharpNorm> {
        check_tag(params, CaseTag::IVb)?;
        Ok(SharpNorm {
            case: CaseTag::IVb,
            params: *params,
            coeffs: vec![1.0; params.n],
            kind: EvalKind::Euclidean,
        })
    }

    fn holder_factor(&self, params: &Params, _sn: &SharpNorm) -> Result<HolderFactor> {
        if params.is_degenerate() {
            return Ok(degenerate_factor(params));
        }
        let p = params.p;
        let w = power_sum_exact(params.n, 2.0 * params.r / (2.0 - p));
        Ok(HolderFactor { value: w.powf(2.0 - p), degenerate: false })
    }

    fn paper_s_r(&self, params: &Params, k: f64) -> (f64, f64) {
        let (n, t) = (params.n as f64, params.t);
        let s = k * n.sqrt() + t;
        let r_bound = k * n.ln() * pow0(s, params.target_exponent());
        (s, r_bound)
    }
}
