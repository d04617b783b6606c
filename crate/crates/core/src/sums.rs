//! Exact finite sums and integrals used as certificates and oracles.

use crate::numeric::{pow0, sum_terms};
use crate::{Error, Result};

/// `sum_{i=1}^{n} i^{-a}`.
pub fn power_sum_exact(n: usize, a: f64) -> f64 {
    debug_assert!(n >= 1);
    if a == 0.0 {
        return n as f64;
    }
    sum_terms(n, |i| (i as f64).powf(-a))
}

/// `sum_{i=1}^{n} i^{-a} (ln(n/i))^q` with the `0^0 = 1` convention at the
/// `i = n` term.
pub fn weighted_log_sum_exact(n: usize, a: f64, q: f64) -> f64 {
    debug_assert!(n >= 2);
    let nf = n as f64;
    sum_terms(n, |i| (i as f64).powf(-a) * pow0((nf / i as f64).ln().max(0.0), q))
}

/// Closed form of `int_1^T x^{-a} dx`, stable across `a = 1`.
pub fn power_integral_exact(a: f64, t_end: f64) -> f64 {
    debug_assert!(t_end >= 1.0);
    let ln_t = t_end.ln();
    let s = (1.0 - a) * ln_t;
    // (e^s - 1)/s with the limit 1 at s = 0
    let phi = if s.abs() < 1e-12 { 1.0 + 0.5 * s } else { s.exp_m1() / s };
    ln_t * phi
}

/// Checks `1/2 (f(1) + int_1^n f) <= sum_{i=1}^n f(i) <= f(1) + int_1^n f`
/// for a non-increasing tabulated `f`, with a trapezoid quadrature on
/// `subdiv` panels per unit interval.
pub fn sum_integral_sandwich_check(
    f: impl Fn(f64) -> f64,
    n: usize,
    subdiv: usize,
) -> Result<bool> {
    if n < 1 || subdiv < 1 {
        return Err(Error::InvalidParams(format!("need n, subdiv >= 1, got n={n} subdiv={subdiv}")));
    }
    let steps = (n - 1) * subdiv;
    let h = 1.0 / subdiv as f64;
    let mut prev = f(1.0);
    let f1 = prev;
    let mut integral = 0.0f64;
    for k in 1..=steps {
        let x = 1.0 + k as f64 * h;
        let val = f(x);
        if val > prev * (1.0 + 1e-12) + 1e-12 * (1.0 + prev.abs()) {
            return Err(Error::NotNonIncreasing(x));
        }
        integral += 0.5 * h * (prev + val);
        prev = val;
    }
    let sum: f64 = sum_terms(n, |i| f(i as f64));
    let upper = f1 + integral;
    let lower = 0.5 * upper;
    let slack = 1e-12 * (1.0 + sum.abs() + upper.abs());
    Ok(lower <= sum + slack && sum <= upper + slack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn power_sum_basics() {
        assert!((power_sum_exact(4, 1.0) - 25.0 / 12.0).abs() < 1e-15);
        assert_eq!(power_sum_exact(1000, 0.0), 1000.0);
        // frozen from the double-double re-summation oracle
        let v = power_sum_exact(100_000, 1.3);
        assert!((v - 3.8265401145841387).abs() < 1e-12 * v, "got {v}");
        let dd = oracle::dd_sum((1..=100_000).map(|i| (i as f64).powf(-1.3)));
        assert!((v - dd).abs() <= 1e-13 * v.abs());
    }

    #[test]
    fn weighted_log_sum_basics() {
        assert_eq!(weighted_log_sum_exact(2, 0.0, 0.0), 2.0);
        assert!((weighted_log_sum_exact(4, 1.0, 0.0) - 25.0 / 12.0).abs() < 1e-15);
        // frozen from the double-double re-summation oracle
        let v = weighted_log_sum_exact(1000, 0.5, 1.0);
        assert!((v - 112.4806860648801).abs() < 1e-11 * v, "got {v}");
        let dd = oracle::dd_sum(
            (1..=1000).map(|i| (i as f64).powf(-0.5) * (1000.0f64 / i as f64).ln()),
        );
        assert!((v - dd).abs() <= 1e-12 * v.abs());
        // i = n term under 0^0 = 1: q = 0 contributes a full unit
        let with_conv = weighted_log_sum_exact(10, 2.0, 0.0);
        assert!((with_conv - power_sum_exact(10, 2.0)).abs() < 1e-15);
    }

    #[test]
    fn power_integral_closed_forms() {
        assert!((power_integral_exact(1.0, std::f64::consts::E) - 1.0).abs() < 1e-14);
        assert!((power_integral_exact(0.0, 10.0) - 9.0).abs() < 1e-13);
        assert!((power_integral_exact(2.0, 1e6) - (1.0 - 1e-6)).abs() < 1e-12);
        assert_eq!(power_integral_exact(3.0, 1.0), 0.0);
        // stability across a = 1
        let near = power_integral_exact(1.0 + 1e-13, 100.0);
        assert!((near - 100.0f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn sandwich_examples() {
        // f = 1: sum = n, window [n/2, n]
        assert!(sum_integral_sandwich_check(|_| 1.0, 50, 4).unwrap());
        // f = 1/x, n = 4: 25/12 in [(1+ln4)/2, 1+ln4]
        assert!(sum_integral_sandwich_check(|x| 1.0 / x, 4, 64).unwrap());
        // f = x^{-1.5} ln(1000/x)
        assert!(sum_integral_sandwich_check(
            |x| x.powf(-1.5) * (1000.0 / x).ln(),
            1000,
            8
        )
        .unwrap());
        // increasing function is rejected
        assert!(matches!(
            sum_integral_sandwich_check(|x| x, 10, 4),
            Err(Error::NotNonIncreasing(_))
        ));
    }
}
