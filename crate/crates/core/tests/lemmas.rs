//! Two-sided envelope checks with frozen constants: every oracle value must
//! sit inside its bound on the standard grids, the two weighted-log-sum
//! branches must agree at `a = 1`, and the auxiliary secant-slope inequality
//! is covered through the plus-sign family.

use lorentz_sharp_core::bounds::{
    incomplete_gamma_bounds, median_formula_bound, power_integral_bound, weighted_log_sum_bound,
};
use lorentz_sharp_core::constants::ConstantsStore;
use lorentz_sharp_core::lorentz::{psi_sorted, sphere_sup, sphere_sup_bound};
use lorentz_sharp_core::mc::empirical_median_of;
use lorentz_sharp_core::quad::{incomplete_gamma_quadrature, GammaSign};
use lorentz_sharp_core::rearrange::rearrange;
use lorentz_sharp_core::sums::{power_integral_exact, power_sum_exact, weighted_log_sum_exact};
use lorentz_sharp_core::DEFAULT_SEED;

fn store() -> ConstantsStore {
    ConstantsStore::load_default()
        .expect("frozen constants present: run `lorentz-sharp fit-constants --freeze`")
}

const STD_BQ: [f64; 8] = [0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0];

#[test]
fn incomplete_gamma_envelopes_on_standard_grid() {
    let store = store();
    for sign in [GammaSign::Minus, GammaSign::Plus] {
        for b in STD_BQ {
            for q in STD_BQ {
                let oracle = incomplete_gamma_quadrature(b, q, sign).unwrap();
                let bound = incomplete_gamma_bounds(b, q, sign, &store).unwrap();
                assert!(
                    bound.contains(oracle),
                    "sign {sign:?} b={b} q={q}: {oracle} outside [{}, {}]",
                    bound.lower,
                    bound.upper
                );
            }
        }
    }
}

#[test]
fn incomplete_gamma_spec_points() {
    let store = store();
    // minus sign, b=1, q=0: envelope is the bare constant window and must
    // bracket 1 - 1/e
    let b = incomplete_gamma_bounds(1.0, 0.0, GammaSign::Minus, &store).unwrap();
    let fc = store.get("incomplete-gamma-minus").unwrap();
    assert_eq!(b.lower, fc.c_fit);
    assert_eq!(b.upper, fc.c_cap);
    assert!(b.contains(0.6321205588285577));
    // minus sign, b=50, q=3: brackets Gamma(4) = 6
    let b = incomplete_gamma_bounds(50.0, 3.0, GammaSign::Minus, &store).unwrap();
    assert!(b.contains(6.0));
    assert_eq!(b.normalization_exponent, 4.0);
}

#[test]
fn secant_slope_auxiliary_inequality() {
    // (e^z - 1)/z against e^z/(1+z): the q = 0 slice of the plus family.
    let store = store();
    let fc = store.get("incomplete-gamma-plus").unwrap();
    for z in [0.01f64, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 50.0] {
        let secant = z.exp_m1() / z;
        let shape = z.exp() / (1.0 + z);
        assert!(
            fc.c_fit * shape <= secant && secant <= fc.c_cap * shape,
            "z={z}: {secant} outside window around {shape}"
        );
    }
}

#[test]
fn weighted_log_sum_envelope_on_standard_grid() {
    let store = store();
    for n in [10usize, 100, 1_000, 10_000, 100_000] {
        for a in [0.0, 0.3, 0.7, 1.0, 1.5, 3.0] {
            for q in [0.0, 0.5, 1.0, 2.0] {
                let oracle = weighted_log_sum_exact(n, a, q);
                let bound = weighted_log_sum_bound(n, a, q, &store).unwrap();
                assert!(
                    bound.contains(oracle),
                    "n={n} a={a} q={q}: {oracle} outside [{}, {}]",
                    bound.lower,
                    bound.upper
                );
            }
        }
    }
    // spec sanity: a <= 1 branch must bracket the plain count
    let bound = weighted_log_sum_bound(100, 0.0, 0.0, &store).unwrap();
    assert!(bound.contains(100.0));
    // a >= 1 branch around the converging power sum
    let bound = weighted_log_sum_bound(10_000, 2.0, 0.0, &store).unwrap();
    assert!(bound.contains(weighted_log_sum_exact(10_000, 2.0, 0.0)));
}

#[test]
fn weighted_log_sum_branches_agree_at_a_one() {
    let store = store();
    let rows = lorentz_sharp_core::family::weighted_log_sum_branch_agreement(&store).unwrap();
    assert!(rows.len() >= 9);
    for row in rows {
        assert!(row.pass, "branch agreement failed: {}", row.statistic);
    }
    // direct check at the spec's example point (n=10, a=1, q=1)
    let exact = weighted_log_sum_exact(10, 1.0, 1.0);
    let bound = weighted_log_sum_bound(10, 1.0, 1.0, &store).unwrap();
    assert!(bound.contains(exact));
}

#[test]
fn power_integral_envelope() {
    let store = store();
    for a in [-2.0, -0.5, 0.0, 0.3, 0.7, 1.0, 1.1, 2.0, 3.0, 5.0] {
        for t_end in [1.0, 1.5, std::f64::consts::E, 10.0, 1_000.0, 1e6, 1e8] {
            let oracle = power_integral_exact(a, t_end);
            let bound = power_integral_bound(a, t_end, &store).unwrap();
            assert!(
                bound.contains(oracle),
                "a={a} T={t_end}: {oracle} outside [{}, {}]",
                bound.lower,
                bound.upper
            );
        }
    }
    // spec trivials
    assert!(power_integral_bound(1.0, std::f64::consts::E, &store).unwrap().contains(1.0));
    assert!(power_integral_bound(0.0, 10.0, &store).unwrap().contains(9.0));
    assert!(power_integral_bound(2.0, 1e6, &store).unwrap().contains(1.0 - 1e-6));
}

#[test]
fn median_formula_envelope_spec_points() {
    let store = store();
    // (n=1000, r=0, p=2): brackets the Monte Carlo median of sum X_[i]^2
    // (which concentrates at n)
    let med = empirical_median_of(
        |x| psi_sorted(&rearrange(&x).unwrap(), 0.0, 2.0),
        1000,
        4000,
        DEFAULT_SEED,
        "psi",
    )
    .unwrap();
    assert!((med.point / 1000.0 - 1.0).abs() < 0.05, "chi-square median sanity");
    let bound = median_formula_bound(1000, 0.0, 2.0, &store).unwrap();
    assert!(bound.contains(med.point), "{} outside [{}, {}]", med.point, bound.lower, bound.upper);

    // (n=100, r=2, p=1): the r >= 1 branch
    let med = empirical_median_of(
        |x| psi_sorted(&rearrange(&x).unwrap(), 2.0, 1.0),
        100,
        4000,
        DEFAULT_SEED ^ 5,
        "psi",
    )
    .unwrap();
    let bound = median_formula_bound(100, 2.0, 1.0, &store).unwrap();
    assert!(bound.contains(med.point), "{} outside [{}, {}]", med.point, bound.lower, bound.upper);

    // (n=10, r=1, p=0): deterministic harmonic sum under 0^0 = 1
    let h10 = power_sum_exact(10, 1.0);
    let bound = median_formula_bound(10, 1.0, 0.0, &store).unwrap();
    assert!(bound.contains(h10));
}

#[test]
fn sphere_sup_envelope_spec_points() {
    let store = store();
    for (n, r, p) in [(10_000usize, 0.0, 1.0), (1_000, 1.0, 1.0), (100, 0.4, 0.5)] {
        let sup = sphere_sup(n, r, p);
        let bound = sphere_sup_bound(n, r, p, &store).unwrap();
        assert!(
            bound.contains(sup),
            "n={n} r={r} p={p}: {sup} outside [{}, {}]",
            bound.lower,
            bound.upper
        );
    }
    // the first point is exactly sqrt(n)
    assert!((sphere_sup(10_000, 0.0, 1.0) - 100.0).abs() < 1e-10);
    // p >= 2 and p <= 0 are rejected
    assert!(sphere_sup_bound(100, 0.3, 2.0, &store).is_err());
    assert!(sphere_sup_bound(100, 0.3, 0.0, &store).is_err());
}

#[test]
fn paper_mode_certificates_track_exact_mode() {
    use lorentz_sharp_core::params::Params;
    use lorentz_sharp_core::sharp::{certificate_exact, certificate_paper, McConfig};
    let store = store();
    let mc = McConfig { seed: DEFAULT_SEED, samples: 2000 };
    for (n, r, p, t) in [
        (1000usize, 1.0, 2.0, 2.0),  // I
        (1000, 0.45, 1.2, 1.0),      // II
        (1000, 0.1, 1.2, 3.0),       // III
        (10_000, 0.3, 1.4, 2.0),     // IVa
        (100, 0.3, 1.4, 1.0),        // IVb
    ] {
        let params = Params::new(n, r, p, t).unwrap();
        let (_, exact) = certificate_exact(&params, &mc).unwrap();
        let (_, paper) = certificate_paper(&params, &store).unwrap();
        let ratio = paper.r_bound / exact.r_bound;
        assert!(
            (1.0 / 16.0..=16.0).contains(&ratio),
            "case {}: paper/exact R ratio {ratio}",
            exact.case
        );
        assert_eq!(paper.mode, lorentz_sharp_core::sharp::CertMode::Paper);
    }
}

#[test]
fn paper_mode_requires_frozen_constants() {
    use lorentz_sharp_core::params::Params;
    use lorentz_sharp_core::sharp::certificate_paper;
    let params = Params::new(100, 0.1, 1.2, 1.0).unwrap();
    let empty = ConstantsStore::new();
    assert!(certificate_paper(&params, &empty).is_err());
}
