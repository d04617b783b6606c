//! Certificate-level behaviour: definitional identities, the degenerate
//! path, serialization, coverage monotonicity in `t`, envelope checks of the
//! order-statistic claims, and the stationarity probe.

use lorentz_sharp_core::constants::ConstantsStore;
use lorentz_sharp_core::mc::rng::{par_map_gaussian, GaussianStreams};
use lorentz_sharp_core::mc::{
    coverage_check, order_stat_envelope_check, simultaneous_median_band_check,
};
use lorentz_sharp_core::oracle;
use lorentz_sharp_core::params::{CaseTag, Params};
use lorentz_sharp_core::sharp::{
    build_sharp_norm, certificate_exact, certificate_exact_with_median, implication_check,
    lagrange_stationarity_probe, sharp_lipschitz, BoundCertificate, McConfig,
};
use lorentz_sharp_core::DEFAULT_SEED;

fn store() -> ConstantsStore {
    ConstantsStore::load_default().expect("frozen constants present")
}

#[test]
fn case_i_r_equals_s_power() {
    let params = Params::new(500, 1.0, 2.0, 2.0).unwrap();
    let (_, cert) = certificate_exact(&params, &McConfig { seed: 1, samples: 1000 }).unwrap();
    assert_eq!(cert.case, CaseTag::I);
    assert_eq!(cert.holder_factor, 1.0);
    let expect = cert.s.powf(params.target_exponent());
    assert!((cert.r_bound - expect).abs() <= 1e-12 * expect);
}

#[test]
fn case_iii_r_is_definitional() {
    let params = Params::new(100, 0.1, 1.2, 2.0).unwrap();
    let (_, cert) = certificate_exact(&params, &McConfig { seed: 2, samples: 1000 }).unwrap();
    let expect = cert.holder_factor * cert.s.powf(0.4);
    assert!((cert.r_bound - expect).abs() <= 1e-12 * expect);
    assert!((cert.tail_bound - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
}

#[test]
fn case_ivb_median_is_near_sqrt_n() {
    // the Euclidean construction: S = median(|X|_2) + t, median/sqrt(n)
    // within 1% at n = 1e4
    let params = Params::new(10_000, 0.4, 1.2, 1.0).unwrap();
    assert_eq!(params.case(), CaseTag::IVb);
    let (sn, cert) =
        certificate_exact(&params, &McConfig { seed: DEFAULT_SEED, samples: 2000 }).unwrap();
    assert_eq!(sharp_lipschitz(&sn), 1.0);
    let median = cert.s - params.t;
    let ratio = median / (params.n as f64).sqrt();
    assert!((0.99..=1.01).contains(&ratio), "ratio {ratio}");
}

#[test]
fn degenerate_certificate_semantics() {
    let params = Params::new(200, 0.35, 1.0, 2.0).unwrap();
    let (sn, cert) = certificate_exact(&params, &McConfig { seed: 3, samples: 500 }).unwrap();
    assert!(cert.degenerate);
    assert!(cert.s.is_infinite());
    // R equals the deterministic target value, so every vector passes
    for x in [vec![0.0; 200], vec![1e6; 200], vec![-3.0; 200]] {
        assert!(implication_check(&x, &cert, &sn).unwrap());
    }
    // coverage never observes an exceedance
    let est = coverage_check(&params, &cert, &sn, 500, 5).unwrap();
    assert_eq!(est.point, 0.0);
}

#[test]
fn implication_trivial_paths() {
    let params = Params::new(50, 0.1, 1.2, 1.0).unwrap();
    let (sn, cert) = certificate_exact(&params, &McConfig { seed: 7, samples: 500 }).unwrap();
    // zero vector: psi = 0 <= R
    assert!(implication_check(&vec![0.0; 50], &cert, &sn).unwrap());
    // a huge vector is vacuously fine (eval > S)
    let huge = vec![1e9; 50];
    assert!(sn.eval(&huge).unwrap() > cert.s);
    assert!(implication_check(&huge, &cert, &sn).unwrap());
    // dimension mismatch is an error
    assert!(implication_check(&[1.0, 2.0], &cert, &sn).is_err());
}

#[test]
fn certificate_serialization_roundtrip() {
    let params = Params::new(100, 0.45, 1.2, 1.5).unwrap();
    let (_, cert) = certificate_exact(&params, &McConfig { seed: 11, samples: 500 }).unwrap();
    let json = serde_json::to_string(&cert).unwrap();
    assert!(json.contains("\"S\":"));
    let back: BoundCertificate = serde_json::from_str(&json).unwrap();
    assert_eq!(back.s.to_bits(), cert.s.to_bits());
    assert_eq!(back.r_bound.to_bits(), cert.r_bound.to_bits());
    assert_eq!(back.coeffs_digest, cert.coeffs_digest);
    // degenerate S = infinity serializes as null and comes back infinite
    let dparams = Params::new(100, 0.35, 1.0, 1.0).unwrap();
    let (_, dcert) = certificate_exact(&dparams, &McConfig { seed: 11, samples: 500 }).unwrap();
    let djson = serde_json::to_string(&dcert).unwrap();
    assert!(djson.contains("\"S\":null"));
    let dback: BoundCertificate = serde_json::from_str(&djson).unwrap();
    assert!(dback.s.is_infinite());
}

#[test]
fn coverage_monotone_in_t_at_fixed_seed() {
    // t-independent construction (Case III): S strictly grows with t
    let mut last = f64::INFINITY;
    for t in [1.0, 2.0, 3.0] {
        let params = Params::new(300, 0.1, 1.2, t).unwrap();
        let (sn, cert) =
            certificate_exact(&params, &McConfig { seed: DEFAULT_SEED, samples: 2000 }).unwrap();
        let est = coverage_check(&params, &cert, &sn, 20_000, 99).unwrap();
        assert!(est.point <= last, "exceedance grew with t: {} > {last}", est.point);
        last = est.point;
    }
    // t-dependent construction (Case II): same-seed estimates still decay
    let mut last = f64::INFINITY;
    for t in [1.0, 2.0, 3.0] {
        let params = Params::new(300, 0.45, 1.2, t).unwrap();
        let (sn, cert) =
            certificate_exact(&params, &McConfig { seed: DEFAULT_SEED, samples: 2000 }).unwrap();
        let est = coverage_check(&params, &cert, &sn, 20_000, 99).unwrap();
        assert!(est.point <= last, "exceedance grew with t: {} > {last}", est.point);
        last = est.point;
    }
}

#[test]
fn order_stat_envelope_with_frozen_constant() {
    let store = store();
    let k = store.get("order-stat-envelope").unwrap().c_cap;
    for t in [1.0, 3.0] {
        let rep = order_stat_envelope_check(1000, t, k, 20_000, DEFAULT_SEED).unwrap();
        assert!(
            rep.empirical_violation_prob.ci_low <= rep.target,
            "t={t}: violation {} above target {}",
            rep.empirical_violation_prob.point,
            rep.target
        );
    }
    // a quarter of the constant visibly fails (the envelope is two-sidedly
    // meaningful)
    let rep = order_stat_envelope_check(1000, 1.0, k / 4.0, 2_000, DEFAULT_SEED).unwrap();
    assert!(rep.empirical_violation_prob.point > 0.5);
}

#[test]
fn median_band_with_frozen_constants() {
    let store = store();
    let fc = store.get("median-band").unwrap();
    for n in [1000usize, 10_000] {
        let rep =
            simultaneous_median_band_check(n, 4_000, DEFAULT_SEED, fc.c_fit, fc.c_cap).unwrap();
        assert!(rep.pass, "band probability {} at n={n}", rep.inside.point);
        assert!(rep.inside.point >= 0.51 - (rep.inside.ci_high - rep.inside.ci_low));
    }
}

#[test]
fn stationarity_probe_reports_bounded_improvement() {
    let params = Params::new(1000, 0.3, 1.4, 3.0).unwrap();
    let rep = lagrange_stationarity_probe(&params, 150, &McConfig { seed: 17, samples: 800 })
        .unwrap();
    assert_eq!(rep.perturbations, 150);
    assert!(rep.baseline_objective > 0.0);
    assert!(rep.worst_ratio > 0.0);
    assert!(rep.slack_ok, "worst improvement ratio {} below 1/4", rep.worst_ratio);
    // perturbations should not find dramatically better recipes
    assert!(rep.worst_ratio > 0.5, "suspiciously large improvement: {}", rep.worst_ratio);
}

#[test]
fn case_iva_lipschitz_dominates_finite_difference_probe() {
    use rand::SeedableRng;
    let params = Params::new(2000, 0.3, 1.4, 1.0).unwrap();
    assert_eq!(params.case(), CaseTag::IVa);
    let sn = build_sharp_norm(&params).unwrap();
    let lip = sharp_lipschitz(&sn);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
    let probe = oracle::lipschitz_probe(
        |x| sn.eval(x).unwrap(),
        params.n,
        2_000,
        &mut rng,
    );
    assert!(probe <= lip * (1.0 + 1e-9), "probe {probe} exceeds formula {lip}");
    // a pair directed along the coefficient direction attains the constant
    let norm: f64 = sn.coeffs.iter().map(|w| w * w).sum::<f64>().sqrt();
    let mut x = vec![0.0; params.n];
    let mut y = vec![0.0; params.n];
    for (i, w) in sn.coeffs.iter().enumerate() {
        x[i] = w / norm;
        y[i] = 2.0 * w / norm;
    }
    let directed = (sn.eval(&y).unwrap() - sn.eval(&x).unwrap()).abs();
    assert!(
        (directed - lip).abs() <= 1e-9 * lip,
        "directed difference {directed} should attain {lip}"
    );
}
