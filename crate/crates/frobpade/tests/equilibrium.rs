use frobpade::equilibrium::{self, equilibrium_oracle, Domain};
use frobpade::orthoexp::Interval;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rug::Rational;

fn iv(a: &str, b: &str) -> Interval {
    Interval::parse(a, b).unwrap()
}

#[test]
fn potentials_behave_like_logarithms_at_infinity() {
    let (_, eq) = equilibrium::equilibrium_for(&iv("-1", "1"), &iv("2", "3"), &Rational::from((7, 20)), 192).unwrap();
    let z = C64::new(3e5, 4e5);
    assert!((eq.tau_mu.potential(z) + z.norm().ln()).abs() < 1e-5);
    assert!((eq.tau_sigma.potential(z) + 0.35 * z.norm().ln()).abs() < 1e-5);
}

#[test]
fn arcsine_potential_has_the_closed_form() {
    // V of the arcsine distribution of [-1, 1] is log 2 − log|z + √(z² − 1)|
    let d = equilibrium::ChebDensity::from_values(-1.0, 1.0, &[1.0; 8]);
    for z in [C64::new(0.3, 0.0), C64::new(2.0, 0.0), C64::new(0.5, 1.5)] {
        let w = z + (z * z - 1.0).sqrt();
        let w = if w.norm() < 1.0 { z - (z * z - 1.0).sqrt() } else { w };
        let exact = 2f64.ln() - w.norm().ln();
        assert!((d.potential(z) - exact).abs() < 1e-13, "{z}");
    }
}

#[test]
fn curve_and_iteration_agree() {
    let (mu, sigma) = (iv("-1", "1"), iv("2", "3"));
    for c in [(1, 5), (1, 2)] {
        let (_, eq) = equilibrium::equilibrium_for(&mu, &sigma, &Rational::from(c), 192).unwrap();
        let oracle = equilibrium_oracle(&mu, &sigma, Rational::from(c).to_f64(), 64).unwrap();
        assert!((eq.ell_sigma - oracle.ell_sigma).abs() < 1e-4);
        assert!((eq.ell_mu - oracle.ell_mu).abs() < 1e-4);
        let (rs, rm) = equilibrium::residuals(&eq, 64);
        assert!(rs < 1e-10 && rm < 1e-10, "{rs} {rm}");
    }
}

#[test]
fn classification_far_away_depends_on_c() {
    let (mu, sigma) = (iv("-1", "1"), iv("2", "3"));
    let (_, eq) = equilibrium::equilibrium_for(&mu, &sigma, &Rational::from((1, 3)), 192).unwrap();
    assert_eq!(eq.classify(C64::new(1e6, 0.0)), Domain::DivergenceMinus);
    assert_eq!(eq.classify(C64::new(1.5, 0.0)), Domain::ConvergencePlus);
    let (_, half) = equilibrium::equilibrium_for(&mu, &sigma, &Rational::from((1, 2)), 192).unwrap();
    assert_eq!(half.classify(C64::new(1e6, 0.0)), Domain::ConvergencePlus);
}

#[test]
fn classifier_vanishes_where_the_trajectory_starts() {
    let (curve, eq) = equilibrium::equilibrium_for(&iv("-1", "0"), &iv("0", "3"), &Rational::from((1, 3)), 192).unwrap();
    let b = curve.b_sigma_c64();
    assert!(eq.classifier(C64::new(b, 0.0)).abs() < 1e-4);
    assert!(eq.classifier(C64::new(1.2, 0.0)).abs() < 1e-4);
    assert!(eq.classifier(C64::new(b + 0.05, 0.0)) < 0.0);
    assert_eq!(eq.classify(C64::new(2.8, 0.0)), Domain::DivergenceMinus);
}

#[test]
fn raster_labels_agree_with_pointwise_classification() {
    let (_, eq) = equilibrium::equilibrium_for(&iv("-1", "0"), &iv("0", "3"), &Rational::from((1, 3)), 128).unwrap();
    let rows = equilibrium::domain_raster(&eq, (-2.0, 4.0), (0.5, 2.0), 7, 3);
    assert_eq!(rows.len(), 21);
    for (x, y, v, d) in rows {
        assert_eq!(eq.classify(C64::new(x, y)), d);
        assert_eq!(eq.classifier(C64::new(x, y)), v);
    }
    let csv = equilibrium::raster_csv(&equilibrium::domain_raster(&eq, (0.0, 1.0), (1.0, 1.0), 2, 1));
    assert_eq!(csv.lines().count(), 3);
    assert!(eq.log_phi_modulus(C64::new(0.0, 1.0), 3, 1, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn sheet_moduli_multiply_to_one(re in -5.0f64..6.0, im in -4.0f64..4.0, m in 0usize..80, n in 1usize..40) {
        let (_, eq) = equilibrium::equilibrium_for(&iv("-1", "1"), &iv("2", "3"), &Rational::from((1, 3)), 128).unwrap();
        let z = C64::new(re, im);
        let s: f64 = (0..3).map(|k| eq.log_phi_modulus(z, k, m, n).unwrap()).sum();
        let scale = (m + n) as f64 * (1.0 + z.norm().ln().abs());
        prop_assert!(s.abs() < 1e-12 * scale.max(1.0));
    }
}
