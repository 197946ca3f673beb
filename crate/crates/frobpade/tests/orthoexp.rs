use frobpade::mp::Cplx;
use frobpade::orthoexp::{self, Interval, MeasureSpec, Weight};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rug::{Float, Rational};

fn chebyshev_mean<F: Fn(f64) -> C64>(a: f64, b: f64, n: usize, f: F) -> C64 {
    // Gauss-Chebyshev rule of the arcsine distribution
    (0..n)
        .map(|k| {
            let t = ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos();
            f(0.5 * (a + b) + 0.5 * (b - a) * t)
        })
        .sum::<C64>()
        / n as f64
}

#[test]
fn markov_function_at_origin() {
    // ∫ dσ(t)/t over the arcsine distribution of [2, 3] equals 1/√6
    let sigma = MeasureSpec::arcsine(Interval::parse("2", "3").unwrap());
    let v = orthoexp::cauchy_transform(&sigma, &Cplx::from_f64(128, 0.0, 0.0), 128).unwrap().to_c64();
    let oracle = chebyshev_mean(2.0, 3.0, 64, |t| C64::new(1.0 / t, 0.0));
    assert!((v.re - oracle.re).abs() < 1e-15);
    assert!((v.re - 1.0 / 6f64.sqrt()).abs() < 1e-15);
    assert_eq!(v.im, 0.0);
}

#[test]
fn weighted_cauchy_transform_matches_quadrature() {
    let w = Weight::polynomial(vec![Rational::from(2), Rational::from(-1), Rational::from((1, 4))]);
    let spec = MeasureSpec::new(Interval::parse("-1", "2").unwrap(), w, None).unwrap();
    for z in [C64::new(3.0, 0.0), C64::new(0.5, 0.7), C64::new(-2.0, -1.0)] {
        let v = orthoexp::cauchy_transform(&spec, &Cplx::from_c64(128, z), 128).unwrap().to_c64();
        let oracle = chebyshev_mean(-1.0, 2.0, 400, |t| (2.0 - t + 0.25 * t * t) / (t - z));
        assert!((v - oracle).norm() < 1e-12, "{z}: {v} vs {oracle}");
    }
}

#[test]
fn boundary_value_jump_is_the_density() {
    let sigma = MeasureSpec::arcsine(Interval::parse("2", "3").unwrap());
    let x = 2.3f64;
    let plus = orthoexp::cauchy_boundary_value(&sigma, &Float::with_val(128, x), 128).unwrap().to_c64();
    let near = orthoexp::cauchy_transform(&sigma, &Cplx::from_f64(128, x, 1e-20), 128).unwrap().to_c64();
    assert!((plus - near).norm() < 1e-12);
    // Im ν̂⁺ = π · density per unit length
    let density = 1.0 / (std::f64::consts::PI * ((x - 2.0) * (3.0 - x)).sqrt());
    assert!((plus.im - std::f64::consts::PI * density).abs() < 1e-14);
}

#[test]
fn bad_intervals_and_weights_rejected() {
    assert!(Interval::parse("1", "1").is_err());
    assert!(Interval::parse("2", "1").is_err());
    let w = Weight::polynomial(vec![Rational::from(-1)]);
    assert!(MeasureSpec::new(Interval::parse("0", "1").unwrap(), w, None).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn gauss_rule_integrates_polynomials(a in -3.0f64..0.0, len in 0.5f64..4.0, deg in 0usize..15, c1 in 0.0f64..0.9) {
        let iv = Interval::from_f64(a, a + len).unwrap();
        let w = Weight::polynomial(vec![Rational::from(1), Rational::from_f64(c1 / len.max(a.abs() + len)).unwrap()]);
        let spec = MeasureSpec::new(iv, w.clone(), None).unwrap();
        let rec = orthoexp::recurrence_coeffs(&spec, 12, 128).unwrap();
        let rule = orthoexp::gauss_rule(&rec, 8).unwrap();
        let got = rule.integrate(|x| Float::with_val(128, rug::ops::Pow::pow(x, deg as u32))).to_f64();
        let oracle = chebyshev_mean(a, a + len, 64, |t| C64::new(t.powi(deg as i32) * w.eval64(t), 0.0)).re;
        prop_assert!((got - oracle).abs() <= 1e-12 * oracle.abs().max(1.0));
    }

    #[test]
    fn orthonormality_on_the_gauss_rule(a in -2.0f64..1.0, len in 0.5f64..3.0) {
        let spec = MeasureSpec::arcsine(Interval::from_f64(a, a + len).unwrap());
        let rec = orthoexp::recurrence_coeffs(&spec, 12, 128).unwrap();
        let rule = orthoexp::gauss_rule(&rec, 12).unwrap();
        let vals: Vec<Vec<Float>> = rule.nodes.iter().map(|x| orthoexp::eval_poly_real(&rec, 6, x)).collect();
        for i in 0..=6 {
            for j in 0..=6 {
                let g: f64 = vals.iter().zip(&rule.weights).map(|(p, w)| Float::with_val(128, w * &p[i]) * &p[j]).map(|v| v.to_f64()).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((g - expect).abs() < 1e-13);
            }
        }
    }
}
