use frobpade::curve::{self, CurveCase, CurveEval};
use frobpade::orthoexp::Interval;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rug::{Float, Rational};

fn iv(a: f64, b: f64) -> Interval {
    Interval::from_f64(a, b).unwrap()
}

/// `∫ ρ(x) dx/(z − x)` with `x = lo + (hi − lo) s(t)`, `s(t) = t⁶/(t⁶ + (1 − t)⁶)`,
/// and the midpoint rule in `t`; the substitution absorbs edge singularities
/// up to `|x − e|^{-5/6}`.
fn cauchy_oracle<F: Fn(f64) -> f64>(rho: F, lo: f64, hi: f64, z: C64) -> C64 {
    let n = 40000;
    let h = 1.0 / n as f64;
    (0..n)
        .map(|k| {
            let t = (k as f64 + 0.5) * h;
            let (a, b) = (t.powi(6), (1.0 - t).powi(6));
            let s = a / (a + b);
            let ds = 6.0 * (t * (1.0 - t)).powi(5) / (a + b).powi(2);
            let x = lo + (hi - lo) * s;
            rho(x) * (hi - lo) * ds * h / (z - x)
        })
        .sum()
}

#[test]
fn touching_endpoint_closed_form() {
    let k = curve::solve_curve(&iv(-1.0, 0.0), &iv(0.0, 3.0), &Rational::from((1, 3)), 256).unwrap();
    assert_eq!(k.case, CurveCase::DegenerateTouching);
    let exact = Float::with_val(256, Rational::from((19683, 8100)));
    let err = Float::with_val(256, &k.endpoints.b_sigma_c - &exact).abs();
    assert!(err < 1e-70, "{}", err.to_f64());
    assert!((k.b_sigma_c64() - 2.43).abs() < 1e-15);
}

#[test]
fn branches_are_cauchy_transforms_of_the_densities() {
    for (mu, sigma, c) in [((-1.0, 1.0), (2.0, 3.0), (1, 2)), ((-1.0, 1.0), (2.0, 3.0), (1, 20)), ((-1.0, 0.0), (0.0, 3.0), (1, 3))] {
        let k = curve::solve_curve(&iv(mu.0, mu.1), &iv(sigma.0, sigma.1), &Rational::from(c), 192).unwrap();
        let e = CurveEval::new(&k);
        for z in [C64::new(0.5, 2.0), C64::new(2.5, -0.3), C64::new(-3.0, 0.1)] {
            let sv = curve::branches_at(&e, z).unwrap();
            let (sl, sh) = e.sigma_c;
            let (ml, mh) = e.mu;
            let h0 = cauchy_oracle(|x| e.density_at(x), sl, sh, z);
            let h2 = -cauchy_oracle(|x| e.density_at(x), ml, mh, z);
            assert!((sv.h0 - h0).norm() < 1e-6, "{:?} {z}: {} vs {}", k.case, sv.h0, h0);
            assert!((sv.h2 - h2).norm() < 1e-6, "{:?} {z}: {} vs {}", k.case, sv.h2, h2);
        }
    }
}

#[test]
fn branches_solve_the_cubic_and_respect_conjugation() {
    let k = curve::solve_curve(&iv(-1.0, 1.0), &iv(2.0, 3.0), &Rational::from((7, 20)), 192).unwrap();
    let e = CurveEval::new(&k);
    for z in [C64::new(1.5, 0.4), C64::new(-2.0, 1.0), C64::new(4.0, 3.0)] {
        let a = curve::branches_at(&e, z).unwrap();
        let b = curve::branches_at(&e, z.conj()).unwrap();
        let (p, q) = e.coeffs(z);
        for h in [a.h0, a.h1, a.h2] {
            assert!((h * h * h + p * h + q).norm() < 1e-12 * (1.0 + q.norm()));
        }
        assert!((a.h0 + a.h1 + a.h2).norm() < 1e-12);
        assert!((a.h0 - b.h0.conj()).norm() < 1e-12 && (a.h2 - b.h2.conj()).norm() < 1e-12);
    }
    assert!(curve::branches_at(&e, C64::new(2.0, 0.0)).is_err());
}

#[test]
fn invalid_inputs_rejected() {
    assert!(curve::solve_curve(&iv(-1.0, 1.0), &iv(0.5, 3.0), &Rational::from((1, 3)), 128).is_err());
    assert!(curve::solve_curve(&iv(-1.0, 1.0), &iv(2.0, 3.0), &Rational::from((3, 5)), 128).is_err());
    assert!(curve::solve_curve(&iv(-1.0, 1.0), &iv(2.0, 3.0), &Rational::from(0), 128).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn reflection_and_masses(lm in 0.5f64..2.0, gap in 0.2f64..1.5, ls in 0.5f64..3.0, c in 0.05f64..0.5) {
        let c = Rational::from_f64((c * 64.0).round() / 64.0).unwrap();
        let mu = iv(-lm, 0.0);
        let sigma = iv(gap, gap + ls);
        let k = curve::solve_curve(&mu, &sigma, &c, 192).unwrap();
        let r = curve::solve_curve(&iv(0.0, lm), &iv(-gap - ls, -gap), &c, 192).unwrap();
        prop_assert!((k.b_sigma_c64() + r.b_sigma_c64()).abs() < 1e-12);
        prop_assert!(k.square_residual < 1e-40);
        let (m1, m2) = CurveEval::new(&k).masses(1e-13);
        prop_assert!((m1 - 1.0).abs() < 1e-8 && (m2 - c.to_f64()).abs() < 1e-8, "{} {}", m1, m2);
        prop_assert!(k.b_sigma_c64() > gap && k.b_sigma_c64() <= gap + ls + 1e-15);
    }
}
