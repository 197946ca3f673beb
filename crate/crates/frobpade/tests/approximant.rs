use frobpade::approximant::{Approximant, FrobeniusIndex, FrobeniusProblem, Target};
use frobpade::mp::Cplx;
use frobpade::orthoexp::{self, Interval, MeasureSpec};
use proptest::prelude::*;
use rug::{Float, Rational};

fn problem(prec: u32) -> FrobeniusProblem {
    let mu = MeasureSpec::arcsine(Interval::parse("-1", "1").unwrap());
    let sigma = MeasureSpec::arcsine(Interval::parse("2", "3").unwrap());
    FrobeniusProblem::markov(mu, sigma, prec).unwrap()
}

/// `∫ p_i R dμ` for `i ≤ m + n` on an independent Gauss-Chebyshev rule.
fn fourier_coefficients_of_r(p: &FrobeniusProblem, a: &Approximant, nodes: usize) -> (Vec<f64>, f64) {
    let prec = 2 * p.prec;
    let rec = orthoexp::recurrence_coeffs(&p.mu, a.index.total() + 2, prec).unwrap();
    let mut coeffs = vec![Float::new(prec); a.index.total() + 1];
    let mut norm = Float::new(prec);
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    for k in 0..nodes {
        let x = (Float::with_val(prec, &pi * (2 * k + 1) as u32) / (2 * nodes) as u32).cos();
        let r = p.eval_direct(a, &Cplx::real(x.clone()), prec).unwrap().r.re;
        norm += Float::with_val(prec, r.square_ref());
        for (i, pv) in orthoexp::eval_poly_real(&rec, a.index.total(), &x).iter().enumerate() {
            coeffs[i] += Float::with_val(prec, &r * pv);
        }
    }
    let n = nodes as f64;
    (coeffs.iter().map(|c| c.to_f64() / n).collect(), (norm.to_f64() / n).sqrt())
}

#[test]
fn residual_is_orthogonal_to_low_degrees() {
    let p = problem(256);
    for (m, n) in [(5, 6), (8, 4), (12, 3), (0, 1)] {
        let a = p.solve(FrobeniusIndex::new(m, n).unwrap()).unwrap();
        let (c, norm) = fourier_coefficients_of_r(&p, &a, 300);
        let worst = c.iter().fold(0.0f64, |w, x| w.max(x.abs()));
        assert!(worst < 1e-60 * norm.max(1e-300) || worst < 1e-70, "({m}, {n}): {worst:e} vs {norm:e}");
    }
}

#[test]
fn simple_pole_recovered_exactly() {
    // f = 1/(x − 2), (m, n) = (2, 1): Q ∝ x − 2 = (p_1/√2 − 2) in the arcsine basis
    let mu = MeasureSpec::arcsine(Interval::parse("-1", "1").unwrap());
    let p = FrobeniusProblem::new(mu, Target::SimplePole(Rational::from(2)), 256).unwrap();
    let a = p.solve(FrobeniusIndex::new(2, 1).unwrap()).unwrap();
    let ratio = a.q_coeffs[0].to_f64() / a.q_coeffs[1].to_f64();
    assert!((ratio + 2.0 * 2f64.sqrt()).abs() < 1e-14);
    let zeros = p.zeros_of_q(&a).unwrap();
    assert_eq!(zeros.zeros.len(), 1);
    assert!((zeros.zeros[0].to_c64().re - 2.0).abs() < 1e-14);
    let v = p.eval_direct(&a, &Cplx::from_f64(256, 0.3, 0.2), 256).unwrap();
    assert!(v.r.abs().to_f64() < 1e-60);
}

#[test]
fn polynomial_target_is_flagged_non_unique() {
    let mu = MeasureSpec::arcsine(Interval::parse("-1", "1").unwrap());
    let f = Target::Polynomial(vec![Rational::from(1), Rational::from(0), Rational::from(1)]);
    let p = FrobeniusProblem::new(mu, f, 128).unwrap();
    let a = p.solve(FrobeniusIndex::new(5, 2).unwrap()).unwrap();
    assert!(a.non_unique);
}

#[test]
fn index_constraints() {
    assert!(FrobeniusIndex::new(3, 5).is_err());
    assert!(FrobeniusIndex::new(3, 4).is_ok());
    let mu = MeasureSpec::arcsine(Interval::parse("-1", "1").unwrap());
    let sigma = MeasureSpec::arcsine(Interval::parse("1", "3").unwrap());
    assert!(FrobeniusProblem::markov(mu, sigma, 128).is_err());
}

#[test]
fn c_vanishes_at_infinity_like_the_moments() {
    // C(z) = ∫ R/(x − z) dμ is O(z^{-(m+n+2)}) because R is orthogonal to degree m + n
    let p = problem(256);
    let a = p.solve(FrobeniusIndex::new(3, 4).unwrap()).unwrap();
    let c1 = p.eval_c(&a, &Cplx::from_f64(256, 0.0, 20.0)).unwrap().abs().to_f64();
    let c2 = p.eval_c(&a, &Cplx::from_f64(256, 0.0, 40.0)).unwrap().abs().to_f64();
    let order = (c1 / c2).log2();
    assert!((order - 9.0).abs() < 0.2, "decay order {order}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn zeros_of_q_lie_on_the_support_of_sigma(n in 1usize..8, extra in 0usize..6) {
        let p = problem(192);
        let a = p.solve(FrobeniusIndex::new(n - 1 + extra, n).unwrap()).unwrap();
        let z = p.zeros_of_q(&a).unwrap();
        prop_assert_eq!(z.zeros.len(), n);
        for w in z.zeros.iter().map(|w| w.to_c64()) {
            prop_assert!(w.im.abs() < 1e-20 && w.re > 2.0 && w.re < 3.0, "{}", w);
        }
    }

    #[test]
    fn json_round_trip(m in 0usize..8, n in 1usize..5) {
        prop_assume!(n <= m + 1);
        let p = problem(128);
        let a = p.solve(FrobeniusIndex::new(m, n).unwrap()).unwrap();
        let j = a.to_json();
        let back = Approximant::from_json(&serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(back.to_json(), j);
    }

    #[test]
    fn coefficients_are_normalized(m in 0usize..10, n in 1usize..6) {
        prop_assume!(n <= m + 1);
        let p = problem(128);
        let a = p.solve(FrobeniusIndex::new(m, n).unwrap()).unwrap();
        let s: f64 = a.q_coeffs.iter().map(|c| c.to_f64().powi(2)).sum();
        prop_assert!((s - 1.0).abs() < 1e-14);
        prop_assert!(a.degree_exact);
    }
}
