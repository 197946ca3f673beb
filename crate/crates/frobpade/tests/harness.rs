use frobpade::approximant::{FrobeniusIndex, FrobeniusProblem, Target};
use frobpade::equilibrium;
use frobpade::harness::{self, Expect, RayRun, RaySpec, TestPoint, ZeroReference};
use frobpade::orthoexp::{Interval, MeasureSpec};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rug::Rational;

fn iv(a: &str, b: &str) -> Interval {
    Interval::parse(a, b).unwrap()
}

fn pole_run() -> RayRun {
    let mu = MeasureSpec::arcsine(iv("-1", "1"));
    let p = FrobeniusProblem::new(mu, Target::SimplePole(Rational::from(2)), 192).unwrap();
    let ray = RaySpec::new(Rational::from((1, 2)), vec![FrobeniusIndex::new(1, 1).unwrap(), FrobeniusIndex::new(2, 1).unwrap()], vec![])
        .unwrap()
        .with_points(vec![TestPoint::new(0.0, 1.0)]);
    RayRun::solve(p, ray).unwrap()
}

#[test]
fn exact_recovery_is_flagged() {
    let run = pole_run();
    let (_, eq) = equilibrium::equilibrium_for(&iv("-1", "1"), &iv("2", "3"), &Rational::from((1, 2)), 128).unwrap();
    let rate = harness::convergence_rate_experiment(&run, &eq, 0.02).unwrap();
    assert!(rate.degenerate_exact);
    assert!(!rate.pass);
    assert!(rate.rows.iter().all(|r| r.log_error.is_none() && r.notice.is_some()));
    let zeros = harness::zero_distribution_experiment(&run, &ZeroReference::point_mass(2.0), 0.05).unwrap();
    for r in &zeros.rows {
        assert_eq!(r.zeros.len(), 1);
        assert!(r.ks_distance < 1e-12 && r.outside == 0, "{r:?}");
    }
}

#[test]
fn separated_ray_reproduces_rates_off_the_supports() {
    let (mu, sigma) = (iv("-1", "1"), iv("2", "3"));
    let (_, eq) = equilibrium::equilibrium_for(&mu, &sigma, &Rational::from((1, 2)), 192).unwrap();
    let p = FrobeniusProblem::markov(MeasureSpec::arcsine(mu), MeasureSpec::arcsine(sigma), 256).unwrap();
    let ray = RaySpec::diagonal(8..=12).unwrap().with_points(vec![TestPoint::new(1.5, 0.0).expecting(Expect::Converge)]);
    let run = RayRun::solve(p, ray).unwrap();
    assert!(run.excluded.is_empty());
    let rate = harness::convergence_rate_experiment(&run, &eq, 0.05).unwrap();
    assert!(rate.pass, "{:?}", rate.points);
    // the O(1) term of ln|error| cancels in the ray-wide slope
    let p = &rate.points[0];
    assert!((p.mean_slope.unwrap() - p.predicted).abs() < 1e-6 * p.predicted);
    assert!(rate.to_csv().lines().count() == 6);
}

#[test]
fn anchor_in_divergence_domain_rejected() {
    let (mu, sigma) = (iv("-1", "-1/100"), iv("0", "3"));
    let (_, eq) = equilibrium::equilibrium_for(&mu, &sigma, &Rational::from((1, 3)), 192).unwrap();
    let p = FrobeniusProblem::markov(MeasureSpec::arcsine(mu), MeasureSpec::arcsine(sigma), 192).unwrap();
    let run = RayRun::solve(p, RaySpec::with_ratio(&Rational::from((1, 3)), [4, 5]).unwrap()).unwrap();
    let e = harness::szego_stabilization_experiment(&run, &eq, &[C64::new(0.0, 1.0)], Some(C64::new(2.9, 0.1)));
    assert!(matches!(e, Err(frobpade::Error::Domain(_))));
}

#[test]
fn ratio_and_product_stabilize_on_arcsine_measures() {
    let (mu, sigma) = (iv("-1", "1"), iv("2", "3"));
    let (_, eq) = equilibrium::equilibrium_for(&mu, &sigma, &Rational::from((1, 2)), 192).unwrap();
    let p = FrobeniusProblem::markov(MeasureSpec::arcsine(mu), MeasureSpec::arcsine(sigma), 256).unwrap();
    let run = RayRun::solve(p, RaySpec::diagonal(8..=10).unwrap()).unwrap();
    let pts = [C64::new(0.0, 0.0), C64::new(-2.0, 1.0), C64::new(0.0, 2.0)];
    let rep = harness::szego_stabilization_experiment(&run, &eq, &pts, None).unwrap();
    assert_eq!(rep.anchor, C64::new(1.5, 0.0));
    assert!(rep.max_ratio_change(9).unwrap() < 1e-6);
    assert!(rep.product_variation(9).unwrap() < 1e-6);
    // no product on the support of mu
    assert!(rep.rows.iter().filter(|r| r.point == pts[0]).all(|r| r.log_product.is_none()));
}

#[test]
fn products_below_the_roundoff_floor_are_unresolved() {
    // C_{29,30}(1.5 + i) is near e^-310 = 2^-447, below 2^-384
    let (mu, sigma) = (iv("-1", "1"), iv("2", "3"));
    let (_, eq) = equilibrium::equilibrium_for(&mu, &sigma, &Rational::from((1, 2)), 128).unwrap();
    let p = FrobeniusProblem::markov(MeasureSpec::arcsine(mu), MeasureSpec::arcsine(sigma), 384).unwrap();
    let run = RayRun::solve(p, RaySpec::diagonal([4, 30]).unwrap()).unwrap();
    assert!(run.excluded.is_empty());
    let rep = harness::szego_stabilization_experiment(&run, &eq, &[C64::new(1.5, 1.0)], None).unwrap();
    assert!(rep.product_variation(4).is_some());
    assert_eq!(rep.product_variation(30), None);
    let row = rep.rows.iter().find(|r| r.n == 30).unwrap();
    assert!(row.product_unresolved && row.log_product.is_none());
}

#[test]
fn kolmogorov_distance_against_step() {
    let d = harness::kolmogorov_distance(&[0.0, 1.0], |x| if x >= 0.5 { 1.0 } else { 0.0 });
    assert!((d - 0.5).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn ratio_rays_obey_their_invariants(num in 1u32..10, den in 2u32..21, lo in 1usize..30, len in 1usize..20) {
        let c = Rational::from((num, den));
        prop_assume!(c <= Rational::from((1, 2)));
        let ray = RaySpec::with_ratio(&c, lo..lo + len).unwrap();
        for ix in &ray.indices {
            prop_assert!(ix.n <= ix.m + 1);
            let ratio = ix.n as f64 / (ix.total() + 1) as f64;
            prop_assert!((ratio - c.to_f64()).abs() <= 1.0 / (ix.total() + 1) as f64 + 1e-15);
        }
    }
}
