//! Zeros of Q along the c = 1/3 ray against the normalized equilibrium
//! measure on the support of sigma.
//!
//! ```bash
//! cargo run --release --example zero_distribution
//! ```

use frobpade::approximant::FrobeniusProblem;
use frobpade::equilibrium;
use frobpade::harness::{self, RayRun, RaySpec, ZeroReference};
use frobpade::orthoexp::{Interval, MeasureSpec};
use rug::Rational;

fn main() -> frobpade::Result<()> {
    let mu = Interval::parse("-1", "-1/100")?;
    let sigma = Interval::parse("0", "3")?;
    let c = Rational::from((1, 3));
    let (_, eq) = equilibrium::equilibrium_for(&mu, &sigma, &c, 192)?;
    let reference = ZeroReference::from_equilibrium(&eq);
    println!("supp tau_sigma = [{:.6}, {:.6}]", reference.support.0, reference.support.1);
    let problem = FrobeniusProblem::markov(MeasureSpec::arcsine(mu), MeasureSpec::arcsine(sigma), 512)?;
    let run = RayRun::solve(problem, RaySpec::with_ratio(&c, [10, 20, 30, 40])?)?;
    let report = harness::zero_distribution_experiment(&run, &reference, 0.05)?;
    for r in &report.rows {
        println!("(m, n) = ({:>2}, {:>2}): Kolmogorov distance {:.4}, zeros outside {}", r.m, r.n, r.ks_distance, r.outside);
    }
    Ok(())
}
