//! Ratios of Q to the modulus of the first sheet function and the
//! normalized products of Q, R and C along the diagonal ray.
//!
//! ```bash
//! cargo run --release --example szego_ratios
//! ```

use frobpade::approximant::FrobeniusProblem;
use frobpade::equilibrium;
use frobpade::harness::{self, RayRun, RaySpec};
use frobpade::orthoexp::{Interval, MeasureSpec};
use num_complex::Complex64 as C64;
use rug::Rational;

fn main() -> frobpade::Result<()> {
    let mu = Interval::parse("-1", "1")?;
    let sigma = Interval::parse("2", "3")?;
    let (_, eq) = equilibrium::equilibrium_for(&mu, &sigma, &Rational::from((1, 2)), 192)?;
    let problem = FrobeniusProblem::markov(MeasureSpec::arcsine(mu), MeasureSpec::arcsine(sigma), 384)?;
    let run = RayRun::solve(problem, RaySpec::diagonal(10..=16)?)?;
    let points = [C64::new(-2.0, 1.0), C64::new(0.0, 2.0), C64::new(4.0, 0.5)];
    let report = harness::szego_stabilization_experiment(&run, &eq, &points, None)?;
    println!("anchor {}", report.anchor);
    for n in 10..16 {
        println!(
            "n = {n}: max |r_(n+1)/r_n - 1| = {:.2e}, product variation {:.2e}",
            report.max_ratio_change(n).unwrap_or(f64::NAN),
            report.product_variation(n).unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
