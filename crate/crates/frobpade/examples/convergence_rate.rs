//! Local error slopes along the diagonal ray compared with the potential
//! prediction, at a point between the supports and a point off the axis.
//!
//! ```bash
//! cargo run --release --example convergence_rate
//! ```

use frobpade::approximant::FrobeniusProblem;
use frobpade::equilibrium;
use frobpade::harness::{self, RayRun, RaySpec, TestPoint};
use frobpade::orthoexp::{Interval, MeasureSpec};
use rug::Rational;

fn main() -> frobpade::Result<()> {
    let mu = Interval::parse("-1", "1")?;
    let sigma = Interval::parse("2", "3")?;
    let (_, eq) = equilibrium::equilibrium_for(&mu, &sigma, &Rational::from((1, 2)), 192)?;
    let problem = FrobeniusProblem::markov(MeasureSpec::arcsine(mu), MeasureSpec::arcsine(sigma), 384)?;
    let ray = RaySpec::diagonal(20..=30)?.with_points(vec![TestPoint::new(1.5, 0.0), TestPoint::new(0.0, 1.0)]);
    let run = RayRun::solve(problem, ray)?;
    let report = harness::convergence_rate_experiment(&run, &eq, 0.02)?;
    for p in &report.points {
        println!(
            "z = {:.2}: predicted {:.8}, mean slope {:.8}, worst local deviation {:.2e}, class {}, pass {}",
            p.point,
            p.predicted,
            p.mean_slope.unwrap_or(f64::NAN),
            p.max_deviation.unwrap_or(f64::NAN),
            p.class,
            p.pass
        );
    }
    Ok(())
}
