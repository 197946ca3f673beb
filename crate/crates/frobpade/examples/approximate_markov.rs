//! Frobenius-Padé approximants to the Markov function of the arcsine
//! distribution on [2, 3], expanded in the orthonormal basis of the arcsine
//! distribution on [-1, 1].
//!
//! ```bash
//! cargo run --release --example approximate_markov
//! ```

use frobpade::approximant::{FrobeniusIndex, FrobeniusProblem};
use frobpade::mp::Cplx;
use frobpade::orthoexp::{Interval, MeasureSpec};

fn main() -> frobpade::Result<()> {
    let prec = 256;
    let mu = MeasureSpec::arcsine(Interval::parse("-1", "1")?);
    let sigma = MeasureSpec::arcsine(Interval::parse("2", "3")?);
    let problem = FrobeniusProblem::markov(mu, sigma, prec)?;

    let z = Cplx::from_f64(prec, 1.5, 0.0);
    println!(" m  n   smallest sv    |f - P/Q| at 1.5");
    for n in [2usize, 4, 8, 12, 16] {
        let appr = problem.solve(FrobeniusIndex::new(n - 1, n)?)?;
        let v = problem.eval_direct(&appr, &z, 2 * prec)?;
        let err = v.f.sub(&v.p.div(&v.q)).abs().to_f64();
        println!("{:>2} {:>2}   {:.3e}      {:.3e}", n - 1, n, appr.smallest_singular_value.to_f64(), err);
    }

    let appr = problem.solve(FrobeniusIndex::new(5, 6)?)?;
    let zeros = problem.zeros_of_q(&appr)?;
    println!("\nzeros of Q_{{5,6}}:");
    for z in &zeros.zeros {
        println!("  {:.12}", z.to_c64());
    }
    Ok(())
}
