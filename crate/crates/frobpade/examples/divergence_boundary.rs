//! Traces the boundary of the convergence domain for the touching
//! configuration with c = 1/3 and writes it as CSV.
//!
//! ```bash
//! cargo run --release --example divergence_boundary -- boundary.csv
//! ```

use frobpade::curve::{self, CurveEval};
use frobpade::orthoexp::Interval;
use rug::Rational;

fn main() -> frobpade::Result<()> {
    let mu = Interval::parse("-1", "0")?;
    let sigma = Interval::parse("0", "3")?;
    let k = curve::solve_curve(&mu, &sigma, &Rational::from((1, 3)), 128)?;
    let eval = CurveEval::new(&k);
    let upper = curve::trace_divergence_boundary(&eval, 1e-3, 100_000, true)?;
    let last = upper.points.last().expect("trace is never empty");
    let worst = upper.points.iter().map(|p| p.residual).fold(0.0, f64::max);
    println!("{} points, ended with {:?} at {:.6}, largest residual {worst:.1e}", upper.points.len(), upper.end, last.z);
    let apex = upper.points.iter().max_by(|a, b| a.z.im.total_cmp(&b.z.im)).unwrap();
    println!("highest point {:.6}", apex.z);
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, upper.to_csv())?;
        println!("written to {path}");
    }
    Ok(())
}
