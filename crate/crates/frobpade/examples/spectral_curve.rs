//! The cubic spectral curve for touching supports (the degenerate case with
//! a closed-form endpoint) and for separated supports on both sides.
//!
//! ```bash
//! cargo run --release --example spectral_curve
//! ```

use frobpade::curve::{self, CurveEval};
use frobpade::orthoexp::Interval;
use rug::Rational;

fn main() -> frobpade::Result<()> {
    let prec = 256;
    let cases = [
        ("-1", "0", "0", "3", (1, 3)),
        ("-1", "1", "2", "3", (1, 2)),
        ("-1", "1", "2", "3", (1, 5)),
        ("2", "3", "-1", "1", (7, 20)),
    ];
    for (am, bm, as_, bs, c) in cases {
        let mu = Interval::parse(am, bm)?;
        let sigma = Interval::parse(as_, bs)?;
        let c = Rational::from(c);
        let k = curve::solve_curve(&mu, &sigma, &c, prec)?;
        let masses = CurveEval::new(&k).masses(1e-12);
        println!(
            "mu [{am}, {bm}]  sigma [{as_}, {bs}]  c = {:<5}  {:?}: b_sigma_c = {:.12}, square residual {:.1e}, masses ({:.10}, {:.10})",
            c.to_string(),
            k.case,
            k.endpoints.b_sigma_c.to_f64(),
            k.square_residual.to_f64(),
            masses.0,
            masses.1
        );
    }
    Ok(())
}
