//! Convergence and divergence domains on the touching configuration with
//! c = 1/3, printed as a coarse character map (`+` converges, `-` diverges,
//! `=` supports).
//!
//! ```bash
//! cargo run --release --example domain_map
//! ```

use frobpade::equilibrium::{self, Domain};
use frobpade::orthoexp::Interval;
use num_complex::Complex64 as C64;
use rug::Rational;

fn main() -> frobpade::Result<()> {
    let mu = Interval::parse("-1", "0")?;
    let sigma = Interval::parse("0", "3")?;
    let (curve, eq) = equilibrium::equilibrium_for(&mu, &sigma, &Rational::from((1, 3)), 192)?;
    println!("b_sigma_c = {:.12}", curve.endpoints.b_sigma_c.to_f64());
    let rows = equilibrium::domain_raster(&eq, (-1.5, 4.5), (-2.0, 2.0), 61, 21);
    for line in rows.chunks(61).rev() {
        let s: String = line
            .iter()
            .map(|&(x, y, _, d)| {
                if y.abs() < 1e-12 && (-1.0..=3.0).contains(&x) {
                    '='
                } else {
                    match d {
                        Domain::ConvergencePlus => '+',
                        Domain::DivergenceMinus => '-',
                        Domain::Boundary(_) => '*',
                    }
                }
            })
            .collect();
        println!("{s}");
    }
    println!("class at 2.8: {}", eq.classify(C64::new(2.8, 0.0)).label());
    Ok(())
}
