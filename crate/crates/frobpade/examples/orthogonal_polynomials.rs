//! Recurrence coefficients, a Gauss rule and a Cauchy transform for a
//! weighted arcsine measure.
//!
//! ```bash
//! cargo run --release --example orthogonal_polynomials
//! ```

use frobpade::mp::Cplx;
use frobpade::orthoexp::{self, Interval, MeasureSpec, Weight};
use rug::{Float, Rational};

fn main() -> frobpade::Result<()> {
    let prec = 128;
    // ρ(x) = 1 + x/2 against the arcsine distribution of [-1, 1]
    let weight = Weight::polynomial(vec![Rational::from(1), Rational::from((1, 2))]);
    let mu = MeasureSpec::new(Interval::parse("-1", "1")?, weight, None)?;

    let rec = orthoexp::recurrence_coeffs(&mu, 16, prec)?;
    println!("k  alpha_k                 beta_k");
    for k in 0..6 {
        println!("{k}  {:>22.15e}  {:>22.15e}", rec.alpha_at(k).to_f64(), rec.beta_at(k).to_f64());
    }

    let rule = orthoexp::gauss_rule(&rec, 12)?;
    let m2 = rule.integrate(|x| Float::with_val(prec, x * x));
    println!("\n12-node Gauss rule: total mass {:.15}, second moment {:.15}", rule.integrate(|_| Float::with_val(prec, 1)).to_f64(), m2.to_f64());

    let z = Cplx::from_f64(prec, 2.0, 0.5);
    let h = orthoexp::cauchy_transform(&mu, &z, prec)?;
    println!("Cauchy transform at 2+0.5i: {:?}", h.to_c64());
    Ok(())
}
