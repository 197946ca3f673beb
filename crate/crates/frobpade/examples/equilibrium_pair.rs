//! The vector equilibrium pair read off the spectral curve, checked against
//! the independent fixed-point iteration.
//!
//! ```bash
//! cargo run --release --example equilibrium_pair
//! ```

use frobpade::equilibrium::{self, equilibrium_oracle};
use frobpade::orthoexp::Interval;
use rug::Rational;

fn main() -> frobpade::Result<()> {
    let mu = Interval::parse("-1", "1")?;
    let sigma = Interval::parse("2", "3")?;
    let c = Rational::from((7, 20));
    let (_, eq) = equilibrium::equilibrium_for(&mu, &sigma, &c, 192)?;
    let (lo, hi) = eq.tau_sigma.support();
    println!("from the curve: supp tau_sigma = [{lo:.10}, {hi:.10}]");
    println!("  masses ({:.12}, {:.12})", eq.tau_mu.mass(), eq.tau_sigma.mass());
    println!("  ell_mu = {:.12}, ell_sigma = {:.12}, spread {:.1e}", eq.ell_mu, eq.ell_sigma, eq.ell_spread);
    let (rs, rm) = equilibrium::residuals(&eq, 64);
    println!("  equilibrium residuals {rs:.1e} on supp tau_sigma, {rm:.1e} on supp tau_mu");

    let oracle = equilibrium_oracle(&mu, &sigma, c.to_f64(), 64)?;
    let sup = (0..=200)
        .map(|k| lo + (hi - lo) * k as f64 / 200.0)
        .map(|x| (eq.tau_sigma.regularized(x) - oracle.tau_sigma.regularized(x)).abs())
        .fold(0.0, f64::max);
    println!("\niteration: {} sweeps, ell_sigma = {:.12}", oracle.energy_history.len(), oracle.ell_sigma);
    println!("  sup difference of regularized sigma-densities: {sup:.2e}");
    Ok(())
}
