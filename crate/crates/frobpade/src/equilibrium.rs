//! The vector equilibrium pair `(τ_μ, τ_σ)`, its logarithmic potentials,
//! the constants `ℓ_μ`, `ℓ_σ`, the domain classifier and `|Φ|` per sheet.
//!
//! Potentials use the convention `V^ν(z) = ∫ log(1/|z − x|) dν(x)`. The
//! pair satisfies
//!
//! * `2V^{τ_σ} − V^{τ_μ} = 3ℓ_σ` on `supp τ_σ`,
//! * `2V^{τ_μ} − V^{τ_σ} = 3ℓ_μ` on `Δ_μ`.

use num_complex::Complex64 as C64;
use rug::Rational;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::curve::{self, CubicCurve, CurveEval};
use crate::error::{Error, Result};
use crate::mp;
use crate::orthoexp::Interval;
use crate::quad::{self, Node};

const QUAD_TOL: f64 = 1e-13;

/// Chebyshev representation of `dν = f(x) dx / (π√((x−lo)(hi−x)))`,
/// `f = Σ c_k T_k(t)` with `t` the affine image of `x` in `[−1, 1]`.
#[derive(Clone, Debug)]
pub struct ChebDensity {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl ChebDensity {
    /// From values of `f` at the first-kind Chebyshev nodes, ascending in `x`.
    pub fn from_values(lo: f64, hi: f64, values: &[f64]) -> Self {
        let n = values.len();
        let coeffs = (0..n)
            .map(|k| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        // ascending x ↔ θ = π(2(n−1−j)+1)/(2n)
                        let theta = PI * (2.0 * (n - 1 - j) as f64 + 1.0) / (2.0 * n as f64);
                        v * (k as f64 * theta).cos()
                    })
                    .sum();
                if k == 0 {
                    s / n as f64
                } else {
                    2.0 * s / n as f64
                }
            })
            .collect();
        ChebDensity { lo, hi, coeffs }
    }

    /// First-kind nodes of `[lo, hi]`, ascending.
    pub fn nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        (0..n).map(|j| mid - half * (PI * (2.0 * j as f64 + 1.0) / (2.0 * n as f64)).cos()).collect()
    }

    fn t_of(&self, x: f64) -> f64 {
        (2.0 * x - self.lo - self.hi) / (self.hi - self.lo)
    }

    /// `f(x)` by Clenshaw.
    pub fn regularized(&self, x: f64) -> f64 {
        let t = self.t_of(x).clamp(-1.0, 1.0);
        let (mut b1, mut b2) = (0.0, 0.0);
        for c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + t * b1 - b2
    }

    pub fn mass(&self) -> f64 {
        self.coeffs[0]
    }

    fn phi(&self, z: C64) -> C64 {
        let half = 0.5 * (self.hi - self.lo);
        let t = (z - 0.5 * (self.lo + self.hi)) / half;
        let phi = t + (t - 1.0).sqrt() * (t + 1.0).sqrt();
        if phi.norm() < 1.0 {
            1.0 / phi
        } else {
            phi
        }
    }

    /// `∫ log(1/|z − x|) dν(x)` in closed form.
    pub fn potential(&self, z: C64) -> f64 {
        let half = 0.5 * (self.hi - self.lo);
        let phi = self.phi(z);
        let inv = 1.0 / phi;
        let mut acc = self.coeffs[0] * ((half / 2.0).ln() + phi.norm().ln());
        let mut pk = C64::new(1.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            pk *= inv;
            acc -= c * pk.re / k as f64;
        }
        -acc
    }

    /// `I(ν, ν) = ∫∫ log(1/|x − y|) dν dν`.
    pub fn self_energy(&self) -> f64 {
        let half = 0.5 * (self.hi - self.lo);
        let s: f64 = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * c / (2.0 * k as f64)).sum();
        -(self.coeffs[0] * self.coeffs[0] * (half / 2.0).ln() - s)
    }

    /// `∫ g dν` by tanh-sinh, resolving integrands that are nearly singular
    /// at an endpoint.
    pub fn integrate_ts<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        quad::tanh_sinh(|n| g(n.x) * self.regularized(n.x) / (PI * (n.from_left * n.from_right).sqrt()), self.lo, self.hi, QUAD_TOL)
    }

    /// `∫ g dν` by Gauss–Chebyshev with `n` nodes.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F, n: usize) -> f64 {
        Self::nodes(self.lo, self.hi, n).into_iter().map(|x| g(x) * self.regularized(x)).sum::<f64>() / n as f64
    }
}

/// A density on an interval, either taken exactly from the spectral curve
/// or represented by a Chebyshev series.
#[derive(Clone, Debug)]
pub enum Density {
    Curve { eval: CurveEval, lo: f64, hi: f64 },
    Chebyshev(ChebDensity),
}

impl Density {
    pub fn support(&self) -> (f64, f64) {
        match self {
            Density::Curve { lo, hi, .. } => (*lo, *hi),
            Density::Chebyshev(c) => (c.lo, c.hi),
        }
    }

    fn at_node(&self, n: Node) -> f64 {
        match self {
            Density::Curve { eval, lo, hi } => eval.density_node(n, *lo, *hi),
            Density::Chebyshev(c) => c.regularized(n.x) / (PI * (n.from_left * n.from_right).sqrt()),
        }
    }

    /// Density per unit length at `x`, zero off the support.
    pub fn density(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo || x >= hi {
            return 0.0;
        }
        self.at_node(Node { x, from_left: x - lo, from_right: hi - x })
    }

    /// `density · π√((x − lo)(hi − x))`, bounded at hard edges.
    pub fn regularized(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        match self {
            Density::Chebyshev(c) => c.regularized(x),
            Density::Curve { .. } => {
                // edge values as limits from inside
                let x = x.clamp(lo + 1e-14 * (hi - lo), hi - 1e-14 * (hi - lo));
                self.density(x) * PI * ((x - lo) * (hi - x)).sqrt()
            }
        }
    }

    pub fn mass(&self) -> f64 {
        let (lo, hi) = self.support();
        match self {
            Density::Chebyshev(c) => c.mass(),
            Density::Curve { .. } => quad::tanh_sinh(|n| self.at_node(n), lo, hi, QUAD_TOL),
        }
    }

    /// `∫ g dν`, with `g` receiving the node.
    pub fn integrate<F: Fn(Node) -> f64>(&self, g: F) -> f64 {
        let (lo, hi) = self.support();
        quad::tanh_sinh(|n| g(n) * self.at_node(n), lo, hi, QUAD_TOL)
    }

    /// `V^ν(z) = ∫ log(1/|z − x|) dν(x)`.
    pub fn potential(&self, z: C64) -> f64 {
        if let Density::Chebyshev(c) = self {
            return c.potential(z);
        }
        let (lo, hi) = self.support();
        let s = z.re;
        let log_dist = |n: Node, left_end: f64, right_end: f64| -> f64 {
            if z.im == 0.0 {
                // exact distance to a break point at Re z
                if left_end == s {
                    return n.from_left.ln();
                }
                if right_end == s {
                    return n.from_right.ln();
                }
            }
            (z - n.x).norm().ln()
        };
        if s > lo && s < hi {
            let left = quad::tanh_sinh(|n| -log_dist(n, lo, s) * self.at_node(quad::outer_node(n, lo, hi, lo, s)), lo, s, QUAD_TOL);
            let right = quad::tanh_sinh(|n| -log_dist(n, s, hi) * self.at_node(quad::outer_node(n, lo, hi, s, hi)), s, hi, QUAD_TOL);
            left + right
        } else {
            quad::tanh_sinh(|n| -log_dist(n, lo, hi) * self.at_node(n), lo, hi, QUAD_TOL)
        }
    }

    /// `ν([lo, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return self.mass();
        }
        quad::tanh_sinh(|n| self.at_node(quad::outer_node(n, lo, hi, lo, x)), lo, x, QUAD_TOL)
    }

    /// Samples `(x, density)` at `n` first-kind Chebyshev points.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64)> {
        let (lo, hi) = self.support();
        ChebDensity::nodes(lo, hi, n).into_iter().map(|x| (x, self.density(x))).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    FromCurve,
    FromIteration,
}

/// The equilibrium pair with its constants.
#[derive(Clone, Debug)]
pub struct EquilibriumData {
    pub c: f64,
    pub tau_mu: Density,
    pub tau_sigma: Density,
    pub ell_mu: f64,
    pub ell_sigma: f64,
    /// Largest spread among the three samples averaged into each `ℓ`.
    pub ell_spread: f64,
    pub source: Source,
    pub curve: Option<CurveEval>,
    /// Energy `J` after each oracle sweep.
    pub energy_history: Vec<f64>,
}

/// Sampling points for `ℓ`, at a quarter, half and three quarters of a support.
fn interior_points(lo: f64, hi: f64) -> [f64; 3] {
    [lo + 0.25 * (hi - lo), lo + 0.5 * (hi - lo), lo + 0.75 * (hi - lo)]
}

fn recover_ells(tau_mu: &Density, tau_sigma: &Density) -> (f64, f64, f64) {
    let avg = |pts: [f64; 3], f: &dyn Fn(f64) -> f64| -> (f64, f64) {
        let v: Vec<f64> = pts.iter().map(|&x| f(x)).collect();
        let mean = v.iter().sum::<f64>() / 3.0;
        let spread = v.iter().fold(0.0f64, |m, x| m.max((x - mean).abs()));
        (mean, spread)
    };
    let (sl, sh) = tau_sigma.support();
    let (ml, mh) = tau_mu.support();
    let pot = |d: &Density, x: f64| d.potential(C64::new(x, 0.0));
    let (ls, ss) = avg(interior_points(sl, sh), &|x| (2.0 * pot(tau_sigma, x) - pot(tau_mu, x)) / 3.0);
    let (lm, sm) = avg(interior_points(ml, mh), &|x| (2.0 * pot(tau_mu, x) - pot(tau_sigma, x)) / 3.0);
    (lm, ls, ss.max(sm))
}

/// Equilibrium pair read off the jumps of the curve branches.
pub fn densities_from_curve(curve: &CubicCurve) -> Result<EquilibriumData> {
    let eval = CurveEval::new(curve);
    let (ml, mh) = curve.mu_support();
    let (sl, sh) = curve.sigma_support();
    let tau_mu = Density::Curve { eval: eval.clone(), lo: ml, hi: mh };
    let tau_sigma = Density::Curve { eval: eval.clone(), lo: sl, hi: sh };
    let c = curve.c64();
    let (m1, mc) = (tau_mu.mass(), tau_sigma.mass());
    if (m1 - 1.0).abs() > 1e-8 || (mc - c).abs() > 1e-8 {
        return Err(Error::Numerical(format!("curve densities have masses ({m1}, {mc}), expected (1, {c})")));
    }
    let (ell_mu, ell_sigma, ell_spread) = recover_ells(&tau_mu, &tau_sigma);
    Ok(EquilibriumData {
        c,
        tau_mu,
        tau_sigma,
        ell_mu,
        ell_sigma,
        ell_spread,
        source: Source::FromCurve,
        curve: Some(eval),
        energy_history: Vec::new(),
    })
}

/// Mutual energy `∫ V^a db`.
fn mutual_energy(a: &ChebDensity, b: &ChebDensity) -> f64 {
    b.integrate_ts(|x| a.potential(C64::new(x, 0.0)))
}

/// Iterative solution of the equilibrium problem.
///
/// Each sweep sets `τ_μ = ½ Bal(τ_σ, Δ_μ) + (1 − c/2) ω_μ`, then picks the
/// right end `b'` of `supp τ_σ` by the vanishing of the regularized density
/// at `b'` (or keeps `b_σ` when it stays positive there), and sets
/// `τ_σ = ½ Bal(τ_μ, [a_σ, b']) + (c − ½) ω_{[a_σ, b']}`.
pub fn equilibrium_oracle(delta_mu: &Interval, delta_sigma: &Interval, c: f64, grid: usize) -> Result<EquilibriumData> {
    if !(c > 0.0 && c <= 0.5) {
        return Err(Error::Config(format!("c must lie in (0, 1/2], got {c}")));
    }
    if grid < 4 {
        return Err(Error::Config("oracle grid must have at least 4 points".into()));
    }
    // standard orientation: Δ_μ = [b_μ, a_μ] left of Δ_σ = [a_σ, b_σ]
    let (reflect, bmu, amu, asig, bsig) = if delta_mu.b64() <= delta_sigma.a64() {
        (false, delta_mu.a64(), delta_mu.b64(), delta_sigma.a64(), delta_sigma.b64())
    } else if delta_sigma.b64() <= delta_mu.a64() {
        (true, -delta_mu.b64(), -delta_mu.a64(), -delta_sigma.b64(), -delta_sigma.a64())
    } else {
        return Err(Error::Domain("intervals overlap".into()));
    };
    let mu_nodes = ChebDensity::nodes(bmu, amu, grid);
    let mut f_mu: Vec<f64> = vec![1.0; grid];
    let mut b_end = bsig;
    let mut f_sigma = ChebDensity::from_values(asig, bsig, &vec![c; grid]);
    let mut energies = Vec::new();
    let mut prev_ends: Vec<f64> = Vec::new();
    let max_sweeps = 400;
    let mut converged = false;
    for _sweep in 0..max_sweeps {
        let new_mu: Vec<f64> = mu_nodes
            .iter()
            .map(|&x| 0.5 * f_sigma.integrate_ts(|y| ((y - amu) * (y - bmu)).sqrt() / (y - x).abs()) + (1.0 - 0.5 * c))
            .collect();
        let tau_mu = ChebDensity::from_values(bmu, amu, &new_mu);
        let e = |b: f64| 0.5 * tau_mu.integrate_ts(|y| ((asig - y) / (b - y)).sqrt()) + c - 0.5;
        let new_end = if e(bsig) >= 0.0 {
            bsig
        } else {
            let (mut lo, mut hi) = (asig, bsig);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if e(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let sig_nodes = ChebDensity::nodes(asig, new_end, grid);
        let new_sigma_vals: Vec<f64> = sig_nodes
            .iter()
            .map(|&x| 0.5 * tau_mu.integrate_ts(|y| ((y - asig) * (y - new_end)).sqrt() / (x - y).abs()) + (c - 0.5))
            .collect();
        let new_sigma = ChebDensity::from_values(asig, new_end, &new_sigma_vals);
        let old_sigma_vals: Vec<f64> = sig_nodes.iter().map(|&x| f_sigma.regularized(x)).collect();
        let change = new_mu
            .iter()
            .zip(&f_mu)
            .map(|(a, b)| (a - b).abs())
            .chain(new_sigma_vals.iter().zip(&old_sigma_vals).map(|(a, b)| (a - b).abs()))
            .fold((new_end - b_end).abs(), f64::max);
        let j = tau_mu.self_energy() + new_sigma.self_energy() - mutual_energy(&tau_mu, &new_sigma);
        energies.push(j);
        f_mu = new_mu;
        f_sigma = new_sigma;
        b_end = new_end;
        prev_ends.push(new_end);
        if change < 1e-10 {
            converged = true;
            break;
        }
    }
    if !converged {
        let k = prev_ends.len();
        return Err(Error::Convergence {
            message: format!("oracle support did not stabilize; last ends {} and {}", prev_ends[k - 2], prev_ends[k - 1]),
            residual: (prev_ends[k - 1] - prev_ends[k - 2]).abs(),
        });
    }
    let mut tau_mu = ChebDensity::from_values(bmu, amu, &f_mu);
    let mut tau_sigma = f_sigma;
    if reflect {
        tau_mu = reflect_cheb(&tau_mu);
        tau_sigma = reflect_cheb(&tau_sigma);
    }
    let tau_mu = Density::Chebyshev(tau_mu);
    let tau_sigma = Density::Chebyshev(tau_sigma);
    let (ell_mu, ell_sigma, ell_spread) = recover_ells(&tau_mu, &tau_sigma);
    Ok(EquilibriumData {
        c,
        tau_mu,
        tau_sigma,
        ell_mu,
        ell_sigma,
        ell_spread,
        source: Source::FromIteration,
        curve: None,
        energy_history: energies,
    })
}

/// `x ↦ −x`: `T_k(−t) = (−1)^k T_k(t)`.
fn reflect_cheb(d: &ChebDensity) -> ChebDensity {
    ChebDensity {
        lo: -d.hi,
        hi: -d.lo,
        coeffs: d.coeffs.iter().enumerate().map(|(k, c)| if k % 2 == 1 { -c } else { *c }).collect(),
    }
}

/// Largest equilibrium residuals on `n`-point Chebyshev grids of the
/// supports: `(on supp τ_σ, on Δ_μ)`.
pub fn residuals(eq: &EquilibriumData, n: usize) -> (f64, f64) {
    let pot = |d: &Density, x: f64| d.potential(C64::new(x, 0.0));
    let (sl, sh) = eq.tau_sigma.support();
    let (ml, mh) = eq.tau_mu.support();
    let rs = ChebDensity::nodes(sl, sh, n)
        .into_iter()
        .map(|x| (2.0 * pot(&eq.tau_sigma, x) - pot(&eq.tau_mu, x) - 3.0 * eq.ell_sigma).abs())
        .fold(0.0, f64::max);
    let rm = ChebDensity::nodes(ml, mh, n)
        .into_iter()
        .map(|x| (2.0 * pot(&eq.tau_mu, x) - pot(&eq.tau_sigma, x) - 3.0 * eq.ell_mu).abs())
        .fold(0.0, f64::max);
    (rs, rm)
}

/// Point classification relative to `∂D^+`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    ConvergencePlus,
    DivergenceMinus,
    Boundary(f64),
}

impl Domain {
    pub fn label(&self) -> &'static str {
        match self {
            Domain::ConvergencePlus => "plus",
            Domain::DivergenceMinus => "minus",
            Domain::Boundary(_) => "boundary",
        }
    }
}

impl EquilibriumData {
    /// `V^{τ_μ}(z) − 2V^{τ_σ}(z) + 3ℓ_σ`, positive on `D^+`.
    pub fn classifier(&self, z: C64) -> f64 {
        self.tau_mu.potential(z) - 2.0 * self.tau_sigma.potential(z) + 3.0 * self.ell_sigma
    }

    /// Slope of the classifier at `z`.
    pub fn classifier_gradient(&self, z: C64) -> f64 {
        if let Some(eval) = &self.curve {
            if let Ok(sv) = curve::branches_at(eval, z) {
                return (sv.h0 - sv.h1).norm();
            }
        }
        let (lo, hi) = self.tau_sigma.support();
        let h = 1e-6 * (hi - lo).max(1.0);
        let gx = (self.classifier(z + h) - self.classifier(z - h)) / (2.0 * h);
        let gy = (self.classifier(z + C64::new(0.0, h)) - self.classifier(z - C64::new(0.0, h))) / (2.0 * h);
        gx.hypot(gy)
    }

    /// Classification with the boundary band `1e-3 · |∇|`.
    pub fn classify(&self, z: C64) -> Domain {
        let v = self.classifier(z);
        let tol = 1e-3 * self.classifier_gradient(z);
        if v.abs() < tol {
            Domain::Boundary(tol)
        } else if v > 0.0 {
            Domain::ConvergencePlus
        } else {
            Domain::DivergenceMinus
        }
    }

    /// `log|Φ_{m,n}(z)|` on the given sheet.
    pub fn log_phi_modulus(&self, z: C64, sheet: usize, m: usize, n: usize) -> Result<f64> {
        let vm = self.tau_mu.potential(z);
        let vs = self.tau_sigma.potential(z);
        let (lm, ls) = (self.ell_mu, self.ell_sigma);
        let per = match sheet {
            0 => -vs + lm + 2.0 * ls,
            1 => vs - vm + lm - ls,
            2 => vm - 2.0 * lm - ls,
            _ => return Err(Error::Config(format!("sheet must be 0, 1 or 2, got {sheet}"))),
        };
        Ok((n + m) as f64 * per)
    }

    /// `(x, density)` rows for both measures.
    pub fn densities_csv(&self, n: usize) -> String {
        let mut s = String::from("measure,x,density\n");
        for (name, d) in [("tau_mu", &self.tau_mu), ("tau_sigma", &self.tau_sigma)] {
            for (x, v) in d.samples(n) {
                s.push_str(&format!("{name},{},{}\n", mp::to_sig(x, 20), mp::to_sig(v, 20)));
            }
        }
        s
    }
}

/// Classifier raster `(x, y, value, label)` on a rectangle.
pub fn domain_raster(eq: &EquilibriumData, re: (f64, f64), im: (f64, f64), nx: usize, ny: usize) -> Vec<(f64, f64, f64, Domain)> {
    use rayon::prelude::*;
    let pts: Vec<(f64, f64)> = (0..ny)
        .flat_map(|j| {
            (0..nx).map(move |i| {
                let x = re.0 + (re.1 - re.0) * i as f64 / (nx.max(2) - 1) as f64;
                let y = im.0 + (im.1 - im.0) * j as f64 / (ny.max(2) - 1) as f64;
                (x, y)
            })
        })
        .collect();
    pts.par_iter()
        .map(|&(x, y)| {
            let z = C64::new(x, y);
            (x, y, eq.classifier(z), eq.classify(z))
        })
        .collect()
}

pub fn raster_csv(rows: &[(f64, f64, f64, Domain)]) -> String {
    let mut s = String::from("x,y,value,label\n");
    for (x, y, v, d) in rows {
        s.push_str(&format!("{},{},{},{}\n", mp::to_sig(*x, 20), mp::to_sig(*y, 20), mp::to_sig(*v, 20), d.label()));
    }
    s
}

/// Equilibrium data straight from intervals and `c`.
pub fn equilibrium_for(mu: &Interval, sigma: &Interval, c: &Rational, prec: u32) -> Result<(CubicCurve, EquilibriumData)> {
    let curve = curve::solve_curve(mu, sigma, c, prec)?;
    let eq = densities_from_curve(&curve)?;
    Ok((curve, eq))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arcsine_potential_closed_form() {
        // V^ω(x) = log 2 on [−1, 1]; V^ω(z) = −log|φ(z)/2| off it
        let d = ChebDensity::from_values(-1.0, 1.0, &[1.0; 8]);
        assert!((d.potential(C64::new(0.3, 0.0)) - 2f64.ln()).abs() < 1e-14);
        let z = C64::new(2.0, 1.0);
        let phi = z + (z - 1.0).sqrt() * (z + 1.0).sqrt();
        assert!((d.potential(z) + (phi.norm() / 2.0).ln()).abs() < 1e-14);
        assert!((d.self_energy() - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn quadrature_potential_matches_closed_form() {
        let cheb = ChebDensity::from_values(0.0, 2.0, &ChebDensity::nodes(0.0, 2.0, 16).iter().map(|x| 1.0 + 0.3 * x).collect::<Vec<_>>());
        let z = C64::new(0.7, 0.0);
        // same measure integrated by tanh-sinh, split at the log singularity
        let f = |n: Node, dist: f64| -dist.ln() * cheb.regularized(n.x) / (PI * (n.from_left * n.from_right).sqrt());
        let direct = quad::tanh_sinh(|n| f(quad::outer_node(n, 0.0, 2.0, 0.0, 0.7), n.from_right), 0.0, 0.7, 1e-14)
            + quad::tanh_sinh(|n| f(quad::outer_node(n, 0.0, 2.0, 0.7, 2.0), n.from_left), 0.7, 2.0, 1e-14);
        assert!((cheb.potential(z) - direct).abs() < 1e-10);
    }
}
