//! Orthonormal polynomials of measures `dν = ρ(x) dx / (π √((x−a)(b−x)))`
//! on a real interval: recurrence coefficients, Gauss rules, evaluation of
//! `p_k` and of the second-kind functions `q_k(t) = ∫ p_k dν / (t − x)`, and
//! Cauchy transforms.
//!
//! The orthonormal recurrence is
//! `x p_k = √β_{k+1} p_{k+1} + α_k p_k + √β_k p_{k−1}` with `p_0 = 1/√β_0`,
//! so `β_0` is the total mass.

use num_complex::Complex64;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::{self, fl, Cplx, Matrix};

/// Closed real interval `[a, b]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub a: Rational,
    pub b: Rational,
}

impl Interval {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if a >= b {
            return Err(Error::Config(format!("interval endpoints must satisfy a < b, got [{a}, {b}]")));
        }
        Ok(Interval { a, b })
    }

    pub fn from_f64(a: f64, b: f64) -> Result<Self> {
        let a = Rational::from_f64(a).ok_or_else(|| Error::Config("non-finite endpoint".into()))?;
        let b = Rational::from_f64(b).ok_or_else(|| Error::Config("non-finite endpoint".into()))?;
        Interval::new(a, b)
    }

    pub fn parse(a: &str, b: &str) -> Result<Self> {
        Interval::new(mp::parse_rational(a)?, mp::parse_rational(b)?)
    }

    pub fn a_f(&self, prec: u32) -> Float {
        Float::with_val(prec, &self.a)
    }
    pub fn b_f(&self, prec: u32) -> Float {
        Float::with_val(prec, &self.b)
    }
    pub fn mid_f(&self, prec: u32) -> Float {
        Float::with_val(prec, Rational::from(&self.a + &self.b) / 2u32)
    }
    pub fn half_f(&self, prec: u32) -> Float {
        Float::with_val(prec, Rational::from(&self.b - &self.a) / 2u32)
    }
    pub fn a64(&self) -> f64 {
        self.a.to_f64()
    }
    pub fn b64(&self) -> f64 {
        self.b.to_f64()
    }
    pub fn mid64(&self) -> f64 {
        0.5 * (self.a64() + self.b64())
    }
    pub fn half64(&self) -> f64 {
        0.5 * (self.b64() - self.a64())
    }
    pub fn len64(&self) -> f64 {
        self.b64() - self.a64()
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.a <= other.b && other.a <= self.b
    }

    /// `|φ(z)| ≥ 1` where `φ` maps the complement of the interval onto the
    /// exterior of the unit disk; level sets are Bernstein ellipses.
    pub fn ellipse_param(&self, z: Complex64) -> f64 {
        let u = (z - self.mid64()) / self.half64();
        let s = (u * u - 1.0).sqrt();
        (u + s).norm().max((u - s).norm())
    }

    /// `w(z) = √((z−a)(z−b))` with the branch `w(z) ~ z` at infinity and the
    /// cut on the interval.
    pub fn w(&self, z: &Cplx) -> Cplx {
        let prec = z.prec();
        let u = z.sub_real(&self.mid_f(prec));
        let h2 = Float::with_val(prec, self.half_f(prec).square_ref());
        let ratio = Cplx::real(h2).div(&u.mul(&u));
        let root = Cplx::one(prec).sub(&ratio).sqrt();
        u.mul(&root)
    }

    pub fn w64(&self, z: Complex64) -> Complex64 {
        let u = z - self.mid64();
        let h = self.half64();
        u * (Complex64::new(1.0, 0.0) - h * h / (u * u)).sqrt()
    }

    /// True for points of the open interval on the real axis.
    pub fn contains_open(&self, z: &Cplx) -> bool {
        z.im.is_zero() && z.re > self.a && z.re < self.b
    }
    pub fn contains_closed(&self, z: &Cplx) -> bool {
        z.im.is_zero() && z.re >= self.a && z.re <= self.b
    }

    /// Gauss–Chebyshev nodes of the arcsine distribution, ascending.
    pub fn chebyshev_nodes(&self, n: usize, prec: u32) -> Vec<Float> {
        let mid = self.mid_f(prec);
        let h = self.half_f(prec);
        let pi = mp::pi(prec);
        (0..n)
            .map(|k| {
                let theta = Float::with_val(prec, &pi * (2 * (n - 1 - k) + 1) as u32) / (2 * n) as u32;
                Float::with_val(prec, &h * theta.cos()) + &mid
            })
            .collect()
    }

    pub fn chebyshev_nodes64(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| {
                let theta = std::f64::consts::PI * (2 * (n - 1 - k) + 1) as f64 / (2 * n) as f64;
                self.mid64() + self.half64() * theta.cos()
            })
            .collect()
    }
}

/// Radon–Nikodym derivative of a measure with respect to the arcsine
/// distribution of its interval.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    One,
    /// Ascending monomial coefficients.
    Polynomial(Vec<Rational>),
    Rational { num: Vec<Rational>, den: Vec<Rational> },
}

fn horner_f(c: &[Rational], x: &Float) -> Float {
    let prec = x.prec();
    let mut acc = Float::new(prec);
    for q in c.iter().rev() {
        acc *= x;
        acc += q;
    }
    acc
}

fn horner_c(c: &[Rational], z: &Cplx) -> Cplx {
    let prec = z.prec();
    let mut acc = Cplx::zero(prec);
    for q in c.iter().rev() {
        acc = acc.mul(z).add_real(&Float::with_val(prec, q));
    }
    acc
}

fn horner64(c: &[Rational], x: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, q| acc * x + q.to_f64())
}

fn trim(c: &[Rational]) -> Vec<Rational> {
    let mut v = c.to_vec();
    while v.len() > 1 && v.last().map(|x| *x == 0).unwrap_or(false) {
        v.pop();
    }
    v
}

impl Weight {
    pub fn polynomial(coeffs: Vec<Rational>) -> Self {
        Weight::Polynomial(trim(&coeffs))
    }
    pub fn rational(num: Vec<Rational>, den: Vec<Rational>) -> Self {
        Weight::Rational { num: trim(&num), den: trim(&den) }
    }

    pub fn eval(&self, x: &Float) -> Float {
        match self {
            Weight::One => Float::with_val(x.prec(), 1),
            Weight::Polynomial(c) => horner_f(c, x),
            Weight::Rational { num, den } => horner_f(num, x) / horner_f(den, x),
        }
    }

    pub fn eval_c(&self, z: &Cplx) -> Cplx {
        match self {
            Weight::One => Cplx::one(z.prec()),
            Weight::Polynomial(c) => horner_c(c, z),
            Weight::Rational { num, den } => horner_c(num, z).div(&horner_c(den, z)),
        }
    }

    pub fn eval64(&self, x: f64) -> f64 {
        self.eval_c64(Complex64::new(x, 0.0)).re
    }

    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        match self {
            Weight::One => Complex64::new(1.0, 0.0),
            Weight::Polynomial(c) => horner64(c, z),
            Weight::Rational { num, den } => horner64(num, z) / horner64(den, z),
        }
    }

    /// Degree of the polynomial part, if the weight is a polynomial.
    pub fn poly_degree(&self) -> Option<usize> {
        match self {
            Weight::One => Some(0),
            Weight::Polynomial(c) => Some(c.len().saturating_sub(1)),
            Weight::Rational { .. } => None,
        }
    }

    /// Smallest Bernstein-ellipse parameter of the weight's poles relative to
    /// `iv`, or `None` for entire weights.
    pub fn pole_param(&self, iv: &Interval) -> Option<f64> {
        match self {
            Weight::Rational { den, .. } if den.len() > 1 => {
                let roots = poly_roots64(den).ok()?;
                roots.iter().map(|r| iv.ellipse_param(*r)).fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.min(x))))
            }
            _ => None,
        }
    }
}

/// Roots of a real polynomial (ascending coefficients) via its companion
/// matrix at modest precision.
pub fn poly_roots64(c: &[Rational]) -> Result<Vec<Complex64>> {
    let c = trim(c);
    let n = c.len() - 1;
    if n == 0 {
        return Ok(vec![]);
    }
    let prec = 128;
    let lead = Float::with_val(prec, &c[n]);
    let mut m = Matrix::zeros(n, n, prec);
    for i in 0..n {
        m.set(0, i, -Float::with_val(prec, &c[n - 1 - i]) / &lead);
    }
    for i in 1..n {
        m.set(i, i - 1, fl(prec, 1.0));
    }
    Ok(mp::hessenberg_eigenvalues(m)?.iter().map(|z| z.to_c64()).collect())
}

/// Arcsine-distribution moments `∫ x^k dω` on `iv`, exactly.
fn arcsine_moment(iv: &Interval, k: usize) -> Rational {
    let mid = Rational::from(&iv.a + &iv.b) / 2u32;
    let h = Rational::from(&iv.b - &iv.a) / 2u32;
    let binom = |n: usize, r: usize| Rational::from(rug::Integer::from(rug::Integer::binomial_u(n as u32, r as u32)));
    let mut total = Rational::new();
    for j in (0..=k).step_by(2) {
        // E[cos^j θ] = C(j, j/2) / 2^j
        let central = binom(j, j / 2) / Rational::from(rug::Integer::from(1) << j as u32);
        total += binom(k, j) * rpow(&mid, k - j) * rpow(&h, j) * central;
    }
    total
}

fn rpow(x: &Rational, e: usize) -> Rational {
    let mut r = Rational::from(1);
    for _ in 0..e {
        r *= x;
    }
    r
}

/// A measure of the class handled by the crate.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpec {
    pub interval: Interval,
    pub weight: Weight,
    mass: f64,
    exact_mass: Option<Rational>,
}

impl MeasureSpec {
    /// Validates positivity of the weight on a sampling grid and, when a
    /// mass is declared, that it matches `∫ ρ dω`.
    pub fn new(interval: Interval, weight: Weight, declared_mass: Option<Rational>) -> Result<Self> {
        let grid = interval.chebyshev_nodes64(257);
        let samples = grid.iter().copied().chain([interval.a64(), interval.b64()]);
        for x in samples {
            if let Weight::Rational { den, .. } = &weight {
                let d = horner64(den, Complex64::new(x, 0.0)).re;
                if d == 0.0 || !d.is_finite() {
                    return Err(Error::Config(format!("weight denominator vanishes near x = {x}")));
                }
            }
            let v = weight.eval64(x);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("weight must be positive on the interval; ρ({x}) = {v}")));
            }
        }
        let exact_mass = match &weight {
            Weight::One => Some(Rational::from(1)),
            Weight::Polynomial(c) => {
                Some(c.iter().enumerate().fold(Rational::new(), |acc, (k, q)| acc + Rational::from(q * &arcsine_moment(&interval, k))))
            }
            Weight::Rational { .. } => None,
        };
        let mass = match &exact_mass {
            Some(q) => q.to_f64(),
            None => {
                let n = 4096;
                interval.chebyshev_nodes64(n).iter().map(|&x| weight.eval64(x)).sum::<f64>() / n as f64
            }
        };
        if let Some(dm) = &declared_mass {
            let d = dm.to_f64();
            if (d - mass).abs() > 1e-10 * mass.abs().max(1.0) {
                return Err(Error::Config(format!("declared mass {d} disagrees with ∫ρ dω = {mass}")));
            }
        }
        Ok(MeasureSpec { interval, weight, mass, exact_mass })
    }

    pub fn arcsine(interval: Interval) -> Self {
        MeasureSpec::new(interval, Weight::One, None).expect("arcsine measure is always valid")
    }

    pub fn mass64(&self) -> f64 {
        self.mass
    }

    pub fn mass(&self, prec: u32) -> Float {
        match &self.exact_mass {
            Some(q) => Float::with_val(prec, q),
            None => {
                let rule = arcsine_quadrature(self, 64 + prec as usize, prec);
                rule.weights.iter().fold(Float::new(prec), |acc, w| acc + w)
            }
        }
    }

    /// Density with respect to Lebesgue measure at an interior point.
    pub fn density64(&self, x: f64) -> f64 {
        let (a, b) = (self.interval.a64(), self.interval.b64());
        self.weight.eval64(x) / (std::f64::consts::PI * ((x - a) * (b - x)).sqrt())
    }
}

/// Node/weight pairs of a quadrature rule.
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

impl GaussRule {
    pub fn integrate<F: Fn(&Float) -> Float>(&self, f: F) -> Float {
        let prec = self.nodes.first().map(|x| x.prec()).unwrap_or(64);
        let mut s = Float::new(prec);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(x);
        }
        s
    }
}

/// Gauss–Chebyshev rule for `ρ dω`: exact when `ρ·f` is a polynomial of
/// degree below `2n`.
pub fn arcsine_quadrature(spec: &MeasureSpec, n: usize, prec: u32) -> GaussRule {
    let nodes = spec.interval.chebyshev_nodes(n, prec);
    let weights = nodes.iter().map(|x| spec.weight.eval(x) / n as u32).collect();
    GaussRule { nodes, weights }
}

/// Three-term recurrence coefficients of an orthonormal family.
#[derive(Clone, Debug)]
pub struct Recurrence {
    pub alpha: Vec<Float>,
    pub beta: Vec<Float>,
    prec: u32,
    arcsine: Option<(Float, Float)>,
    limits: (Float, Float),
}

impl Recurrence {
    /// Coefficients supplied directly; `limits` are used beyond the stored
    /// length (the Chebyshev limits `(mid, h²/4)` for interval measures).
    pub fn from_coeffs(alpha: Vec<Float>, beta: Vec<Float>, limits: (Float, Float)) -> Result<Self> {
        if alpha.len() != beta.len() || alpha.is_empty() {
            return Err(Error::Config("recurrence needs equally many alphas and betas".into()));
        }
        if let Some(k) = beta.iter().position(|b| *b <= 0) {
            return Err(Error::Numerical(format!("non-positive beta_{k}")));
        }
        let prec = alpha[0].prec();
        Ok(Recurrence { alpha, beta, prec, arcsine: None, limits })
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }
    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
    pub fn prec(&self) -> u32 {
        self.prec
    }
    pub fn is_arcsine(&self) -> bool {
        self.arcsine.is_some()
    }

    pub fn alpha_at(&self, k: usize) -> Float {
        self.alpha.get(k).cloned().unwrap_or_else(|| self.limits.0.clone())
    }
    pub fn beta_at(&self, k: usize) -> Float {
        self.beta.get(k).cloned().unwrap_or_else(|| self.limits.1.clone())
    }
    pub fn sqrt_beta_at(&self, k: usize) -> Float {
        self.beta_at(k).sqrt()
    }

    /// Image under `x ↦ s x + t` (`s > 0`).
    pub fn affine(&self, s: &Float, t: &Float) -> Recurrence {
        let prec = self.prec;
        let s2 = Float::with_val(prec, s.square_ref());
        let alpha = self.alpha.iter().map(|a| Float::with_val(prec, a * s) + t).collect();
        let beta = self
            .beta
            .iter()
            .enumerate()
            .map(|(k, b)| if k == 0 { b.clone() } else { Float::with_val(prec, b * &s2) })
            .collect();
        let limits = (Float::with_val(prec, &self.limits.0 * s) + t, Float::with_val(prec, &self.limits.1 * &s2));
        let arcsine = self
            .arcsine
            .as_ref()
            .map(|(m, h)| (Float::with_val(prec, m * s) + t, Float::with_val(prec, h * s)));
        Recurrence { alpha, beta, prec, arcsine, limits }
    }
}

/// Recurrence coefficients `α_0..α_{count−1}`, `β_0..β_{count−1}`.
///
/// The arcsine case is closed form. Otherwise a discretized Stieltjes
/// procedure runs on Gauss–Chebyshev grids that double until successive
/// coefficient sets agree to `prec − 27` bits.
pub fn recurrence_coeffs(spec: &MeasureSpec, count: usize, prec: u32) -> Result<Recurrence> {
    if count == 0 {
        return Err(Error::Config("recurrence needs count >= 1".into()));
    }
    let mid = spec.interval.mid_f(prec);
    let h = spec.interval.half_f(prec);
    let h2 = Float::with_val(prec, h.square_ref());
    let limits = (mid.clone(), Float::with_val(prec, &h2 / 4u32));
    if spec.weight == Weight::One {
        let alpha = vec![mid.clone(); count];
        let beta = (0..count)
            .map(|k| match k {
                0 => Float::with_val(prec, 1),
                1 => Float::with_val(prec, &h2 / 2u32),
                _ => limits.1.clone(),
            })
            .collect();
        return Ok(Recurrence { alpha, beta, prec, arcsine: Some((mid, h)), limits });
    }
    let extra = spec.weight.poly_degree().unwrap_or(0);
    let mut n = 2 * count + extra + 8;
    let mut prev = stieltjes(spec, count, n, prec);
    let tol = Float::with_val(prec, 1) >> prec.saturating_sub(27);
    let max_n = 1usize << 20;
    loop {
        n *= 2;
        let next = stieltjes(spec, count, n, prec);
        let change = max_rel_change(&prev, &next);
        if change <= tol {
            let (alpha, beta) = next;
            return Ok(Recurrence { alpha, beta, prec, arcsine: None, limits });
        }
        if n >= max_n {
            return Err(Error::Convergence {
                message: format!("discretized Stieltjes procedure did not converge with {n} nodes"),
                residual: change.to_f64(),
            });
        }
        prev = next;
    }
}

fn max_rel_change(a: &(Vec<Float>, Vec<Float>), b: &(Vec<Float>, Vec<Float>)) -> Float {
    let prec = a.0[0].prec();
    let mut worst = Float::new(prec);
    for (x, y) in a.0.iter().zip(&b.0).chain(a.1.iter().zip(&b.1)) {
        let scale = Float::with_val(prec, y.abs_ref()).max(&Float::with_val(prec, 1));
        let d = Float::with_val(prec, x - y).abs() / scale;
        if d > worst {
            worst = d;
        }
    }
    worst
}

fn stieltjes(spec: &MeasureSpec, count: usize, n: usize, prec: u32) -> (Vec<Float>, Vec<Float>) {
    let rule = arcsine_quadrature(spec, n, prec);
    let x = &rule.nodes;
    let w = &rule.weights;
    let mut p_prev = vec![Float::new(prec); n];
    let mut p = vec![Float::with_val(prec, 1); n];
    let mut alpha = Vec::with_capacity(count);
    let mut beta = Vec::with_capacity(count);
    let mut norm_prev = Float::with_val(prec, 1);
    for k in 0..count {
        let mut norm = Float::new(prec);
        let mut xnorm = Float::new(prec);
        for i in 0..n {
            let wp2 = Float::with_val(prec, &w[i] * Float::with_val(prec, p[i].square_ref()));
            xnorm += &wp2 * &x[i];
            norm += wp2;
        }
        let a = Float::with_val(prec, &xnorm / &norm);
        let b = if k == 0 { norm.clone() } else { Float::with_val(prec, &norm / &norm_prev) };
        if k + 1 < count {
            for i in 0..n {
                let next = Float::with_val(prec, &x[i] - &a) * &p[i] - Float::with_val(prec, &b * &p_prev[i]);
                p_prev[i] = std::mem::replace(&mut p[i], next);
            }
        }
        alpha.push(a);
        beta.push(b);
        norm_prev = norm;
    }
    (alpha, beta)
}

/// Gauss rule with `nodes` points for the measure behind `rec`.
pub fn gauss_rule(rec: &Recurrence, nodes: usize) -> Result<GaussRule> {
    if nodes == 0 {
        return Err(Error::Config("Gauss rule needs at least one node".into()));
    }
    let prec = rec.prec;
    if let Some((mid, h)) = &rec.arcsine {
        let iv_nodes: Vec<Float> = {
            let pi = mp::pi(prec);
            (0..nodes)
                .map(|k| {
                    let theta = Float::with_val(prec, &pi * (2 * (nodes - 1 - k) + 1) as u32) / (2 * nodes) as u32;
                    Float::with_val(prec, h * theta.cos()) + mid
                })
                .collect()
        };
        let w = Float::with_val(prec, &rec.beta[0] / nodes as u32);
        return Ok(GaussRule { nodes: iv_nodes, weights: vec![w; nodes] });
    }
    if nodes > rec.len() {
        return Err(Error::Config(format!("{nodes} nodes requested from a recurrence of length {}", rec.len())));
    }
    let diag: Vec<Float> = rec.alpha[..nodes].to_vec();
    let off: Vec<Float> = (1..nodes).map(|k| rec.beta[k].clone().sqrt()).collect();
    let (x, v0) = mp::tridiagonal_eigen(&diag, &off).map_err(|e| match e {
        Error::Numerical(m) => Error::Numerical(format!(
            "{m}; block diag[0..{}] = {:?}",
            nodes.min(4),
            diag.iter().take(4).map(|d| d.to_f64()).collect::<Vec<_>>()
        )),
        other => other,
    })?;
    let weights = v0.iter().map(|v| Float::with_val(prec, v * &rec.beta[0])).collect();
    Ok(GaussRule { nodes: x, weights })
}

/// `p_0(x)..p_degree(x)` at a real point.
pub fn eval_poly_real(rec: &Recurrence, degree: usize, x: &Float) -> Vec<Float> {
    let prec = rec.prec;
    let mut out = Vec::with_capacity(degree + 1);
    out.push(Float::with_val(prec, 1) / rec.beta_at(0).sqrt());
    if degree == 0 {
        return out;
    }
    let first = Float::with_val(prec, x - &rec.alpha_at(0)) * &out[0] / rec.sqrt_beta_at(1);
    out.push(first);
    for k in 1..degree {
        let mut next = Float::with_val(prec, x - &rec.alpha_at(k)) * &out[k];
        next -= rec.sqrt_beta_at(k) * &out[k - 1];
        next /= rec.sqrt_beta_at(k + 1);
        out.push(next);
    }
    out
}

/// `p_0(z)..p_degree(z)` at a complex point.
pub fn eval_poly(rec: &Recurrence, degree: usize, z: &Cplx) -> Vec<Cplx> {
    let prec = rec.prec;
    let mut out = Vec::with_capacity(degree + 1);
    out.push(Cplx::real(Float::with_val(prec, 1) / rec.beta_at(0).sqrt()));
    if degree == 0 {
        return out;
    }
    out.push(z.sub_real(&rec.alpha_at(0)).mul(&out[0]).div_real(&rec.sqrt_beta_at(1)));
    for k in 1..degree {
        let next = z
            .sub_real(&rec.alpha_at(k))
            .mul(&out[k])
            .sub(&out[k - 1].scale(&rec.sqrt_beta_at(k)))
            .div_real(&rec.sqrt_beta_at(k + 1));
        out.push(next);
    }
    out
}

/// Values of `p_k` and `q_k` with an a-priori relative accuracy estimate of
/// the backward recurrence.
#[derive(Clone, Debug)]
pub struct SecondKind {
    pub p: Vec<Cplx>,
    pub q: Vec<Cplx>,
    pub accuracy: f64,
}

/// `p_k(z)` by forward recurrence and `q_k(z)` by Miller's backward
/// recurrence normalized by the directly computed `q_0 = −ν̂(z)`.
pub fn eval_poly_and_second_kind(spec: &MeasureSpec, rec: &Recurrence, degree: usize, z: &Cplx) -> Result<SecondKind> {
    if spec.interval.contains_closed(z) {
        return Err(Error::Domain(format!(
            "second-kind functions have a jump on [{}, {}]; got z = {:?}",
            spec.interval.a64(),
            spec.interval.b64(),
            z
        )));
    }
    let p = eval_poly(rec, degree, z);
    let q = second_kind(spec, rec, degree, z)?;
    let rho = spec.interval.ellipse_param(z.to_c64());
    let extra = miller_extra(rec.prec, rho);
    let accuracy = if rho > 1.0 { (-2.0 * extra as f64 * rho.ln()).exp() } else { 1.0 };
    Ok(SecondKind { p, q, accuracy })
}

fn miller_extra(prec: u32, rho: f64) -> usize {
    let lr = (rho.max(1.0 + 1e-12)).ln();
    ((prec as f64 * std::f64::consts::LN_2 / (2.0 * lr)).ceil() as usize + 20).min(400_000)
}

/// `q_0(z)..q_degree(z)` off the support.
pub fn second_kind(spec: &MeasureSpec, rec: &Recurrence, degree: usize, z: &Cplx) -> Result<Vec<Cplx>> {
    let prec = rec.prec;
    let q0 = cauchy_transform(spec, z, prec)?.neg();
    if degree == 0 {
        return Ok(vec![q0]);
    }
    let rho = spec.interval.ellipse_param(z.to_c64());
    let top = degree + miller_extra(prec, rho);
    let mut y_next = Cplx::zero(prec);
    let mut y = Cplx::one(prec);
    let mut ys = vec![Cplx::zero(prec); degree + 1];
    let mut k = top;
    while k >= 1 {
        // y_{k-1} = ((z − α_k) y_k − √β_{k+1} y_{k+1}) / √β_k
        let prev = z
            .sub_real(&rec.alpha_at(k))
            .mul(&y)
            .sub(&y_next.scale(&rec.sqrt_beta_at(k + 1)))
            .div_real(&rec.sqrt_beta_at(k));
        if k <= degree {
            ys[k] = y.clone();
        }
        y_next = y;
        y = prev;
        k -= 1;
        // keep magnitudes tame
        let mag = y.abs();
        if mag > Float::with_val(prec, 1) << 1000u32 {
            let s = Float::with_val(prec, 1) / &mag;
            y = y.scale(&s);
            y_next = y_next.scale(&s);
            for v in ys.iter_mut().skip(k + 1) {
                *v = v.scale(&s);
            }
        }
    }
    ys[0] = y.clone();
    let factor = q0.div(&y);
    Ok(ys.iter().map(|v| v.mul(&factor)).collect())
}

/// `ν̂(z) = ∫ dν(t)/(t − z)` for `z` off the closed support.
pub fn cauchy_transform(spec: &MeasureSpec, z: &Cplx, prec: u32) -> Result<Cplx> {
    if spec.interval.contains_closed(z) {
        return Err(Error::Domain(format!(
            "Cauchy transform requested on the support [{}, {}] at {:?}",
            spec.interval.a64(),
            spec.interval.b64(),
            z
        )));
    }
    let z = z.with_prec(prec);
    let w = spec.interval.w(&z);
    let rho_z = spec.weight.eval_c(&z);
    let singular = rho_z.div(&w).neg();
    Ok(singular.add(&regular_part(spec, &z, prec)))
}

/// Boundary value `ν̂⁺(x)` from the upper half-plane at an interior point.
pub fn cauchy_boundary_value(spec: &MeasureSpec, x: &Float, prec: u32) -> Result<Cplx> {
    let x = Float::with_val(prec, x);
    if !(x > spec.interval.a && x < spec.interval.b) {
        return Err(Error::Domain("boundary value requested off the open support".into()));
    }
    let zx = Cplx::real(x.clone());
    let root = Float::with_val(prec, &x - spec.interval.a_f(prec)) * Float::with_val(prec, spec.interval.b_f(prec) - &x);
    let im = spec.weight.eval(&x) / root.sqrt();
    Ok(Cplx::new(Float::new(prec), im).add(&regular_part(spec, &zx, prec)))
}

/// `∫ (ρ(t) − ρ(z))/(t − z) dω(t)`, an entire function of `z` for polynomial
/// weights.
fn regular_part(spec: &MeasureSpec, z: &Cplx, prec: u32) -> Cplx {
    match &spec.weight {
        Weight::One => Cplx::zero(prec),
        Weight::Polynomial(c) => {
            let quotient = synthetic_quotient(c, z);
            let n = quotient.len().max(1);
            integrate_poly_c(&spec.interval, &quotient, n, prec)
        }
        Weight::Rational { num, den } => {
            // (N(t)D(z) − N(z)D(t)) / ((t − z) D(t) D(z))
            let nz = horner_c(num, z);
            let dz = horner_c(den, z);
            let len = num.len().max(den.len());
            let combo: Vec<Cplx> = (0..len)
                .map(|k| {
                    let a = num.get(k).map(|q| dz.scale(&Float::with_val(prec, q))).unwrap_or_else(|| Cplx::zero(prec));
                    let b = den.get(k).map(|q| nz.scale(&Float::with_val(prec, q))).unwrap_or_else(|| Cplx::zero(prec));
                    a.sub(&b)
                })
                .collect();
            let quotient = synthetic_quotient_c(&combo, z);
            let mut n = 64usize;
            let mut prev = rational_regular(&spec.interval, &quotient, den, &dz, n, prec);
            let tol = Float::with_val(prec, 1) >> prec.saturating_sub(8);
            loop {
                n *= 2;
                let next = rational_regular(&spec.interval, &quotient, den, &dz, n, prec);
                let diff = next.sub(&prev).abs();
                let scale = next.abs().max(&Float::with_val(prec, 1));
                if diff <= Float::with_val(prec, &tol * &scale) || n > 1 << 16 {
                    return next;
                }
                prev = next;
            }
        }
    }
}

fn rational_regular(iv: &Interval, quotient: &[Cplx], den: &[Rational], dz: &Cplx, n: usize, prec: u32) -> Cplx {
    let nodes = iv.chebyshev_nodes(n, prec);
    let mut acc = Cplx::zero(prec);
    for t in &nodes {
        let tc = Cplx::real(t.clone());
        let mut qv = Cplx::zero(prec);
        for c in quotient.iter().rev() {
            qv = qv.mul(&tc).add(c);
        }
        acc = acc.add(&qv.div_real(&horner_f(den, t)));
    }
    acc.div_real(&Float::with_val(prec, n as u32)).div(dz)
}

/// Coefficients of `(c(t) − c(z))/(t − z)` as a polynomial in `t`.
fn synthetic_quotient(c: &[Rational], z: &Cplx) -> Vec<Cplx> {
    let prec = z.prec();
    let cc: Vec<Cplx> = c.iter().map(|q| Cplx::real(Float::with_val(prec, q))).collect();
    synthetic_quotient_c(&cc, z)
}

fn synthetic_quotient_c(c: &[Cplx], z: &Cplx) -> Vec<Cplx> {
    let n = c.len();
    if n <= 1 {
        return vec![];
    }
    let prec = z.prec();
    let mut out = vec![Cplx::zero(prec); n - 1];
    let mut acc = Cplx::zero(prec);
    for k in (1..n).rev() {
        acc = acc.mul(z).add(&c[k]);
        out[k - 1] = acc.clone();
    }
    out
}

fn integrate_poly_c(iv: &Interval, coeffs: &[Cplx], n: usize, prec: u32) -> Cplx {
    let nodes = iv.chebyshev_nodes(n, prec);
    let mut acc = Cplx::zero(prec);
    for t in &nodes {
        let tc = Cplx::real(t.clone());
        let mut v = Cplx::zero(prec);
        for c in coeffs.iter().rev() {
            v = v.mul(&tc).add(c);
        }
        acc = acc.add(&v);
    }
    acc.div_real(&Float::with_val(prec, n as u32))
}

/// Serializable description of a weight, used by configuration files.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum WeightDesc {
    Named(String),
    Polynomial { polynomial: Vec<String> },
    Rational { numerator: Vec<String>, denominator: Vec<String> },
}

impl WeightDesc {
    pub fn to_weight(&self) -> Result<Weight> {
        match self {
            WeightDesc::Named(s) if s == "one" => Ok(Weight::One),
            WeightDesc::Named(s) => Err(Error::Config(format!("unknown weight `{s}` (expected \"one\")"))),
            WeightDesc::Polynomial { polynomial } => {
                let c = polynomial.iter().map(|s| mp::parse_rational(s)).collect::<Result<Vec<_>>>()?;
                if c.is_empty() {
                    return Err(Error::Config("empty polynomial weight".into()));
                }
                Ok(Weight::polynomial(c))
            }
            WeightDesc::Rational { numerator, denominator } => {
                let n = numerator.iter().map(|s| mp::parse_rational(s)).collect::<Result<Vec<_>>>()?;
                let d = denominator.iter().map(|s| mp::parse_rational(s)).collect::<Result<Vec<_>>>()?;
                if n.is_empty() || d.is_empty() {
                    return Err(Error::Config("empty rational weight".into()));
                }
                Ok(Weight::rational(n, d))
            }
        }
    }
}
