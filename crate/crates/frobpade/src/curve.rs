//! The cubic spectral curve
//! `h³ − (1−κ) N₂(z)/Π(z) · h + κ N₁(z)/Π(z) = 0`, `κ = c − c²`,
//! whose three branches are the sheet values of `h = 2∂_z log|Φ| / (n+m)`.
//!
//! * `Generic`: `Π = (z−a_μ)(z−b_μ)(z−a_σ)(z−b_σ)`, `N₂ = P₂`, `N₁ = P₁`.
//! * `Touching`: `Π = (z−a_μ)(z−b_μ)(z−a_σ)`, `N₂ = P̃₁`, `N₁ = 1`.
//! * `DegenerateTouching`: the touching case with `a_μ = a_σ = a`, so that
//!   `Π = (z−b_μ)(z−a)²` and `P̃₁ = z − a`.
//!
//! Endpoints follow the labeling in which `a_μ`, `a_σ` are the facing ends
//! of the two intervals. Internally every problem is reflected, if needed,
//! so that `b_μ < a_μ ≤ a_σ < b_σ`.

use num_complex::Complex64 as C64;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp;
use crate::orthoexp::Interval;
use crate::quad;

type Poly = Vec<Float>;

fn pmul(a: &[Float], b: &[Float], prec: u32) -> Poly {
    let mut r = vec![Float::new(prec); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += Float::with_val(prec, x * y);
        }
    }
    r
}

fn padd(acc: &mut Poly, a: &[Float], s: &Float) {
    let prec = s.prec();
    if acc.len() < a.len() {
        acc.resize(a.len(), Float::new(prec));
    }
    for (x, y) in acc.iter_mut().zip(a) {
        *x += Float::with_val(prec, y * s);
    }
}

fn peval(a: &[Float], x: &Float) -> Float {
    let mut acc = Float::new(x.prec());
    for c in a.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn pder(a: &[Float]) -> Poly {
    a.iter().enumerate().skip(1).map(|(i, c)| Float::with_val(c.prec(), c * i as u32)).collect()
}

fn from_roots(roots: &[&Float], prec: u32) -> Poly {
    let mut p = vec![Float::with_val(prec, 1)];
    for r in roots {
        p = pmul(&p, &[Float::with_val(prec, -*r), Float::with_val(prec, 1)], prec);
    }
    p
}

fn shift(p: &[Float], k: usize) -> Poly {
    let prec = p[0].prec();
    let mut r = vec![Float::new(prec); k];
    r.extend(p.iter().cloned());
    r
}

fn max_abs(p: &[Float]) -> Float {
    let prec = p.first().map(|x| x.prec()).unwrap_or(64);
    p.iter().fold(Float::new(prec), |m, x| {
        let a = Float::with_val(prec, x.abs_ref());
        if a > m {
            a
        } else {
            m
        }
    })
}

/// Which form of the cubic describes `h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveCase {
    Generic,
    Touching,
    DegenerateTouching,
}

/// Endpoints of `Δ_μ`, `Δ_σ` and the moving endpoint `b_{σ,c}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Endpoints {
    pub a_mu: Float,
    pub b_mu: Float,
    pub a_sigma: Float,
    pub b_sigma: Float,
    pub b_sigma_c: Float,
}

/// Solved spectral curve, coefficients ascending, in the original
/// coordinates.
#[derive(Clone, Debug)]
pub struct CubicCurve {
    pub case: CurveCase,
    pub c: Float,
    pub kappa: Float,
    pub pi_poly: Poly,
    pub p2: Option<Poly>,
    pub p1: Option<Poly>,
    pub p1_tilde: Option<Poly>,
    /// Generic case: `B = lead · U²`. Touching cases: `B = lead · (z−r)²(z−b_{σ,c})`
    /// with `U = z − r`.
    pub square_factor: Poly,
    pub lead: Float,
    /// Largest coefficient of `B` minus its factored form.
    pub square_residual: Float,
    pub endpoints: Endpoints,
    pub zeta: Float,
    pub mu_left: bool,
    pub prec: u32,
}

struct Std {
    bmu: Float,
    amu: Float,
    asig: Float,
    bsig: Float,
    reflected: bool,
}

impl Std {
    fn new(mu: &Interval, sigma: &Interval, prec: u32) -> Result<Self> {
        if mu.b <= sigma.a {
            Ok(Std { bmu: mu.a_f(prec), amu: mu.b_f(prec), asig: sigma.a_f(prec), bsig: sigma.b_f(prec), reflected: false })
        } else if sigma.b <= mu.a {
            Ok(Std { bmu: -mu.b_f(prec), amu: -mu.a_f(prec), asig: -sigma.b_f(prec), bsig: -sigma.a_f(prec), reflected: true })
        } else {
            Err(Error::Domain(format!(
                "intervals [{}, {}] and [{}, {}] overlap",
                mu.a64(),
                mu.b64(),
                sigma.a64(),
                sigma.b64()
            )))
        }
    }
    fn degenerate(&self) -> bool {
        self.amu == self.asig
    }
    fn pi3(&self, prec: u32) -> Poly {
        from_roots(&[&self.amu, &self.bmu, &self.asig], prec)
    }
    fn pi4(&self, prec: u32) -> Poly {
        from_roots(&[&self.amu, &self.bmu, &self.asig, &self.bsig], prec)
    }
}

fn kappa_of(c: &Float) -> Float {
    Float::with_val(c.prec(), c - Float::with_val(c.prec(), c.square_ref()))
}

/// `b_{σ,c}` in closed form when the facing endpoints coincide.
pub fn b_sigma_c_degenerate(b_mu: &Float, a: &Float, c: &Float) -> Result<Float> {
    let prec = c.prec();
    let k = kappa_of(c);
    let one_k = Float::with_val(prec, 1 - &k) / 3u32;
    let big = Float::with_val(prec, one_k.square_ref()) * &one_k;
    let small = Float::with_val(prec, &k / 2u32).square();
    let den = Float::with_val(prec, &big - &small);
    if den.is_zero() {
        return Err(Error::Domain("infinite b_{σ,c}: the divergence domain is empty at c = 1/2".into()));
    }
    Ok((Float::with_val(prec, &big * a) - Float::with_val(prec, &small * b_mu)) / den)
}

struct TouchSolution {
    r: Float,
    t: Float,
    b: Float,
}

/// Touching case in standard orientation: double zero `r` of
/// `4(1−κ)³(z−t)³ − 27κ²Π₃` in the gap, then `t` and the simple zero `b`.
fn touch_solve(s: &Std, c: &Float) -> Result<TouchSolution> {
    let prec = c.prec();
    if s.degenerate() {
        let b = b_sigma_c_degenerate(&s.bmu, &s.amu, c)?;
        return Ok(TouchSolution { r: s.amu.clone(), t: s.amu.clone(), b });
    }
    let k = kappa_of(c);
    let ok3 = Float::with_val(prec, 1 - &k).square() * Float::with_val(prec, 1 - &k) * 4u32;
    let k2 = Float::with_val(prec, k.square_ref());
    let pi3 = s.pi3(prec);
    let d1 = pder(&pi3);
    let f = |r: &Float| -> Float {
        let p = peval(&pi3, r);
        let dp = peval(&d1, r);
        Float::with_val(prec, &ok3 * Float::with_val(prec, p.square_ref())) - Float::with_val(prec, &k2 * Float::with_val(prec, dp.square_ref())) * &dp
    };
    // F > 0 at a_μ, F < 0 at a_σ
    let mut lo = s.amu.clone();
    let mut hi = s.asig.clone();
    for _ in 0..(prec + 8) {
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        if mid == lo || mid == hi {
            break;
        }
        if f(&mid).is_sign_positive() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = Float::with_val(prec, &lo + &hi) / 2u32;
    let p = peval(&pi3, &r);
    let dp = peval(&d1, &r);
    let t = Float::with_val(prec, &r - Float::with_val(prec, &p * 3u32) / &dp);
    let l = Float::with_val(prec, &ok3 - Float::with_val(prec, &k2 * 27u32));
    if !l.is_sign_positive() {
        return Err(Error::Domain("infinite b_{σ,c}: the divergence domain is empty at c = 1/2".into()));
    }
    let num = Float::with_val(prec, &ok3 * &t) * 3u32 + Float::with_val(prec, &k2 * &pi3[2]) * 27u32;
    let b = num / &l - Float::with_val(prec, &r * 2u32);
    Ok(TouchSolution { r, t, b })
}

/// The parameter `c*` at which the touching endpoint reaches `b_σ`.
fn c_star(s: &Std, prec: u32) -> Result<Float> {
    let mut lo = Float::with_val(prec, 0);
    let mut hi = Float::with_val(prec, 0.5);
    for _ in 0..prec {
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        if mid == lo || mid == hi {
            break;
        }
        if touch_solve(s, &mid)?.b < s.bsig {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Float::with_val(prec, &lo + &hi) / 2u32)
}

fn generic_ak(c: &Float) -> (Float, Float) {
    let prec = c.prec();
    let k = kappa_of(c);
    let a = (Float::with_val(prec, 1 - &k) / 3u32).square();
    let a = a * Float::with_val(prec, 1 - &k) / 3u32;
    let kk = Float::with_val(prec, &k / 2u32).square();
    (a, kk)
}

/// `B = A P₂³ − K P₁² Π − (A−K) U²` and its derivatives.
fn generic_system(x: &[Float], c: &Float, pi: &[Float]) -> (Vec<Float>, Vec<Vec<Float>>) {
    let prec = c.prec();
    let (a, k) = generic_ak(c);
    let amk = Float::with_val(prec, &a - &k);
    let one = Float::with_val(prec, 1);
    let p2 = vec![x[1].clone(), x[0].clone(), one.clone()];
    let p1 = vec![x[2].clone(), one.clone()];
    let u = vec![x[5].clone(), x[4].clone(), x[3].clone(), one];
    let p2sq = pmul(&p2, &p2, prec);
    let p1pi = pmul(&p1, pi, prec);
    let mut b = Vec::new();
    padd(&mut b, &pmul(&p2sq, &p2, prec), &a);
    padd(&mut b, &pmul(&p1, &p1pi, prec), &-k.clone());
    padd(&mut b, &pmul(&u, &u, prec), &-amk.clone());
    let a3 = Float::with_val(prec, &a * 3u32);
    let dk = Float::with_val(prec, &k * -2i32);
    let du = Float::with_val(prec, &amk * -2i32);
    let cols: Vec<Poly> = vec![
        {
            let mut d = Vec::new();
            padd(&mut d, &shift(&p2sq, 1), &a3);
            d
        },
        {
            let mut d = Vec::new();
            padd(&mut d, &p2sq, &a3);
            d
        },
        {
            let mut d = Vec::new();
            padd(&mut d, &p1pi, &dk);
            d
        },
        {
            let mut d = Vec::new();
            padd(&mut d, &shift(&u, 2), &du);
            d
        },
        {
            let mut d = Vec::new();
            padd(&mut d, &shift(&u, 1), &du);
            d
        },
        {
            let mut d = Vec::new();
            padd(&mut d, &u, &du);
            d
        },
    ];
    let f: Vec<Float> = (0..6).map(|i| b.get(i).cloned().unwrap_or_else(|| Float::new(prec))).collect();
    let jac = (0..6).map(|i| cols.iter().map(|col| col.get(i).cloned().unwrap_or_else(|| Float::new(prec))).collect()).collect();
    (f, jac)
}

/// Reduced system at `c = 1/2`: unknowns `(p21, p20, p10, v1, v0)` with
/// `D = P₂³ − P₁²Π` of degree 4 and `D = D₄ V²`.
fn half_system(y: &[Float], pi: &[Float]) -> (Vec<Float>, Vec<Vec<Float>>, Float) {
    let prec = y[0].prec();
    let one = Float::with_val(prec, 1);
    let m1 = Float::with_val(prec, -1);
    let p2 = vec![y[1].clone(), y[0].clone(), one.clone()];
    let p1 = vec![y[2].clone(), one.clone()];
    let v = vec![y[4].clone(), y[3].clone(), one.clone()];
    let p2sq = pmul(&p2, &p2, prec);
    let p1pi = pmul(&p1, pi, prec);
    let mut d = Vec::new();
    padd(&mut d, &pmul(&p2sq, &p2, prec), &one);
    padd(&mut d, &pmul(&p1, &p1pi, prec), &m1);
    let vsq = pmul(&v, &v, prec);
    let coef = |p: &Poly, i: usize| p.get(i).cloned().unwrap_or_else(|| Float::new(prec));
    let d4 = coef(&d, 4);
    let three = Float::with_val(prec, 3);
    let mut dd: Vec<Poly> = Vec::new();
    {
        let mut t = Vec::new();
        padd(&mut t, &shift(&p2sq, 1), &three);
        dd.push(t);
        let mut t = Vec::new();
        padd(&mut t, &p2sq, &three);
        dd.push(t);
        let mut t = Vec::new();
        padd(&mut t, &p1pi, &Float::with_val(prec, -2));
        dd.push(t);
        dd.push(vec![Float::new(prec)]);
        dd.push(vec![Float::new(prec)]);
    }
    let two = Float::with_val(prec, 2);
    let mut dv: Vec<Poly> = vec![vec![Float::new(prec)]; 3];
    {
        let mut t = Vec::new();
        padd(&mut t, &shift(&v, 1), &two);
        dv.push(t);
        let mut t = Vec::new();
        padd(&mut t, &v, &two);
        dv.push(t);
    }
    let mut f = vec![coef(&d, 5)];
    let mut jac = vec![(0..5).map(|j| coef(&dd[j], 5)).collect::<Vec<_>>()];
    for i in 0..4 {
        f.push(Float::with_val(prec, &coef(&d, i) - Float::with_val(prec, &d4 * &coef(&vsq, i))));
        jac.push(
            (0..5)
                .map(|j| {
                    let mut e = coef(&dd[j], i);
                    e -= Float::with_val(prec, &coef(&dd[j], 4) * &coef(&vsq, i));
                    e -= Float::with_val(prec, &d4 * &coef(&dv[j], i));
                    e
                })
                .collect(),
        );
    }
    (f, jac, d4)
}

fn norm(v: &[Float]) -> Float {
    let prec = v[0].prec();
    v.iter().fold(Float::new(prec), |s, x| s + Float::with_val(prec, x.square_ref())).sqrt()
}

/// Damped Newton; `Err` carries the final residual.
fn newton<F>(x0: &[Float], mut sys: F, max_iter: usize) -> std::result::Result<Vec<Float>, f64>
where
    F: FnMut(&[Float]) -> (Vec<Float>, Vec<Vec<Float>>),
{
    let prec = x0[0].prec();
    let mut x = x0.to_vec();
    let tol_rel = Float::with_val(prec, 1) >> (prec - 16);
    let loose = Float::with_val(prec, 1) >> (prec / 2);
    let mut last = f64::INFINITY;
    let mut last_res = Float::with_val(prec, f64::INFINITY);
    let mut last_step_small = false;
    for _ in 0..max_iter {
        let (f, j) = sys(&x);
        let res = norm(&f);
        last = res.to_f64();
        // ill-conditioned systems stall at the rounding floor
        if last_step_small && res >= last_res {
            return Ok(x);
        }
        last_res = res;
        let n = x.len();
        let mut m = mp::Matrix::zeros(n, n, prec);
        for (r, row) in j.iter().enumerate() {
            for (cidx, v) in row.iter().enumerate() {
                m.set(r, cidx, v.clone());
            }
        }
        let rhs: Vec<Float> = f.iter().map(|v| -v.clone()).collect();
        let dx = mp::solve_linear(&m, &rhs).map_err(|_| last)?;
        for (a, d) in x.iter_mut().zip(&dx) {
            *a += d;
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(last);
        }
        let step = norm(&dx);
        let scale = Float::with_val(prec, norm(&x) + 1u32);
        if step <= Float::with_val(prec, &tol_rel * &scale) {
            return Ok(x);
        }
        last_step_small = step <= Float::with_val(prec, &loose * &scale);
    }
    Err(last)
}

/// Continuation of a generic solution `(x0, c0)` to `c_target < 1/2`;
/// `prev` feeds the secant predictor.
fn continue_generic(s: &Std, x0: Vec<Float>, c0: &Float, prev: Option<(Vec<Float>, Float)>, c_target: &Float) -> Result<Vec<Float>> {
    let prec = c0.prec();
    let pi = s.pi4(prec);
    let mut x = x0;
    let mut prev = prev;
    let mut c = c0.clone();
    let total = Float::with_val(prec, c_target - c0).to_f64();
    if total <= 0.0 {
        return Ok(x);
    }
    let mut h = (total / 8.0).min(0.02);
    let h_min = total * 1e-9;
    let slack = Float::with_val(prec, 1) >> (prec / 2);
    while c < *c_target {
        let remaining = Float::with_val(prec, c_target - &c).to_f64();
        let step = h.min(remaining);
        let c_new = if step >= remaining { c_target.clone() } else { Float::with_val(prec, &c + step) };
        // secant predictor
        let pred: Vec<Float> = match &prev {
            Some((xp, cp)) => {
                let ratio = Float::with_val(prec, &c_new - &c) / Float::with_val(prec, &c - cp);
                x.iter().zip(xp).map(|(a, b)| Float::with_val(prec, a + Float::with_val(prec, a - b) * &ratio)).collect()
            }
            None => x.clone(),
        };
        let sol = newton(&pred, |y| generic_system(y, &c_new, &pi), 40);
        let ok = match &sol {
            Ok(y) => {
                let zeta = Float::with_val(prec, -&y[2]);
                let jump = Float::with_val(prec, norm(&y.iter().zip(&pred).map(|(a, b)| Float::with_val(prec, a - b)).collect::<Vec<_>>()));
                let scale = Float::with_val(prec, norm(&x) + 1u32);
                zeta >= Float::with_val(prec, &s.bsig - &slack) && (prev.is_none() || jump.to_f64() <= 0.25 * scale.to_f64())
            }
            Err(_) => false,
        };
        if ok {
            prev = Some((x, c.clone()));
            x = sol.unwrap();
            c = c_new;
            h *= 1.5;
        } else {
            h *= 0.5;
            if h < h_min {
                let res = match sol {
                    Err(r) => r,
                    Ok(y) => norm(&generic_system(&y, &c_new, &pi).0).to_f64(),
                };
                return Err(Error::Convergence {
                    message: format!("generic curve continuation stalled at c = {}", c.to_f64()),
                    residual: res,
                });
            }
        }
    }
    Ok(x)
}

/// Largest real root of a real monic cubic, by Newton from a Cauchy bound.
fn largest_real_root(u: &[Float]) -> Float {
    let prec = u[0].prec();
    let bound = u.iter().take(3).fold(Float::with_val(prec, 1), |m, x| {
        let a = Float::with_val(prec, x.abs_ref()) + 1u32;
        if a > m {
            a
        } else {
            m
        }
    });
    let mut x = bound;
    let du = pder(u);
    for _ in 0..(4 * prec) {
        let step = peval(u, &x) / peval(&du, &x);
        x -= &step;
        if Float::with_val(prec, step.abs_ref()) <= Float::with_val(prec, x.abs_ref()) >> (prec - 8) {
            break;
        }
    }
    x
}

enum StdSolution {
    Generic { x: Vec<Float>, square: Poly, lead: Float },
    Touching(TouchSolution),
}

/// Cyclic Jacobi eigen-decomposition of a small symmetric matrix; returns
/// eigenvalues and eigenvectors as columns `vecs[i][k]`.
fn sym_eigen(a: &[Vec<Float>]) -> (Vec<Float>, Vec<Vec<Float>>) {
    let n = a.len();
    let prec = a[0][0].prec();
    let mut m: Vec<Vec<Float>> = a.to_vec();
    let mut v: Vec<Vec<Float>> = (0..n).map(|i| (0..n).map(|j| Float::with_val(prec, (i == j) as u32)).collect()).collect();
    let eps = Float::with_val(prec, 1) >> (prec - 4);
    for _sweep in 0..60 {
        let mut off = Float::new(prec);
        let mut diag = Float::new(prec);
        for i in 0..n {
            diag += Float::with_val(prec, m[i][i].square_ref());
            for j in 0..n {
                if i != j {
                    off += Float::with_val(prec, m[i][j].square_ref());
                }
            }
        }
        if off <= Float::with_val(prec, &diag * &eps) * &eps {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].is_zero() {
                    continue;
                }
                let theta = Float::with_val(prec, &m[q][q] - &m[p][p]) / Float::with_val(prec, &m[p][q] * 2u32);
                let sign = if theta.is_sign_negative() { -1i32 } else { 1 };
                let t = Float::with_val(prec, sign) / (Float::with_val(prec, theta.abs_ref()) + (Float::with_val(prec, theta.square_ref()) + 1u32).sqrt());
                let cth = (Float::with_val(prec, t.square_ref()) + 1u32).sqrt().recip();
                let sth = Float::with_val(prec, &t * &cth);
                for k in 0..n {
                    let mkp = m[k][p].clone();
                    let mkq = m[k][q].clone();
                    m[k][p] = Float::with_val(prec, &cth * &mkp) - Float::with_val(prec, &sth * &mkq);
                    m[k][q] = Float::with_val(prec, &sth * &mkp) + Float::with_val(prec, &cth * &mkq);
                }
                for k in 0..n {
                    let mpk = m[p][k].clone();
                    let mqk = m[q][k].clone();
                    m[p][k] = Float::with_val(prec, &cth * &mpk) - Float::with_val(prec, &sth * &mqk);
                    m[q][k] = Float::with_val(prec, &sth * &mpk) + Float::with_val(prec, &cth * &mqk);
                }
                for k in 0..n {
                    let vkp = v[k][p].clone();
                    let vkq = v[k][q].clone();
                    v[k][p] = Float::with_val(prec, &cth * &vkp) - Float::with_val(prec, &sth * &vkq);
                    v[k][q] = Float::with_val(prec, &sth * &vkp) + Float::with_val(prec, &cth * &vkq);
                }
            }
        }
    }
    ((0..n).map(|i| m[i][i].clone()).collect(), v)
}

fn gram(a: &[Vec<Float>], transpose: bool) -> Vec<Vec<Float>> {
    let n = a.len();
    let prec = a[0][0].prec();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(Float::new(prec), |acc, k| {
                        let (x, y) = if transpose { (&a[k][i], &a[k][j]) } else { (&a[i][k], &a[j][k]) };
                        acc + Float::with_val(prec, x * y)
                    })
                })
                .collect()
        })
        .collect()
}

/// Roots of two real conics `g(a) = 0`, `g` given by coefficients of
/// `1, a₀, a₁, a₀², a₀a₁, a₁²`, found by Newton from a spread of starts.
fn conic_pair_roots(g: &[[f64; 6]; 2]) -> Vec<[f64; 2]> {
    let ev = |a: [f64; 2]| -> ([f64; 2], [[f64; 2]; 2]) {
        let mut f = [0.0; 2];
        let mut j = [[0.0; 2]; 2];
        for k in 0..2 {
            let c = &g[k];
            f[k] = c[0] + c[1] * a[0] + c[2] * a[1] + c[3] * a[0] * a[0] + c[4] * a[0] * a[1] + c[5] * a[1] * a[1];
            j[k][0] = c[1] + 2.0 * c[3] * a[0] + c[4] * a[1];
            j[k][1] = c[2] + c[4] * a[0] + 2.0 * c[5] * a[1];
        }
        (f, j)
    };
    let mut roots: Vec<[f64; 2]> = Vec::new();
    let mut starts = vec![[0.0, 0.0]];
    for r in [1.0, 10.0, 100.0, 1000.0] {
        for k in 0..12 {
            let t = k as f64 * std::f64::consts::PI / 6.0 + 0.1;
            starts.push([r * t.cos(), r * t.sin()]);
        }
    }
    let scale = g.iter().flat_map(|c| c.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    for st in starts {
        let mut a = st;
        let mut best = (f64::INFINITY, a);
        for _ in 0..200 {
            let (f, j) = ev(a);
            let fnorm = f[0].abs() + f[1].abs();
            if fnorm < best.0 {
                best = (fnorm, a);
            }
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == 0.0 || !det.is_finite() {
                break;
            }
            // tangential intersections converge only linearly
            let d0 = (f[0] * j[1][1] - f[1] * j[0][1]) / det;
            let d1 = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
            a = [a[0] - d0, a[1] - d1];
        }
        let a = best.1;
        let tol = 1e-2 * (1.0 + a[0].abs() + a[1].abs());
        if best.0 <= 1e-11 * scale && !roots.iter().any(|r| (r[0] - a[0]).abs() + (r[1] - a[1]).abs() <= tol) {
            roots.push(a);
        }
    }
    roots
}

/// Candidate tangents `dx/dc` of generic branches leaving the degenerate
/// point `(x*, c*)`, where the Jacobian has rank four. Tangents satisfy the
/// first-order equations and the second-order condition projected onto
/// the left null space.
fn generic_tangents(x: &[Float], cs: &Float, pi: &[Float]) -> Vec<Vec<Float>> {
    let prec = cs.prec();
    let (f0, j) = generic_system(x, cs, pi);
    let e = Float::with_val(prec, 1) >> (prec / 4);
    let fc = |d: &Float| generic_system(x, &Float::with_val(prec, cs + d), pi).0;
    let fp = fc(&e);
    let fm = fc(&Float::with_val(prec, -&e));
    let jc: Vec<Float> = fp.iter().zip(&fm).map(|(a, b)| Float::with_val(prec, a - b) / Float::with_val(prec, &e * 2u32)).collect();
    let (lam_r, vr) = sym_eigen(&gram(&j, true));
    let (lam_l, vl) = sym_eigen(&gram(&j, false));
    let order = |lam: &[Float]| {
        let mut idx: Vec<usize> = (0..lam.len()).collect();
        idx.sort_by(|&a, &b| lam[b].partial_cmp(&lam[a]).unwrap());
        idx
    };
    let or = order(&lam_r);
    let ol = order(&lam_l);
    let n = x.len();
    let col = |v: &[Vec<Float>], k: usize| -> Vec<Float> { (0..n).map(|i| v[i][k].clone()).collect() };
    let dot = |a: &[Float], b: &[Float]| a.iter().zip(b).fold(Float::new(prec), |s, (x, y)| s + Float::with_val(prec, x * y));
    // least-squares particular solution of J v = −J_c
    let mut jt_rhs = vec![Float::new(prec); n];
    for (i, row) in j.iter().enumerate() {
        for k in 0..n {
            jt_rhs[k] -= Float::with_val(prec, &row[k] * &jc[i]);
        }
    }
    let mut vp = vec![Float::new(prec); n];
    for &k in &or[..n - 2] {
        let vk = col(&vr, k);
        let coef = dot(&vk, &jt_rhs) / &lam_r[k];
        for i in 0..n {
            vp[i] += Float::with_val(prec, &coef * &vk[i]);
        }
    }
    let null: Vec<Vec<Float>> = or[n - 2..].iter().map(|&k| col(&vr, k)).collect();
    let left: Vec<Vec<Float>> = ol[n - 2..].iter().map(|&k| col(&vl, k)).collect();
    let e2 = Float::with_val(prec, e.square_ref());
    let g = |a: [f64; 2]| -> [f64; 2] {
        let v: Vec<Float> = (0..n)
            .map(|i| Float::with_val(prec, &vp[i] + Float::with_val(prec, &null[0][i] * a[0]) + Float::with_val(prec, &null[1][i] * a[1])))
            .collect();
        let xp: Vec<Float> = (0..n).map(|i| Float::with_val(prec, &x[i] + Float::with_val(prec, &v[i] * &e))).collect();
        let xm: Vec<Float> = (0..n).map(|i| Float::with_val(prec, &x[i] - Float::with_val(prec, &v[i] * &e))).collect();
        let fpp = generic_system(&xp, &Float::with_val(prec, cs + &e), pi).0;
        let fmm = generic_system(&xm, &Float::with_val(prec, cs - &e), pi).0;
        let q: Vec<Float> = (0..n)
            .map(|i| (Float::with_val(prec, &fpp[i] + &fmm[i]) - Float::with_val(prec, &f0[i] * 2u32)) / &e2)
            .collect();
        [dot(&left[0], &q).to_f64(), dot(&left[1], &q).to_f64()]
    };
    let g00 = g([0.0, 0.0]);
    let gp0 = g([1.0, 0.0]);
    let gm0 = g([-1.0, 0.0]);
    let g0p = g([0.0, 1.0]);
    let g0m = g([0.0, -1.0]);
    let g11 = g([1.0, 1.0]);
    let mut coef = [[0.0; 6]; 2];
    for k in 0..2 {
        let c0 = g00[k];
        let c1 = 0.5 * (gp0[k] - gm0[k]);
        let c2 = 0.5 * (g0p[k] - g0m[k]);
        let c3 = 0.5 * (gp0[k] + gm0[k]) - c0;
        let c5 = 0.5 * (g0p[k] + g0m[k]) - c0;
        let c4 = g11[k] - c0 - c1 - c2 - c3 - c5;
        coef[k] = [c0, c1, c2, c3, c4, c5];
    }
    conic_pair_roots(&coef)
        .into_iter()
        .map(|a| (0..n).map(|i| Float::with_val(prec, &vp[i] + Float::with_val(prec, &null[0][i] * a[0]) + Float::with_val(prec, &null[1][i] * a[1]))).collect())
        .collect()
}

/// Generic solutions at `c`: every tangent candidate at `c*` that can be
/// continued to `c` under the guards.
fn generic_candidates(s: &Std, c: &Float) -> Result<Vec<Vec<Float>>> {
    let prec = c.prec();
    let cs = c_star(s, prec)?;
    let seed = touch_solve(s, &cs)?;
    let pi = s.pi4(prec);
    // at c*, P₁ = z − b_σ, P₂ = (z − b_σ)(z − t), U = (z − b_σ)²(z − r)
    let p2 = from_roots(&[&s.bsig, &seed.t], prec);
    let u = from_roots(&[&s.bsig, &s.bsig, &seed.r], prec);
    let xs = vec![p2[1].clone(), p2[0].clone(), -s.bsig.clone(), u[2].clone(), u[1].clone(), u[0].clone()];
    let span = Float::with_val(prec, c - &cs).to_f64();
    let delta = if span <= 0.02 { span } else { 0.01 };
    let c1 = if span <= 0.02 { c.clone() } else { Float::with_val(prec, &cs + delta) };
    let slack = Float::with_val(prec, 1) >> (prec / 2);
    let mut out = Vec::new();
    let mut last_err = None;
    for v in generic_tangents(&xs, &cs, &pi) {
        let x0: Vec<Float> = xs.iter().zip(&v).map(|(a, d)| Float::with_val(prec, a + Float::with_val(prec, d * delta))).collect();
        let x1 = match newton(&x0, |y| generic_system(y, &c1, &pi), 60) {
            Ok(x1) => x1,
            Err(r) => {
                last_err = Some(Error::Convergence { message: "generic curve: no branch leaves c*".into(), residual: r });
                continue;
            }
        };
        if Float::with_val(prec, -&x1[2]) < Float::with_val(prec, &s.bsig - &slack) {
            continue;
        }
        match continue_generic(s, x1, &c1, Some((xs.clone(), cs.clone())), c) {
            Ok(x) => out.push(x),
            Err(e) => last_err = Some(e),
        }
    }
    if out.is_empty() {
        return Err(last_err.unwrap_or_else(|| Error::Numerical("generic curve: no admissible branch leaves c*".into())));
    }
    Ok(out)
}

fn solve_std(s: &Std, c: &Float) -> Result<Vec<StdSolution>> {
    let prec = c.prec();
    let half = Float::with_val(prec, 0.5);
    if *c < half {
        let touch = touch_solve(s, c)?;
        if touch.b < s.bsig {
            return Ok(vec![StdSolution::Touching(touch)]);
        }
        let (a, k) = generic_ak(c);
        return Ok(generic_candidates(s, c)?
            .into_iter()
            .map(|x| {
                let u = vec![x[5].clone(), x[4].clone(), x[3].clone(), Float::with_val(prec, 1)];
                StdSolution::Generic { x, square: u, lead: Float::with_val(prec, &a - &k) }
            })
            .collect());
    }
    let pi = s.pi4(prec);
    let cs = c_star(s, prec)?;
    let c_near = Float::with_val(prec, &half - Float::with_val(prec, 2f64.powi(-10)));
    let c_near = if cs >= c_near { Float::with_val(prec, &cs + Float::with_val(prec, &half - &cs) / 2u32) } else { c_near };
    let mut out = Vec::new();
    let mut last_err = None;
    for x in generic_candidates(s, &c_near)? {
        let u = vec![x[5].clone(), x[4].clone(), x[3].clone(), Float::with_val(prec, 1)];
        let big = largest_real_root(&u);
        // V = U / (z − R), remainder dropped
        let v1 = Float::with_val(prec, &u[2] + &big);
        let v0 = Float::with_val(prec, &u[1] + Float::with_val(prec, &v1 * &big));
        let y0 = vec![x[0].clone(), x[1].clone(), x[2].clone(), v1, v0];
        match newton(
            &y0,
            |y| {
                let (f, j, _) = half_system(y, &pi);
                (f, j)
            },
            60,
        ) {
            Ok(y) => {
                let (_, _, d4) = half_system(&y, &pi);
                let (a, _) = generic_ak(c);
                let v = vec![y[4].clone(), y[3].clone(), Float::with_val(prec, 1)];
                let x = vec![y[0].clone(), y[1].clone(), y[2].clone()];
                out.push(StdSolution::Generic { x, square: v, lead: Float::with_val(prec, &a * &d4) });
            }
            Err(r) => last_err = Some(Error::Convergence { message: "generic curve at c = 1/2 did not converge".into(), residual: r }),
        }
    }
    if out.is_empty() {
        return Err(last_err.unwrap());
    }
    Ok(out)
}

fn reflect_monic(p: &[Float]) -> Poly {
    let deg = p.len() - 1;
    p.iter().enumerate().map(|(j, c)| if (deg - j) % 2 == 1 { -c.clone() } else { c.clone() }).collect()
}

/// Solve for the spectral curve of `(Δ_μ, Δ_σ, c)`, `c ∈ (0, 1/2]`.
pub fn solve_curve(mu: &Interval, sigma: &Interval, c: &Rational, prec: u32) -> Result<CubicCurve> {
    if *c <= 0 || *c > Rational::from((1, 2)) {
        return Err(Error::Config(format!("c must lie in (0, 1/2], got {}", c.to_f64())));
    }
    let s = Std::new(mu, sigma, prec)?;
    let cf = Float::with_val(prec, c);
    let mut last = None;
    for sol in solve_std(&s, &cf)? {
        let curve = build_curve(&s, &cf, sol);
        let eval = CurveEval::new(&curve);
        let (m_mu, m_sigma) = eval.masses(1e-12);
        let cc = cf.to_f64();
        if (m_mu - 1.0).abs() > 1e-6 || (m_sigma - cc).abs() > 1e-6 {
            last = Some(Error::Numerical(format!(
                "no admissible branch: curve densities have masses ({m_mu}, {m_sigma}) instead of (1, {cc})"
            )));
            continue;
        }
        return Ok(curve);
    }
    Err(last.unwrap_or_else(|| Error::Numerical("no admissible branch".into())))
}

fn build_curve(s: &Std, cf: &Float, sol: StdSolution) -> CubicCurve {
    let prec = cf.prec();
    let kappa = kappa_of(cf);
    let fix = |x: &Float| if s.reflected { -x.clone() } else { x.clone() };
    let fixp = |p: &[Float]| if s.reflected { reflect_monic(p) } else { p.to_vec() };
    let one = Float::with_val(prec, 1);
    let curve = match sol {
        StdSolution::Touching(t) => {
            let degenerate = s.degenerate();
            let pi3 = s.pi3(prec);
            let ptil = vec![-t.t.clone(), one.clone()];
            let (_, k) = generic_ak(&cf);
            let (a, _) = generic_ak(&cf);
            // B = A (z−t)³ − K Π₃ = (A−K)(z−r)²(z−b)
            let mut b = Vec::new();
            let zt = pmul(&pmul(&ptil, &ptil, prec), &ptil, prec);
            padd(&mut b, &zt, &a);
            padd(&mut b, &pi3, &-k.clone());
            let lead = Float::with_val(prec, &a - &k);
            let fac = pmul(&from_roots(&[&t.r, &t.r], prec), &from_roots(&[&t.b], prec), prec);
            let mut diff = b.clone();
            padd(&mut diff, &fac, &-lead.clone());
            let resid = max_abs(&diff);
            let b_orig = fix(&t.b);
            CubicCurve {
                case: if degenerate { CurveCase::DegenerateTouching } else { CurveCase::Touching },
                c: cf.clone(),
                kappa,
                pi_poly: fixp(&pi3),
                p2: None,
                p1: None,
                p1_tilde: Some(fixp(&ptil)),
                square_factor: fixp(&[-t.r.clone(), one.clone()]),
                lead,
                square_residual: resid,
                endpoints: Endpoints {
                    a_mu: fix(&s.amu),
                    b_mu: fix(&s.bmu),
                    a_sigma: fix(&s.asig),
                    b_sigma: fix(&s.bsig),
                    b_sigma_c: b_orig.clone(),
                },
                zeta: b_orig,
                mu_left: !s.reflected,
                prec,
            }
        }
        StdSolution::Generic { x, square, lead } => {
            let pi = s.pi4(prec);
            let (a, k) = generic_ak(&cf);
            let p2 = vec![x[1].clone(), x[0].clone(), one.clone()];
            let p1 = vec![x[2].clone(), one.clone()];
            let mut b = Vec::new();
            padd(&mut b, &pmul(&pmul(&p2, &p2, prec), &p2, prec), &a);
            padd(&mut b, &pmul(&pmul(&p1, &p1, prec), &pi, prec), &-k.clone());
            let mut diff = b;
            padd(&mut diff, &pmul(&square, &square, prec), &-lead.clone());
            let resid = max_abs(&diff);
            CubicCurve {
                case: CurveCase::Generic,
                c: cf.clone(),
                kappa,
                pi_poly: fixp(&pi),
                p2: Some(fixp(&p2)),
                p1: Some(fixp(&p1)),
                p1_tilde: None,
                square_factor: fixp(&square),
                lead,
                square_residual: resid,
                endpoints: Endpoints {
                    a_mu: fix(&s.amu),
                    b_mu: fix(&s.bmu),
                    a_sigma: fix(&s.asig),
                    b_sigma: fix(&s.bsig),
                    b_sigma_c: fix(&s.bsig),
                },
                zeta: fix(&-x[2].clone()),
                mu_left: !s.reflected,
                prec,
            }
        }
    };
    curve
}

impl CubicCurve {
    pub fn c64(&self) -> f64 {
        self.c.to_f64()
    }
    pub fn b_sigma_c64(&self) -> f64 {
        self.endpoints.b_sigma_c.to_f64()
    }
    /// Support `Δ_{σ,c}` as an ordered pair.
    pub fn sigma_support(&self) -> (f64, f64) {
        let a = self.endpoints.a_sigma.to_f64();
        let b = self.b_sigma_c64();
        (a.min(b), a.max(b))
    }
    pub fn mu_support(&self) -> (f64, f64) {
        let a = self.endpoints.a_mu.to_f64();
        let b = self.endpoints.b_mu.to_f64();
        (a.min(b), a.max(b))
    }

    pub fn to_json(&self) -> CurveJson {
        let s = |p: &Option<Poly>| p.as_ref().map(|v| v.iter().map(mp::to_decimal).collect());
        CurveJson {
            case: self.case,
            c: mp::to_decimal(&self.c),
            kappa: mp::to_decimal(&self.kappa),
            pi_poly: self.pi_poly.iter().map(mp::to_decimal).collect(),
            p2: s(&self.p2),
            p1: s(&self.p1),
            p1_tilde: s(&self.p1_tilde),
            square_factor: self.square_factor.iter().map(mp::to_decimal).collect(),
            square_lead: mp::to_decimal(&self.lead),
            square_residual: mp::to_decimal(&self.square_residual),
            a_mu: mp::to_decimal(&self.endpoints.a_mu),
            b_mu: mp::to_decimal(&self.endpoints.b_mu),
            a_sigma: mp::to_decimal(&self.endpoints.a_sigma),
            b_sigma: mp::to_decimal(&self.endpoints.b_sigma),
            b_sigma_c: mp::to_decimal(&self.endpoints.b_sigma_c),
            zeta: mp::to_decimal(&self.zeta),
            precision_bits: self.prec,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CurveJson {
    pub case: CurveCase,
    pub c: String,
    pub kappa: String,
    pub pi_poly: Vec<String>,
    pub p2: Option<Vec<String>>,
    pub p1: Option<Vec<String>>,
    pub p1_tilde: Option<Vec<String>>,
    pub square_factor: Vec<String>,
    pub square_lead: String,
    pub square_residual: String,
    pub a_mu: String,
    pub b_mu: String,
    pub a_sigma: String,
    pub b_sigma: String,
    pub b_sigma_c: String,
    pub zeta: String,
    pub precision_bits: u32,
}

/// Roots of `h³ + p h + q`, Cardano followed by Newton polishing.
pub fn cubic_roots(p: C64, q: C64) -> [C64; 3] {
    let zero = C64::new(0.0, 0.0);
    if p == zero && q == zero {
        return [zero; 3];
    }
    let d = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
    let s = d.sqrt();
    let a1 = -q / 2.0 + s;
    let a2 = -q / 2.0 - s;
    let a = if a1.norm() >= a2.norm() { a1 } else { a2 };
    let u = if a == zero { zero } else { (a.ln() / 3.0).exp() };
    let v = if u == zero { zero } else { -p / (3.0 * u) };
    let w = C64::new(-0.5, 3f64.sqrt() / 2.0);
    let mut r = [u + v, w * u + w.conj() * v, w.conj() * u + w * v];
    for x in r.iter_mut() {
        for _ in 0..2 {
            let f = *x * *x * *x + p * *x + q;
            let df = 3.0 * *x * *x + p;
            if df.norm() > 0.0 {
                let step = f / df;
                if step.is_finite() {
                    *x -= step;
                }
            }
        }
    }
    r
}

/// `|Im|` of the complex pair for real coefficients, `0` when all roots are real.
pub fn cubic_imag(p: f64, q: f64) -> f64 {
    let d = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    if !(d > 0.0) {
        return 0.0;
    }
    let s = d.sqrt();
    // larger-magnitude choice avoids cancellation
    let a = if q <= 0.0 { -q / 2.0 + s } else { -q / 2.0 - s };
    let u = a.cbrt();
    if u == 0.0 {
        return 0.0;
    }
    let v = -p / (3.0 * u);
    0.5 * 3f64.sqrt() * (u - v).abs()
}

/// `f64` evaluator of the curve used for branches, densities and tracing.
#[derive(Clone, Debug)]
pub struct CurveEval {
    pub kappa: f64,
    pub c: f64,
    pub pi_roots: Vec<f64>,
    pub n2_roots: Vec<C64>,
    pub n1_roots: Vec<C64>,
    pub mu: (f64, f64),
    pub sigma_c: (f64, f64),
    pub b_sigma_c: f64,
    pub case: CurveCase,
}

fn quad_roots(p: &[Float]) -> Vec<C64> {
    match p.len() {
        2 => vec![C64::new(-p[0].to_f64(), 0.0)],
        3 => {
            let b = p[1].to_f64();
            let c = p[0].to_f64();
            let d = C64::new(b * b - 4.0 * c, 0.0).sqrt();
            // stable pair
            let q = if b >= 0.0 { -0.5 * (b + d) } else { -0.5 * (b - d) };
            if q.norm() == 0.0 {
                vec![C64::new(0.0, 0.0); 2]
            } else {
                vec![q, c / q]
            }
        }
        _ => vec![],
    }
}

impl CurveEval {
    pub fn new(curve: &CubicCurve) -> Self {
        let e = &curve.endpoints;
        let (pi_roots, n2, n1) = match curve.case {
            CurveCase::Generic => (
                vec![e.a_mu.to_f64(), e.b_mu.to_f64(), e.a_sigma.to_f64(), e.b_sigma.to_f64()],
                quad_roots(curve.p2.as_ref().unwrap()),
                quad_roots(curve.p1.as_ref().unwrap()),
            ),
            _ => (
                vec![e.a_mu.to_f64(), e.b_mu.to_f64(), e.a_sigma.to_f64()],
                quad_roots(curve.p1_tilde.as_ref().unwrap()),
                vec![],
            ),
        };
        CurveEval {
            kappa: curve.kappa.to_f64(),
            c: curve.c.to_f64(),
            pi_roots,
            n2_roots: n2,
            n1_roots: n1,
            mu: curve.mu_support(),
            sigma_c: curve.sigma_support(),
            b_sigma_c: curve.b_sigma_c64(),
            case: curve.case,
        }
    }

    /// `(p, q)` at `base + d`, factors formed as `(base − root) + d`.
    pub fn coeffs_near(&self, base: f64, d: C64) -> (C64, C64) {
        let pi: C64 = self.pi_roots.iter().map(|&r| (base - r) + d).product();
        let n2: C64 = self.n2_roots.iter().map(|&r| (C64::new(base, 0.0) - r) + d).product();
        let n1: C64 = self.n1_roots.iter().map(|&r| (C64::new(base, 0.0) - r) + d).product();
        (-(1.0 - self.kappa) * n2 / pi, self.kappa * n1 / pi)
    }

    pub fn coeffs(&self, z: C64) -> (C64, C64) {
        self.coeffs_near(0.0, z)
    }

    pub fn roots(&self, z: C64) -> [C64; 3] {
        let (p, q) = self.coeffs(z);
        cubic_roots(p, q)
    }

    /// Density `|Im h|/π` at the point `base + d` of the real axis.
    pub fn density_near(&self, base: f64, d: f64) -> f64 {
        let (p, q) = self.coeffs_near(base, C64::new(d, 0.0));
        cubic_imag(p.re, q.re) / std::f64::consts::PI
    }

    pub fn density_at(&self, x: f64) -> f64 {
        self.density_near(0.0, x)
    }

    /// Density on a quadrature node of `[lo, hi]`.
    pub fn density_node(&self, n: quad::Node, lo: f64, hi: f64) -> f64 {
        if n.from_left <= n.from_right {
            self.density_near(lo, n.from_left)
        } else {
            self.density_near(hi, -n.from_right)
        }
    }

    /// Masses of `τ_μ` and `τ_σ`.
    pub fn masses(&self, tol: f64) -> (f64, f64) {
        let (ml, mr) = self.mu;
        let (sl, sr) = self.sigma_c;
        let mm = quad::tanh_sinh(|n| self.density_node(n, ml, mr), ml, mr, tol);
        let ms = quad::tanh_sinh(|n| self.density_node(n, sl, sr), sl, sr, tol);
        (mm, ms)
    }

    /// Cauchy transform `∫ dτ(x)/(z − x)` of a density on `[lo, hi]`.
    pub fn density_cauchy(&self, z: C64, lo: f64, hi: f64, tol: f64) -> C64 {
        let re = quad::tanh_sinh(|n| self.density_node(n, lo, hi) * (1.0 / (z - n.x)).re, lo, hi, tol);
        let im = quad::tanh_sinh(|n| self.density_node(n, lo, hi) * (1.0 / (z - n.x)).im, lo, hi, tol);
        C64::new(re, im)
    }

    fn extent(&self) -> (f64, f64) {
        let xs = [self.mu.0, self.mu.1, self.sigma_c.0, self.sigma_c.1];
        (xs.iter().cloned().fold(f64::INFINITY, f64::min), xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
    }

    fn near_branch(&self, z: C64) -> bool {
        let pts = [self.mu.0, self.mu.1, self.sigma_c.0, self.sigma_c.1];
        pts.iter().any(|&e| (z - e).norm() < 1e-8)
    }

    /// Branches labeled by their integral representations, valid away from
    /// the supports; used to seed continuation.
    pub fn reference_branches(&self, z: C64) -> [C64; 3] {
        let h0 = self.density_cauchy(z, self.sigma_c.0, self.sigma_c.1, 1e-10);
        let h2 = -self.density_cauchy(z, self.mu.0, self.mu.1, 1e-10);
        let target = [h0, -h0 - h2, h2];
        match_roots(&self.roots(z), &target).0
    }

    /// Carries labeled branch values along the segment `from → to`.
    pub fn continue_labels(&self, from: C64, labels: [C64; 3], to: C64) -> Result<[C64; 3]> {
        let mut t: f64 = 0.0;
        let mut cur = labels;
        let mut step: f64 = 0.125;
        while t < 1.0 {
            let tn = (t + step).min(1.0);
            let z = from + (to - from) * tn;
            let r = self.roots(z);
            let (m, change) = match_roots(&r, &cur);
            let gap = min_gap(&m);
            if gap > 2.0 * change || change == 0.0 {
                cur = m;
                t = tn;
                step = (step * 1.5).min(0.25);
            } else {
                step *= 0.5;
                if step < 1e-13 {
                    return Err(Error::Domain(format!("branch continuation is ambiguous near z = {z}; point is too close to a branch point")));
                }
            }
        }
        Ok(cur)
    }
}

fn min_gap(r: &[C64; 3]) -> f64 {
    (r[0] - r[1]).norm().min((r[0] - r[2]).norm()).min((r[1] - r[2]).norm())
}

/// Permutation of `roots` closest to `target`, and the largest displacement.
fn match_roots(roots: &[C64; 3], target: &[C64; 3]) -> ([C64; 3], f64) {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut best = ([roots[0], roots[1], roots[2]], f64::INFINITY);
    let mut best_cost = f64::INFINITY;
    for p in PERMS {
        let m = [roots[p[0]], roots[p[1]], roots[p[2]]];
        let d: Vec<f64> = (0..3).map(|i| (m[i] - target[i]).norm()).collect();
        let cost: f64 = d.iter().sum();
        if cost < best_cost {
            best_cost = cost;
            best = (m, d.iter().cloned().fold(0.0, f64::max));
        }
    }
    best
}

/// Branch values `h⁰, h¹, h²` at a point, labeled by sheet.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SheetValues {
    pub h0: C64,
    pub h1: C64,
    pub h2: C64,
    pub point: C64,
    pub continuation_tag: String,
}

/// Branches at `z`, continued along a vertical segment from a labeled
/// reference point on the same side of the real axis. Real points receive
/// their boundary values from the upper half-plane.
pub fn branches_at(eval: &CurveEval, z: C64) -> Result<SheetValues> {
    if eval.near_branch(z) {
        return Err(Error::Domain(format!("z = {z} is within 1e-8 of a branch point; use a local expansion")));
    }
    let (lo, hi) = eval.extent();
    let sgn = if z.im < 0.0 { -1.0 } else { 1.0 };
    let reference = C64::new(z.re, sgn * (2.0 * (hi - lo)).max(z.im.abs() + 1.0));
    let labels = eval.reference_branches(reference);
    let h = eval.continue_labels(reference, labels, z)?;
    Ok(SheetValues {
        h0: h[0],
        h1: h[1],
        h2: h[2],
        point: z,
        continuation_tag: if sgn > 0.0 { "vertical-from-upper".into() } else { "vertical-from-lower".into() },
    })
}

/// Why a traced trajectory stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceEnd {
    MaxPoints,
    ReachedRealAxis,
    HitSupport,
    Escaped,
    EmptyDomain,
}

#[derive(Clone, Debug)]
pub struct TracePoint {
    pub t: f64,
    pub z: C64,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub points: Vec<TracePoint>,
    pub end: TraceEnd,
}

impl Trajectory {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,re_z,im_z,residual\n");
        for p in &self.points {
            s.push_str(&format!("{},{},{},{}\n", mp::to_sig(p.t, 20), mp::to_sig(p.z.re, 20), mp::to_sig(p.z.im, 20), mp::to_sig(p.residual, 20)));
        }
        s
    }
}

/// Start point of `∂D⁺` on the real axis outside `Δ_{σ,c}`.
fn boundary_start(eval: &CurveEval) -> Result<Option<(f64, bool)>> {
    if eval.case != CurveCase::Generic {
        return Ok(Some((eval.b_sigma_c, true)));
    }
    if (eval.c - 0.5).abs() < 1e-15 {
        return Ok(None);
    }
    // G = Re ∫ (h⁰ − h¹) vanishes at the hard edge and decreases to −∞
    let b = eval.b_sigma_c;
    let dir = if b > eval.mu.1 { 1.0 } else { -1.0 };
    let g_at = |x: f64| -> Result<f64> {
        let sv = branches_at(eval, C64::new(x, 0.0))?;
        Ok((sv.h0 - sv.h1).re * dir)
    };
    let integral = |x: f64| -> Result<f64> {
        let (lo, hi) = if dir > 0.0 { (b, x) } else { (x, b) };
        let err = std::cell::RefCell::new(None);
        let v = quad::tanh_sinh(
            |n| match g_at(n.x) {
                Ok(v) => v,
                Err(e) => {
                    *err.borrow_mut() = Some(e);
                    0.0
                }
            },
            lo,
            hi,
            1e-8,
        );
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(v),
        }
    };
    let mut hi_d = (eval.sigma_c.1 - eval.sigma_c.0).max(1.0);
    let mut guard = 0;
    while integral(b + dir * hi_d)? > 0.0 {
        hi_d *= 2.0;
        guard += 1;
        if guard > 60 {
            return Ok(None);
        }
    }
    let mut lo_d = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo_d + hi_d);
        if integral(b + dir * mid)? > 0.0 {
            lo_d = mid;
        } else {
            hi_d = mid;
        }
    }
    Ok(Some((b + dir * 0.5 * (lo_d + hi_d), false)))
}

/// Trace `Re[(h⁰ − h¹) dz] = 0` from the real axis into the upper
/// (`upper = true`) or lower half-plane with fixed-step RK4 in arclength,
/// projecting back onto the level set after every step.
pub fn trace_divergence_boundary(eval: &CurveEval, step: f64, max_points: usize, upper: bool) -> Result<Trajectory> {
    if !(step > 0.0) {
        return Err(Error::Config("trajectory step must be positive".into()));
    }
    let start = match boundary_start(eval)? {
        Some(s) => s,
        None => return Ok(Trajectory { points: vec![], end: TraceEnd::EmptyDomain }),
    };
    let (x0, singular) = start;
    let sgn = if upper { 1.0 } else { -1.0 };
    // at b_{σ,c} the difference h⁰ − h¹ vanishes like a square root and the
    // level set leaves at ±60°; elsewhere it leaves vertically
    let outward = if x0 > eval.mu.1 { 1.0 } else { -1.0 };
    let z0 = if singular {
        let ang = if outward > 0.0 { std::f64::consts::FRAC_PI_3 } else { 2.0 * std::f64::consts::FRAC_PI_3 };
        C64::new(x0, 0.0) + 10.0 * step * C64::from_polar(1.0, sgn * ang)
    } else {
        C64::new(x0, sgn * 10.0 * step)
    };
    let (lo, hi) = eval.extent();
    let span = hi - lo;
    let sv = branches_at(eval, z0)?;
    let mut labels = [sv.h0, sv.h1, sv.h2];
    let gfun = |l: &[C64; 3]| l[0] - l[1];
    // residual of the start segment, from the local expansion g ≈ g(z0)·√((z−b)/(z0−b))
    let mut residual = if singular {
        let g0 = gfun(&labels);
        (g0 * (z0 - x0) * (2.0 / 3.0)).re
    } else {
        let mid = C64::new(x0, sgn * 5.0 * step);
        let lm = eval.continue_labels(z0, labels, mid)?;
        let l0 = branches_at(eval, C64::new(x0, 1e-300 * sgn)).map(|s| [s.h0, s.h1, s.h2]).unwrap_or(lm);
        ((gfun(&l0) + 4.0 * gfun(&lm) + gfun(&labels)) / 6.0 * (z0 - x0)).re
    };
    let mut pts = vec![TracePoint { t: 0.0, z: C64::new(x0, 0.0), residual: 0.0 }, TracePoint { t: 10.0 * step, z: z0, residual: residual.abs() }];
    let mut z = z0;
    let mut t = 10.0 * step;
    // orientation: first step heads away from the starting point
    let orient = {
        let g = gfun(&labels);
        let d = C64::new(0.0, 1.0) * g.conj() / g.norm();
        if (d * (z0 - x0).conj()).re >= 0.0 {
            1.0
        } else {
            -1.0
        }
    };
    let field = |l: &[C64; 3], o: f64| -> C64 {
        let g = gfun(l);
        C64::new(0.0, o) * g.conj() / g.norm()
    };
    let end;
    loop {
        if pts.len() >= max_points {
            end = TraceEnd::MaxPoints;
            break;
        }
        let mut h = step;
        let accepted = loop {
            let k1 = field(&labels, orient);
            let z2 = z + 0.5 * h * k1;
            let l2 = eval.continue_labels(z, labels, z2)?;
            let k2 = field(&l2, orient);
            let z3 = z + 0.5 * h * k2;
            let l3 = eval.continue_labels(z, labels, z3)?;
            let k3 = field(&l3, orient);
            let z4 = z + h * k3;
            let l4 = eval.continue_labels(z, labels, z4)?;
            let k4 = field(&l4, orient);
            let zn = z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            let ln = eval.continue_labels(z, labels, zn)?;
            let lmid = eval.continue_labels(z, labels, 0.5 * (z + zn))?;
            let inc = ((gfun(&labels) + 4.0 * gfun(&lmid) + gfun(&ln)) / 6.0 * (zn - z)).re;
            let res = residual + inc;
            if res.abs() < 10.0 * h * h || h < step * 1e-6 {
                break Some((zn, ln, res, h));
            }
            h *= 0.5;
            if h < step * 1e-6 {
                break None;
            }
        };
        let (zn, ln, res, h_used) = match accepted {
            Some(v) => v,
            None => {
                return Err(Error::Convergence { message: "trajectory step rejected down to the floor".into(), residual: residual.abs() });
            }
        };
        // project back onto Re ∫ g dz = 0
        let g = gfun(&ln);
        let corr = -res * g.conj() / g.norm_sqr();
        let zp = zn + corr;
        let lp = eval.continue_labels(zn, ln, zp)?;
        let recorded = res.abs();
        residual = res + (0.5 * (g + gfun(&lp)) * corr).re;
        t += h_used;
        if zp.im * sgn <= 0.0 {
            // crossed the real axis: finish on it by linear interpolation
            let s = z.im / (z.im - zp.im);
            let zr = C64::new(z.re + s * (zp.re - z.re), 0.0);
            pts.push(TracePoint { t, z: zr, residual: recorded });
            let on_mu = zr.re >= eval.mu.0 && zr.re <= eval.mu.1;
            end = if on_mu { TraceEnd::HitSupport } else { TraceEnd::ReachedRealAxis };
            break;
        }
        z = zp;
        labels = lp;
        pts.push(TracePoint { t, z, residual: recorded });
        if (z - 0.5 * (lo + hi)).norm() > 1e3 * span.max(1.0) {
            end = TraceEnd::Escaped;
            break;
        }
    }
    Ok(Trajectory { points: pts, end })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::from_f64(a, b).unwrap()
    }

    #[test]
    fn degenerate_closed_form() {
        let prec = 256;
        let b = b_sigma_c_degenerate(&Float::with_val(prec, -1), &Float::with_val(prec, 0), &Float::with_val(prec, Rational::from((1, 3)))).unwrap();
        let exact = Float::with_val(prec, Rational::from((19683, 8100)));
        assert!(Float::with_val(prec, &b - &exact).abs() < 1e-70);
        assert!(b_sigma_c_degenerate(&Float::with_val(prec, -1), &Float::with_val(prec, 0), &Float::with_val(prec, 0.5)).is_err());
    }

    #[test]
    fn cubic_roots_sum_and_product() {
        let p = C64::new(-1.3, 0.4);
        let q = C64::new(0.2, -0.7);
        let r = cubic_roots(p, q);
        assert!((r[0] + r[1] + r[2]).norm() < 1e-12);
        assert!((r[0] * r[1] * r[2] + q).norm() < 1e-12);
    }

    #[test]
    fn generic_continuation_values() {
        let curve = solve_curve(&iv(-1.0, 0.0), &iv(1.0, 3.0), &Rational::from((9, 20)), 192).unwrap();
        assert_eq!(curve.case, CurveCase::Generic);
        assert!((curve.zeta.to_f64() - 4.0501).abs() < 1e-3, "{}", curve.zeta.to_f64());
        assert!(curve.square_residual < 1e-40);
        let curve = solve_curve(&iv(-2.0, -1.0), &iv(1.0, 2.0), &Rational::from((1, 5)), 192).unwrap();
        assert!((curve.zeta.to_f64() - 2.3200).abs() < 1e-3, "{}", curve.zeta.to_f64());
        let half = solve_curve(&iv(-2.0, -1.0), &iv(1.0, 2.0), &Rational::from((1, 2)), 192).unwrap();
        assert!(half.square_residual < 1e-40, "{}", half.square_residual.to_f64());
        let refl = solve_curve(&iv(1.0, 2.0), &iv(-2.0, -1.0), &Rational::from((1, 5)), 192).unwrap();
        assert!((refl.zeta.to_f64() + 2.3200).abs() < 1e-3);
    }

    #[test]
    fn critical_parameter() {
        let prec = 192;
        let s = Std::new(&iv(-1.0, 1.0), &iv(2.0, 3.0), prec).unwrap();
        let cs = c_star(&s, prec).unwrap();
        assert!((cs.to_f64() - 0.09941).abs() < 1e-5, "{}", cs.to_f64());
        let t = touch_solve(&s, &cs).unwrap();
        assert!((t.r.to_f64() - 1.92779).abs() < 1e-5);
        assert!((t.t.to_f64() - 2.16916).abs() < 1e-5);
        let half = solve_curve(&iv(-1.0, 1.0), &iv(2.0, 3.0), &Rational::from((1, 2)), 192).unwrap();
        assert_eq!(half.case, CurveCase::Generic);
    }

    #[test]
    fn touching_gap_values() {
        let curve = solve_curve(&iv(-1.0, 1.0), &iv(2.0, 3.0), &Rational::from((1, 20)), 192).unwrap();
        assert_eq!(curve.case, CurveCase::Touching);
        assert!(curve.b_sigma_c64() < 3.0 && curve.b_sigma_c64() > 2.0);
        assert!(curve.square_residual < 1e-40);
    }

    #[test]
    fn touching_configuration() {
        let curve = solve_curve(&iv(-1.0, 0.0), &iv(0.0, 3.0), &Rational::from((1, 3)), 128).unwrap();
        assert_eq!(curve.case, CurveCase::DegenerateTouching);
        assert!((curve.b_sigma_c64() - 2.43).abs() < 1e-30);
    }
}
