//! Multiprecision scalars and the small dense linear-algebra kernels the rest
//! of the crate is built on.
//!
//! Everything here works on [`rug::Float`] at a caller-chosen binary
//! precision. Complex numbers are a plain pair of floats; MPC is not needed
//! because only field arithmetic and principal square roots are used.

use rug::float::Constant;
use rug::{Float, Rational};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Decimal digits carried by a float of `prec` bits, plus a guard digit.
pub fn decimal_digits(prec: u32) -> usize {
    (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
}

pub fn fl(prec: u32, x: f64) -> Float {
    Float::with_val(prec, x)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `2^-prec`, the unit roundoff used in convergence tests.
pub fn epsilon(prec: u32) -> Float {
    Float::with_val(prec, 1) >> prec
}

pub fn rat_to_float(prec: u32, q: &Rational) -> Float {
    Float::with_val(prec, q)
}

/// Parse a decimal literal (`-1.25`, `3e-2`, `1/3`) into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Config("empty number".into()));
    }
    if t.contains('/') {
        return Rational::from_str(t).map_err(|e| Error::Config(format!("bad rational `{t}`: {e}")));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = t[i + 1..]
                .parse()
                .map_err(|_| Error::Config(format!("bad exponent in `{t}`")))?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return Err(Error::Config(format!("bad number `{t}`")));
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Config(format!("bad number `{t}`")));
    }
    let digits = format!("{int}{frac}");
    let num = rug::Integer::from_str(if digits.is_empty() { "0" } else { &digits })
        .map_err(|_| Error::Config(format!("bad number `{t}`")))?;
    let scale = exp - frac.len() as i32;
    let ten = rug::Integer::from(10);
    let mut q = Rational::from(num);
    if scale >= 0 {
        q *= Rational::from(rug::ops::Pow::pow(ten.clone(), scale as u32));
    } else {
        q /= Rational::from(rug::ops::Pow::pow(ten, (-scale) as u32));
    }
    if neg {
        q = -q;
    }
    Ok(q)
}

/// Full-precision decimal rendering used in JSON output.
pub fn to_decimal(x: &Float) -> String {
    x.to_string_radix(10, Some(decimal_digits(x.prec())))
}

/// Rendering with `digits` significant digits, used for CSV columns.
pub fn to_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
}

pub fn parse_float(prec: u32, s: &str) -> Result<Float> {
    let p = Float::parse(s.trim()).map_err(|e| Error::Config(format!("bad float `{s}`: {e}")))?;
    Ok(Float::with_val(prec, p))
}

/// Complex number with multiprecision parts.
#[derive(Clone, PartialEq)]
pub struct Cplx {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for Cplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl Cplx {
    pub fn new(re: Float, im: Float) -> Self {
        Cplx { re, im }
    }
    pub fn zero(prec: u32) -> Self {
        Cplx::new(Float::new(prec), Float::new(prec))
    }
    pub fn one(prec: u32) -> Self {
        Cplx::new(Float::with_val(prec, 1), Float::new(prec))
    }
    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Cplx::new(fl(prec, re), fl(prec, im))
    }
    pub fn from_c64(prec: u32, z: num_complex::Complex64) -> Self {
        Cplx::from_f64(prec, z.re, z.im)
    }
    pub fn real(x: Float) -> Self {
        let p = x.prec();
        Cplx::new(x, Float::new(p))
    }
    pub fn prec(&self) -> u32 {
        self.re.prec()
    }
    pub fn with_prec(&self, prec: u32) -> Self {
        Cplx::new(Float::with_val(prec, &self.re), Float::with_val(prec, &self.im))
    }
    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    pub fn add(&self, o: &Cplx) -> Cplx {
        let p = self.prec();
        Cplx::new(Float::with_val(p, &self.re + &o.re), Float::with_val(p, &self.im + &o.im))
    }
    pub fn sub(&self, o: &Cplx) -> Cplx {
        let p = self.prec();
        Cplx::new(Float::with_val(p, &self.re - &o.re), Float::with_val(p, &self.im - &o.im))
    }
    pub fn neg(&self) -> Cplx {
        Cplx::new(-self.re.clone(), -self.im.clone())
    }
    pub fn conj(&self) -> Cplx {
        Cplx::new(self.re.clone(), -self.im.clone())
    }
    pub fn mul(&self, o: &Cplx) -> Cplx {
        let p = self.prec();
        let mut re = Float::with_val(p, &self.re * &o.re);
        re -= &self.im * &o.im;
        let mut im = Float::with_val(p, &self.re * &o.im);
        im += &self.im * &o.re;
        Cplx::new(re, im)
    }
    pub fn scale(&self, s: &Float) -> Cplx {
        let p = self.prec();
        Cplx::new(Float::with_val(p, &self.re * s), Float::with_val(p, &self.im * s))
    }
    pub fn add_real(&self, s: &Float) -> Cplx {
        let p = self.prec();
        Cplx::new(Float::with_val(p, &self.re + s), self.im.clone())
    }
    pub fn sub_real(&self, s: &Float) -> Cplx {
        let p = self.prec();
        Cplx::new(Float::with_val(p, &self.re - s), self.im.clone())
    }
    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        let mut r = Float::with_val(p, self.re.square_ref());
        r += Float::with_val(p, self.im.square_ref());
        r
    }
    pub fn abs(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.hypot_ref(&self.im))
    }
    pub fn recip(&self) -> Cplx {
        let d = self.norm_sqr();
        let p = self.prec();
        Cplx::new(Float::with_val(p, &self.re / &d), Float::with_val(p, -&self.im) / &d)
    }
    pub fn div(&self, o: &Cplx) -> Cplx {
        if o.is_real() {
            let p = self.prec();
            return Cplx::new(Float::with_val(p, &self.re / &o.re), Float::with_val(p, &self.im / &o.re));
        }
        self.mul(&o.recip())
    }
    pub fn div_real(&self, s: &Float) -> Cplx {
        let p = self.prec();
        Cplx::new(Float::with_val(p, &self.re / s), Float::with_val(p, &self.im / s))
    }
    /// Principal square root, cut along the negative real axis.
    pub fn sqrt(&self) -> Cplx {
        let p = self.prec();
        if self.re.is_zero() && self.im.is_zero() {
            return Cplx::zero(p);
        }
        let r = self.abs();
        if self.re >= 0 {
            let t = Float::with_val(p, Float::with_val(p, &r + &self.re) / 2u32).sqrt();
            let im = Float::with_val(p, &self.im / &t) / 2u32;
            Cplx::new(t, im)
        } else {
            let t = Float::with_val(p, Float::with_val(p, &r - &self.re) / 2u32).sqrt();
            let re = Float::with_val(p, self.im.abs_ref()) / &t / 2u32;
            let im = if self.im.is_sign_negative() { -t } else { t };
            Cplx::new(re, im)
        }
    }
    pub fn ln_abs(&self) -> Float {
        self.abs().ln()
    }
}

/// Dense row-major matrix of floats.
#[derive(Clone, Debug)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Float>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        Matrix { rows, cols, data: vec![Float::new(prec); rows * cols] }
    }
    pub fn get(&self, i: usize, j: usize) -> &Float {
        &self.data[i * self.cols + j]
    }
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Float {
        &mut self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: Float) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> &[Float] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix together with the squared
/// first components of the normalized eigenvectors, by implicit QL with
/// Wilkinson-type shifts. Eigenvalues come back in ascending order.
pub fn tridiagonal_eigen(diag: &[Float], offdiag: &[Float]) -> Result<(Vec<Float>, Vec<Float>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((vec![], vec![]));
    }
    let prec = diag[0].prec();
    let eps = epsilon(prec);
    let mut d: Vec<Float> = diag.to_vec();
    let mut e: Vec<Float> = (0..n).map(|i| if i + 1 < n { offdiag[i].clone() } else { Float::new(prec) }).collect();
    let mut z: Vec<Float> = (0..n).map(|i| Float::with_val(prec, if i == 0 { 1 } else { 0 })).collect();
    let max_iter = 60 + prec as usize / 8;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = Float::with_val(prec, d[m].abs_ref()) + Float::with_val(prec, d[m + 1].abs_ref());
                if Float::with_val(prec, e[m].abs_ref()) <= Float::with_val(prec, &eps * &dd) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(Error::Numerical(format!(
                    "tridiagonal eigen-solve failed to converge at index {l} (block size {n}, |e|={:e})",
                    e[l].to_f64()
                )));
            }
            let mut g = Float::with_val(prec, &d[l + 1] - &d[l]) / Float::with_val(prec, &e[l] * 2u32);
            let mut r = Float::with_val(prec, g.hypot_ref(&Float::with_val(prec, 1)));
            let sr = if g.is_sign_negative() { -r.clone() } else { r.clone() };
            g = Float::with_val(prec, &d[m] - &d[l]) + Float::with_val(prec, &e[l] / Float::with_val(prec, &g + &sr));
            let mut s = Float::with_val(prec, 1);
            let mut c = Float::with_val(prec, 1);
            let mut p = Float::new(prec);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = Float::with_val(prec, &s * &e[i]);
                let b = Float::with_val(prec, &c * &e[i]);
                r = Float::with_val(prec, f.hypot_ref(&g));
                e[i + 1] = r.clone();
                if r.is_zero() {
                    d[i + 1] -= &p;
                    e[m] = Float::new(prec);
                    underflow = true;
                    break;
                }
                s = Float::with_val(prec, &f / &r);
                c = Float::with_val(prec, &g / &r);
                g = Float::with_val(prec, &d[i + 1] - &p);
                r = Float::with_val(prec, &d[i] - &g) * &s + Float::with_val(prec, &c * &b) * 2u32;
                p = Float::with_val(prec, &s * &r);
                d[i + 1] = Float::with_val(prec, &g + &p);
                g = Float::with_val(prec, &c * &r) - &b;
                let fz = z[i + 1].clone();
                z[i + 1] = Float::with_val(prec, &s * &z[i]) + Float::with_val(prec, &c * &fz);
                z[i] = Float::with_val(prec, &c * &z[i]) - Float::with_val(prec, &s * &fz);
            }
            if underflow {
                continue;
            }
            d[l] -= &p;
            e[l] = g;
            e[m] = Float::new(prec);
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let vals = idx.iter().map(|&i| d[i].clone()).collect();
    let w = idx.iter().map(|&i| Float::with_val(prec, z[i].square_ref())).collect();
    Ok((vals, w))
}

/// Result of the one-sided Jacobi SVD of a wide matrix.
#[derive(Clone, Debug)]
pub struct NullSpace {
    /// Unit right singular vector of the smallest singular value.
    pub vector: Vec<Float>,
    /// Column norms after orthogonalization, sorted ascending.
    pub singular_values: Vec<Float>,
}

/// Null vector and singular values of a `rows × (rows + 1)` matrix.
///
/// A column-pivoted Householder QR of `Aᵀ` yields the null direction as the
/// last column of `Q`; one-sided Jacobi on the triangular factor then gives
/// the singular values, converging in a few sweeps thanks to the pivoting.
pub fn jacobi_null_vector(a: &Matrix) -> Result<NullSpace> {
    let (m, n) = (a.rows, a.cols);
    if n != m + 1 {
        return Err(Error::Numerical(format!("null vector needs a k x (k+1) block, got {m}x{n}")));
    }
    let prec = a.data.first().map(|x| x.prec()).unwrap_or(64);
    // rows of A are the columns of Aᵀ
    let mut cols: Vec<Vec<Float>> = (0..m).map(|i| a.row(i).to_vec()).collect();
    let mut norms: Vec<Float> = cols.iter().map(|c| dot(c, c, prec)).collect();
    let mut reflectors: Vec<Vec<Float>> = Vec::with_capacity(m);
    for k in 0..m {
        let piv = (k..m).max_by(|&x, &y| norms[x].partial_cmp(&norms[y]).unwrap()).unwrap();
        cols.swap(k, piv);
        norms.swap(k, piv);
        let tail_norm = {
            let mut s = Float::new(prec);
            for x in &cols[k][k..] {
                s += Float::with_val(prec, x.square_ref());
            }
            s.sqrt()
        };
        let mut v: Vec<Float> = cols[k][k..].to_vec();
        if tail_norm.is_zero() {
            reflectors.push(vec![Float::new(prec); n - k]);
            continue;
        }
        let alpha = if v[0].is_sign_negative() { tail_norm.clone() } else { -tail_norm.clone() };
        v[0] -= &alpha;
        let vn = dot(&v, &v, prec);
        if vn.is_zero() {
            reflectors.push(vec![Float::new(prec); n - k]);
            continue;
        }
        let vn = vn.sqrt();
        for x in v.iter_mut() {
            *x /= &vn;
        }
        for c in cols.iter_mut().skip(k) {
            apply_reflector(&v, &mut c[k..], prec);
        }
        for j in k + 1..m {
            norms[j] = dot(&cols[j][k + 1..], &cols[j][k + 1..], prec);
        }
        reflectors.push(v);
    }
    // null direction: Q e_{n-1}
    let mut vector = vec![Float::new(prec); n];
    vector[n - 1] = Float::with_val(prec, 1);
    for (k, v) in reflectors.iter().enumerate().rev() {
        apply_reflector(v, &mut vector[k..], prec);
    }
    let mut residual = Float::new(prec);
    for i in 0..m {
        let r = dot(a.row(i), &vector, prec);
        residual += Float::with_val(prec, r.square_ref());
    }
    let residual = residual.sqrt();
    // columns of Rᵀ are the rows of R, i.e. cols[k][j] for j ≤ k read by row
    let mut x: Vec<Vec<Float>> = (0..m).map(|i| (0..m).map(|k| if i <= k { cols[k][i].clone() } else { Float::new(prec) }).collect()).collect();
    let sv = jacobi_column_norms(&mut x, prec)?;
    let mut singular_values = vec![residual];
    singular_values.extend(sv);
    singular_values.sort_by(|p, q| p.partial_cmp(q).unwrap());
    Ok(NullSpace { vector, singular_values })
}

fn dot(x: &[Float], y: &[Float], prec: u32) -> Float {
    let mut s = Float::new(prec);
    for (a, b) in x.iter().zip(y) {
        s += a * b;
    }
    s
}

fn apply_reflector(v: &[Float], x: &mut [Float], prec: u32) {
    let d = Float::with_val(prec, dot(v, x, prec) * 2u32);
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= Float::with_val(prec, vi * &d);
    }
}

/// One-sided Jacobi: orthogonalizes the columns in place and returns their
/// norms, which are the singular values.
fn jacobi_column_norms(cols: &mut [Vec<Float>], prec: u32) -> Result<Vec<Float>> {
    let n = cols.len();
    let tol = Float::with_val(prec, epsilon(prec) * 4u32);
    let mut sq: Vec<Float> = cols.iter().map(|c| dot(c, c, prec)).collect();
    let fro = sq.iter().fold(Float::new(prec), |s, x| s + x);
    // columns this small are numerically zero and are left alone
    let floor = Float::with_val(prec, &fro * Float::with_val(prec, tol.square_ref()));
    let max_sweeps = 30 + prec as usize / 16;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                if sq[p] <= floor || sq[q] <= floor {
                    continue;
                }
                let gamma = dot(&cols[p], &cols[q], prec);
                let thresh = Float::with_val(prec, &sq[p] * &sq[q]).sqrt() * &tol;
                if Float::with_val(prec, gamma.abs_ref()) <= thresh {
                    continue;
                }
                rotated = true;
                let zeta = Float::with_val(prec, &sq[q] - &sq[p]) / Float::with_val(prec, &gamma * 2u32);
                let root = Float::with_val(prec, Float::with_val(prec, zeta.square_ref()) + 1u32).sqrt();
                let t0 = Float::with_val(prec, 1) / (Float::with_val(prec, zeta.abs_ref()) + root);
                let t = if zeta.is_sign_negative() { -t0 } else { t0 };
                let c = Float::with_val(prec, 1) / Float::with_val(prec, Float::with_val(prec, t.square_ref()) + 1u32).sqrt();
                let s = Float::with_val(prec, &c * &t);
                rotate(cols, p, q, &c, &s);
                let tg = Float::with_val(prec, &t * &gamma);
                sq[p] -= &tg;
                sq[q] += &tg;
            }
        }
        if !rotated {
            return Ok(cols.iter().map(|c| dot(c, c, prec).sqrt()).collect());
        }
        for (s, c) in sq.iter_mut().zip(cols.iter()) {
            *s = dot(c, c, prec);
        }
    }
    Err(Error::Numerical(format!("Jacobi SVD did not converge for a {n}x{n} triangular factor")))
}

fn rotate(cols: &mut [Vec<Float>], p: usize, q: usize, c: &Float, s: &Float) {
    let prec = c.prec();
    let (lo, hi) = cols.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let nx = Float::with_val(prec, c * &*x) - Float::with_val(prec, s * &*y);
        let ny = Float::with_val(prec, s * &*x) + Float::with_val(prec, c * &*y);
        *x = nx;
        *y = ny;
    }
}

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &Matrix, b: &[Float]) -> Result<Vec<Float>> {
    let n = a.rows;
    assert_eq!(a.cols, n);
    let prec = b.first().map(|x| x.prec()).unwrap_or(64);
    let mut m: Vec<Vec<Float>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| m[i][k].clone().abs().partial_cmp(&m[j][k].clone().abs()).unwrap())
            .unwrap();
        if m[piv][k].is_zero() {
            return Err(Error::Numerical(format!("singular {n}x{n} system at column {k}")));
        }
        m.swap(k, piv);
        rhs.swap(k, piv);
        for i in k + 1..n {
            let f = Float::with_val(prec, &m[i][k] / &m[k][k]);
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let t = Float::with_val(prec, &f * &m[k][j]);
                m[i][j] -= t;
            }
            let t = Float::with_val(prec, &f * &rhs[k]);
            rhs[i] -= t;
        }
    }
    let mut x = vec![Float::new(prec); n];
    for k in (0..n).rev() {
        let mut s = rhs[k].clone();
        for j in k + 1..n {
            s -= &m[k][j] * &x[j];
        }
        x[k] = s / &m[k][k];
    }
    Ok(x)
}

/// Eigenvalues of a real upper Hessenberg matrix by the shifted double-step
/// QR iteration. The matrix is balanced first and consumed.
pub fn hessenberg_eigenvalues(mut a: Matrix) -> Result<Vec<Cplx>> {
    let n = a.rows;
    if n == 0 {
        return Ok(vec![]);
    }
    let prec = a.get(0, 0).prec();
    balance(&mut a);
    // 1-based indexing keeps the transcription of the classic algorithm honest.
    let mut h = vec![vec![Float::new(prec); n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            h[i + 1][j + 1] = a.get(i, j).clone();
        }
    }
    let eps = epsilon(prec);
    let absf = |x: &Float| Float::with_val(prec, x.abs_ref());
    let mut wr = vec![Float::new(prec); n + 1];
    let mut wi = vec![Float::new(prec); n + 1];
    let mut anorm = Float::new(prec);
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += absf(&h[i][j]);
        }
    }
    let mut nn = n;
    let mut t = Float::new(prec);
    let max_its = 30 + prec as usize / 16;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = absf(&h[l - 1][l - 1]) + absf(&h[l][l]);
                if s.is_zero() {
                    s = anorm.clone();
                }
                if absf(&h[l][l - 1]) <= Float::with_val(prec, &eps * &s) {
                    h[l][l - 1] = Float::new(prec);
                    break;
                }
                l -= 1;
            }
            let mut x = h[nn][nn].clone();
            if l == nn {
                wr[nn] = Float::with_val(prec, &x + &t);
                wi[nn] = Float::new(prec);
                nn -= 1;
                break;
            }
            let mut y = h[nn - 1][nn - 1].clone();
            let mut w = Float::with_val(prec, &h[nn][nn - 1] * &h[nn - 1][nn]);
            if l == nn - 1 {
                let p = Float::with_val(prec, &y - &x) / 2u32;
                let q = Float::with_val(prec, p.square_ref()) + &w;
                let z = Float::with_val(prec, q.abs_ref()).sqrt();
                x += &t;
                if q >= 0 {
                    let z = if p.is_sign_negative() { Float::with_val(prec, &p - &z) } else { Float::with_val(prec, &p + &z) };
                    wr[nn - 1] = Float::with_val(prec, &x + &z);
                    wr[nn] = wr[nn - 1].clone();
                    if !z.is_zero() {
                        wr[nn] = Float::with_val(prec, &x - Float::with_val(prec, &w / &z));
                    }
                    wi[nn - 1] = Float::new(prec);
                    wi[nn] = Float::new(prec);
                } else {
                    wr[nn - 1] = Float::with_val(prec, &x + &p);
                    wr[nn] = wr[nn - 1].clone();
                    wi[nn - 1] = -z.clone();
                    wi[nn] = z;
                }
                if nn < 2 {
                    nn = 0;
                } else {
                    nn -= 2;
                }
                break;
            }
            if its >= max_its {
                return Err(Error::Numerical(format!("Hessenberg QR failed to converge ({n}x{n}, {nn} eigenvalues left)")));
            }
            if its > 0 && its % 10 == 0 {
                t += &x;
                for i in 1..=nn {
                    h[i][i] -= &x;
                }
                let s = absf(&h[nn][nn - 1]) + absf(&h[nn - 1][nn - 2]);
                x = Float::with_val(prec, &s * 3u32) / 4u32;
                y = x.clone();
                w = -Float::with_val(prec, s.square_ref()) * 7u32 / 16u32;
            }
            its += 1;
            let (mut p, mut q, mut r);
            let mut z;
            let mut m = nn - 2;
            loop {
                z = h[m][m].clone();
                let rr = Float::with_val(prec, &x - &z);
                let ss = Float::with_val(prec, &y - &z);
                p = (Float::with_val(prec, &rr * &ss) - &w) / &h[m + 1][m] + &h[m][m + 1];
                q = Float::with_val(prec, &h[m + 1][m + 1] - &z) - &rr - &ss;
                r = h[m + 2][m + 1].clone();
                let s = absf(&p) + absf(&q) + absf(&r);
                p /= &s;
                q /= &s;
                r /= &s;
                if m == l {
                    break;
                }
                let u = absf(&h[m][m - 1]) * (absf(&q) + absf(&r));
                let v = absf(&p) * (absf(&h[m - 1][m - 1]) + absf(&z) + absf(&h[m + 1][m + 1]));
                if u <= Float::with_val(prec, &eps * &v) {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                h[i][i - 2] = Float::new(prec);
                if i != m + 2 {
                    h[i][i - 3] = Float::new(prec);
                }
            }
            let mut k = m;
            while k + 1 <= nn {
                if k != m {
                    p = h[k][k - 1].clone();
                    q = h[k + 1][k - 1].clone();
                    r = if k != nn - 1 { h[k + 2][k - 1].clone() } else { Float::new(prec) };
                    x = absf(&p) + absf(&q) + absf(&r);
                    if !x.is_zero() {
                        p /= &x;
                        q /= &x;
                        r /= &x;
                    }
                }
                let mut s = (Float::with_val(prec, p.square_ref()) + Float::with_val(prec, q.square_ref())
                    + Float::with_val(prec, r.square_ref()))
                .sqrt();
                if p.is_sign_negative() {
                    s = -s;
                }
                if !s.is_zero() {
                    if k == m {
                        if l != m {
                            h[k][k - 1] = -h[k][k - 1].clone();
                        }
                    } else {
                        h[k][k - 1] = -Float::with_val(prec, &s * &x);
                    }
                    p += &s;
                    x = Float::with_val(prec, &p / &s);
                    y = Float::with_val(prec, &q / &s);
                    z = Float::with_val(prec, &r / &s);
                    q /= &p;
                    r /= &p;
                    for j in k..=nn {
                        let mut pp = Float::with_val(prec, &h[k][j] + Float::with_val(prec, &q * &h[k + 1][j]));
                        if k != nn - 1 {
                            pp += &r * &h[k + 2][j];
                            let d = Float::with_val(prec, &pp * &z);
                            h[k + 2][j] -= d;
                        }
                        let d = Float::with_val(prec, &pp * &y);
                        h[k + 1][j] -= d;
                        let d = Float::with_val(prec, &pp * &x);
                        h[k][j] -= d;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = Float::with_val(prec, &x * &h[i][k]) + Float::with_val(prec, &y * &h[i][k + 1]);
                        if k != nn - 1 {
                            pp += &z * &h[i][k + 2];
                            let d = Float::with_val(prec, &pp * &r);
                            h[i][k + 2] -= d;
                        }
                        let d = Float::with_val(prec, &pp * &q);
                        h[i][k + 1] -= d;
                        h[i][k] -= &pp;
                    }
                }
                k += 1;
            }
            if l + 1 >= nn {
                continue;
            }
        }
    }
    Ok((1..=n).map(|i| Cplx::new(wr[i].clone(), wi[i].clone())).collect())
}

fn balance(a: &mut Matrix) {
    let n = a.rows;
    let prec = a.get(0, 0).prec();
    let mut done = false;
    let mut sweeps = 0;
    while !done && sweeps < 100 {
        done = true;
        sweeps += 1;
        for i in 0..n {
            let mut r = Float::new(prec);
            let mut c = Float::new(prec);
            for j in 0..n {
                if j != i {
                    c += a.get(j, i).clone().abs();
                    r += a.get(i, j).clone().abs();
                }
            }
            if c.is_zero() || r.is_zero() {
                continue;
            }
            let s = Float::with_val(prec, &c + &r);
            let mut f = Float::with_val(prec, 1);
            let g = Float::with_val(prec, &r / 2u32);
            while c < g {
                f *= 2u32;
                c *= 4u32;
            }
            let g = Float::with_val(prec, &r * 2u32);
            while c > g {
                f /= 2u32;
                c /= 4u32;
            }
            if Float::with_val(prec, &c + &r) / &f < Float::with_val(prec, &s * 0.95f64) {
                done = false;
                let gi = Float::with_val(prec, 1) / &f;
                for j in 0..n {
                    *a.get_mut(i, j) *= &gi;
                }
                for j in 0..n {
                    *a.get_mut(j, i) *= &f;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_rational("0.01").unwrap(), Rational::from((1, 100)));
        assert_eq!(parse_rational("-2.5e1").unwrap(), Rational::from(-25));
        assert_eq!(parse_rational("1/3").unwrap(), Rational::from((1, 3)));
        assert_eq!(parse_rational("+.5").unwrap(), Rational::from((1, 2)));
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn complex_sqrt_is_principal() {
        let z = Cplx::from_f64(128, -4.0, 0.0);
        let r = z.sqrt().to_c64();
        assert!((r.re).abs() < 1e-30 && (r.im - 2.0).abs() < 1e-30);
        let z = Cplx::from_f64(128, -4.0, -0.0);
        assert!(z.sqrt().to_c64().im < 0.0);
        let w = Cplx::from_f64(128, 3.0, -4.0);
        let s = w.sqrt();
        let back = s.mul(&s).sub(&w).abs().to_f64();
        assert!(back < 1e-35);
        assert!(s.re > 0);
    }

    #[test]
    fn tridiagonal_chebyshev_nodes() {
        let prec = 200;
        let n = 5;
        let d = vec![Float::new(prec); n];
        let mut e = vec![fl(prec, 0.5f64.sqrt())];
        e.extend((1..n - 1).map(|_| fl(prec, 0.5)));
        let (x, w) = tridiagonal_eigen(&d, &e).unwrap();
        for k in 0..n {
            let exact = -(((2 * k + 1) as f64) * std::f64::consts::PI / (2.0 * n as f64)).cos();
            assert!((x[k].to_f64() - exact).abs() < 1e-15);
            assert!((w[k].to_f64() - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn hessenberg_roots_of_companion() {
        // x^3 - 6x^2 + 11x - 6 and x^2 + 1 folded into a 5x5 companion.
        let prec = 256;
        let coeffs = [-6.0, 11.0, -6.0]; // x^3 + c2 x^2 + c1 x + c0 with c = (-6, 11, -6)
        let poly = |c: &[f64]| {
            let n = c.len();
            let mut m = Matrix::zeros(n, n, prec);
            for i in 0..n {
                m.set(0, i, fl(prec, -c[n - 1 - i]));
            }
            for i in 1..n {
                m.set(i, i - 1, fl(prec, 1.0));
            }
            m
        };
        let mut ev: Vec<f64> = hessenberg_eigenvalues(poly(&[coeffs[2], coeffs[1], coeffs[0]])).unwrap().iter().map(|z| z.re.to_f64()).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (e, x) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((e - x).abs() < 1e-30);
        }
        // (x^2+1)(x^2-4) = x^4 - 3x^2 - 4
        let ev = hessenberg_eigenvalues(poly(&[-4.0, 0.0, -3.0, 0.0])).unwrap();
        let mut ims: Vec<f64> = ev.iter().map(|z| z.im.to_f64().abs()).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(ims[0] < 1e-30 && (ims[3] - 1.0).abs() < 1e-30);
    }

    #[test]
    fn jacobi_finds_null_vector() {
        let prec = 256;
        let mut a = Matrix::zeros(2, 3, prec);
        let vals = [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]];
        for i in 0..2 {
            for j in 0..3 {
                a.set(i, j, fl(prec, vals[i][j]));
            }
        }
        let ns = jacobi_null_vector(&a).unwrap();
        let s = Float::with_val(prec, 6).sqrt();
        let expect = [1, -2, 1];
        let sign = if ns.vector[0].is_sign_negative() { -1 } else { 1 };
        for k in 0..3 {
            let d = Float::with_val(prec, &ns.vector[k] * sign) - Float::with_val(prec, expect[k]) / &s;
            assert!(d.to_f64().abs() < 1e-60);
        }
        assert!(ns.singular_values[0].to_f64() < 1e-60);
    }

    #[test]
    fn gaussian_elimination() {
        let prec = 128;
        let mut a = Matrix::zeros(3, 3, prec);
        let vals = [[0.0, 2.0, 1.0], [1.0, 1.0, 1.0], [2.0, 1.0, 3.0]];
        for i in 0..3 {
            for j in 0..3 {
                a.set(i, j, fl(prec, vals[i][j]));
            }
        }
        let b = vec![fl(prec, 7.0), fl(prec, 6.0), fl(prec, 13.0)];
        let x = solve_linear(&a, &b).unwrap();
        for (xi, e) in x.iter().zip([1, 2, 3]) {
            assert!(Float::with_val(prec, xi - e).to_f64().abs() < 1e-30);
        }
    }
}
