//! Frobenius–Padé approximants `P_{m,n}/Q_{m,n}` of a function `f` expanded
//! in the orthonormal polynomials `p_j` of `μ`.
//!
//! With `Q = Σ a_j p_j` (degree `n`) and `P = Σ b_j p_j` (degree `m`), the
//! defining conditions `c_i(Q f − P; μ) = 0` for `i ≤ m + n` split into
//! `n` homogeneous equations for `a` (rows `m+1..m+n`) and the explicit
//! formula `b_i = Σ_j c_i(p_j f; μ) a_j` for `i ≤ m`.

use std::sync::Mutex;

use rayon::prelude::*;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::{self, Cplx, Matrix};
use crate::orthoexp::{self, GaussRule, Interval, MeasureSpec, Recurrence};

/// Type `(m, n)` of an approximant: `deg P ≤ m`, `deg Q ≤ n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrobeniusIndex {
    pub m: usize,
    pub n: usize,
}

impl FrobeniusIndex {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("index needs n >= 1".into()));
        }
        if n > m + 1 {
            return Err(Error::Config(format!("index ({m},{n}) violates n - 1 <= m")));
        }
        Ok(FrobeniusIndex { m, n })
    }
    pub fn total(&self) -> usize {
        self.m + self.n
    }
    /// `n / (n + m + 1)`, the parameter of the curve governing this index.
    pub fn ray_parameter(&self) -> f64 {
        self.n as f64 / (self.n + self.m + 1) as f64
    }
}

/// How fast Gauss quadrature of `f · polynomial` converges on `Δ_μ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Analyticity {
    /// `f` is a polynomial of the given degree.
    Polynomial(usize),
    /// `f` is analytic inside the Bernstein ellipse with this parameter.
    Ellipse(f64),
}

/// A function whose Fourier coefficients in `p_j` are approximated.
pub trait TargetFunction: Send + Sync {
    fn eval(&self, z: &Cplx) -> Result<Cplx>;
    fn eval_real(&self, x: &Float) -> Result<Float> {
        Ok(self.eval(&Cplx::real(x.clone()))?.re)
    }
    fn analyticity(&self, mu: &Interval) -> Analyticity;
}

/// Built-in targets.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    /// `σ̂(z) = ∫ dσ(t)/(t − z)`.
    Markov(MeasureSpec),
    /// `1/(x − t_0)`.
    SimplePole(Rational),
    /// Ascending monomial coefficients.
    Polynomial(Vec<Rational>),
}

impl Target {
    pub fn sigma(&self) -> Option<&MeasureSpec> {
        match self {
            Target::Markov(s) => Some(s),
            _ => None,
        }
    }
}

impl TargetFunction for Target {
    fn eval(&self, z: &Cplx) -> Result<Cplx> {
        let prec = z.prec();
        match self {
            Target::Markov(s) => orthoexp::cauchy_transform(s, z, prec),
            Target::SimplePole(t0) => {
                let d = z.sub_real(&Float::with_val(prec, t0));
                if d.re.is_zero() && d.im.is_zero() {
                    return Err(Error::Domain("evaluation at the pole".into()));
                }
                Ok(d.recip())
            }
            Target::Polynomial(c) => {
                let mut acc = Cplx::zero(prec);
                for q in c.iter().rev() {
                    acc = acc.mul(z).add_real(&Float::with_val(prec, q));
                }
                Ok(acc)
            }
        }
    }

    fn analyticity(&self, mu: &Interval) -> Analyticity {
        match self {
            Target::Markov(s) => {
                let iv = &s.interval;
                let mut rho = mu.ellipse_param(num_complex::Complex64::new(iv.a64(), 0.0))
                    .min(mu.ellipse_param(num_complex::Complex64::new(iv.b64(), 0.0)));
                if let Some(p) = s.weight.pole_param(mu) {
                    rho = rho.min(p);
                }
                Analyticity::Ellipse(rho)
            }
            Target::SimplePole(t0) => Analyticity::Ellipse(mu.ellipse_param(num_complex::Complex64::new(t0.to_f64(), 0.0))),
            Target::Polynomial(c) => Analyticity::Polynomial(c.len().saturating_sub(1)),
        }
    }
}

/// Extra Gauss nodes needed for `prec`-bit accuracy when the integrand is
/// analytic inside the ellipse with parameter `rho`.
pub fn quadrature_margin(prec: u32, rho: f64) -> usize {
    let lr = rho.max(1.0 + 1e-9).ln();
    ((prec as f64 * std::f64::consts::LN_2 / (2.0 * lr)).ceil() as usize + 16).min(200_000)
}

/// `μ`, a target `f`, and a working precision.
pub struct FrobeniusProblem {
    pub mu: MeasureSpec,
    pub target: Target,
    pub prec: u32,
    rec: Mutex<Recurrence>,
}

impl Clone for FrobeniusProblem {
    fn clone(&self) -> Self {
        FrobeniusProblem {
            mu: self.mu.clone(),
            target: self.target.clone(),
            prec: self.prec,
            rec: Mutex::new(self.rec.lock().unwrap().clone()),
        }
    }
}

impl FrobeniusProblem {
    pub fn new(mu: MeasureSpec, target: Target, prec: u32) -> Result<Self> {
        match &target {
            Target::Markov(s) => {
                if s.interval.overlaps(&mu.interval) {
                    return Err(Error::Domain(format!(
                        "supports of mu [{}, {}] and sigma [{}, {}] must be disjoint",
                        mu.interval.a64(),
                        mu.interval.b64(),
                        s.interval.a64(),
                        s.interval.b64()
                    )));
                }
            }
            Target::SimplePole(t0) => {
                if *t0 >= mu.interval.a && *t0 <= mu.interval.b {
                    return Err(Error::Domain("pole of the target lies on the support of mu".into()));
                }
            }
            Target::Polynomial(c) if c.is_empty() => return Err(Error::Config("empty polynomial target".into())),
            Target::Polynomial(_) => {}
        }
        let rec = orthoexp::recurrence_coeffs(&mu, 8, prec)?;
        Ok(FrobeniusProblem { mu, target, prec, rec: Mutex::new(rec) })
    }

    pub fn markov(mu: MeasureSpec, sigma: MeasureSpec, prec: u32) -> Result<Self> {
        FrobeniusProblem::new(mu, Target::Markov(sigma), prec)
    }

    /// Recurrence of `μ` with at least `count` coefficients.
    pub fn recurrence(&self, count: usize) -> Result<Recurrence> {
        let mut guard = self.rec.lock().unwrap();
        if guard.len() < count {
            *guard = orthoexp::recurrence_coeffs(&self.mu, count.max(2 * guard.len()), self.prec)?;
        }
        Ok(guard.clone())
    }

    /// Gauss-`μ` rule accurate for `f · p_i · p_j`, `i ≤ max_row`.
    pub fn node_count(&self, max_row: usize, max_col: usize) -> usize {
        match self.target.analyticity(&self.mu.interval) {
            Analyticity::Polynomial(d) => (max_row + max_col + d) / 2 + 2,
            Analyticity::Ellipse(rho) => max_row + 1 + quadrature_margin(self.prec, rho),
        }
    }

    pub fn gauss_rule(&self, nodes: usize) -> Result<GaussRule> {
        let rec = self.recurrence(nodes)?;
        orthoexp::gauss_rule(&rec, nodes)
    }

    /// Entries `c_i(p_j f; μ)` for `i ≤ max_row`, `j ≤ max_col`.
    pub fn table(&self, max_row: usize, max_col: usize) -> Result<FrobeniusTable> {
        let nodes = self.node_count(max_row, max_col);
        self.table_with_nodes(max_row, max_col, nodes)
    }

    pub fn table_with_nodes(&self, max_row: usize, max_col: usize, nodes: usize) -> Result<FrobeniusTable> {
        let prec = self.prec;
        let rule = self.gauss_rule(nodes)?;
        let rec = self.recurrence(max_row + 2)?;
        let fw: Vec<Float> = rule
            .nodes
            .par_iter()
            .zip(&rule.weights)
            .map(|(x, w)| Ok(Float::with_val(prec, w * &self.target.eval_real(x)?)))
            .collect::<Result<_>>()?;
        let pvals: Vec<Vec<Float>> = rule.nodes.par_iter().map(|x| orthoexp::eval_poly_real(&rec, max_row, x)).collect();
        let rows: Vec<Vec<Float>> = (0..=max_row)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![Float::new(prec); max_col + 1];
                for (k, pk) in pvals.iter().enumerate() {
                    let t = Float::with_val(prec, &fw[k] * &pk[i]);
                    for (j, slot) in row.iter_mut().enumerate() {
                        *slot += &t * &pk[j];
                    }
                }
                row
            })
            .collect();
        let mut entries = Matrix::zeros(max_row + 1, max_col + 1, prec);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                entries.set(i, j, v);
            }
        }
        Ok(FrobeniusTable { entries, nodes })
    }

    /// The stacked `(m+n+1) × (n+1)` system for one index.
    pub fn build_frobenius_matrix(&self, index: FrobeniusIndex) -> Result<Matrix> {
        let t = self.table(index.total(), index.n)?;
        t.system(index)
    }

    pub fn solve(&self, index: FrobeniusIndex) -> Result<Approximant> {
        let t = self.table(index.total(), index.n)?;
        t.solve(index)
    }

    /// Approximants for many indices sharing one table.
    pub fn solve_many(&self, indices: &[FrobeniusIndex]) -> Result<Vec<Approximant>> {
        let max_row = indices.iter().map(|i| i.total()).max().unwrap_or(0);
        let max_col = indices.iter().map(|i| i.n).max().unwrap_or(0);
        let t = self.table(max_row, max_col)?;
        indices.par_iter().map(|&i| t.solve(i)).collect()
    }
}

/// Precomputed Fourier coefficients `c_i(p_j f; μ)`.
#[derive(Clone, Debug)]
pub struct FrobeniusTable {
    pub entries: Matrix,
    pub nodes: usize,
}

impl FrobeniusTable {
    pub fn entry(&self, i: usize, j: usize) -> &Float {
        self.entries.get(i, j)
    }

    fn check(&self, index: FrobeniusIndex) -> Result<()> {
        if index.total() >= self.entries.rows || index.n >= self.entries.cols {
            return Err(Error::Config(format!("table too small for index ({},{})", index.m, index.n)));
        }
        Ok(())
    }

    pub fn system(&self, index: FrobeniusIndex) -> Result<Matrix> {
        self.check(index)?;
        let prec = self.entries.get(0, 0).prec();
        let mut m = Matrix::zeros(index.total() + 1, index.n + 1, prec);
        for i in 0..=index.total() {
            for j in 0..=index.n {
                m.set(i, j, self.entry(i, j).clone());
            }
        }
        Ok(m)
    }

    pub fn solve(&self, index: FrobeniusIndex) -> Result<Approximant> {
        self.check(index)?;
        let (m, n) = (index.m, index.n);
        let prec = self.entries.get(0, 0).prec();
        let mut block = Matrix::zeros(n, n + 1, prec);
        // rows below this are quadrature roundoff of exact zeros
        let floor = (0..=m + n)
            .flat_map(|i| (0..=n).map(move |j| (i, j)))
            .map(|(i, j)| Float::with_val(prec, self.entry(i, j).abs_ref()))
            .fold(Float::new(prec), |a, b| if b > a { b } else { a })
            >> (prec as i32 - 16);
        for r in 0..n {
            let i = m + 1 + r;
            let scale = (0..=n)
                .map(|j| Float::with_val(prec, self.entry(i, j).abs_ref()))
                .fold(Float::new(prec), |a, b| if b > a { b } else { a });
            for j in 0..=n {
                let v = if scale <= floor { Float::new(prec) } else { Float::with_val(prec, self.entry(i, j) / &scale) };
                block.set(r, j, v);
            }
        }
        let ns = mp::jacobi_null_vector(&block)?;
        let mut a = ns.vector;
        let norm = a.iter().fold(Float::new(prec), |s, x| s + Float::with_val(prec, x.square_ref())).sqrt();
        for x in a.iter_mut() {
            *x /= &norm;
        }
        let tiny = Float::with_val(prec, 1) >> (prec / 2);
        let lead = (0..=n).rev().find(|&k| Float::with_val(prec, a[k].abs_ref()) > tiny).unwrap_or(0);
        if a[lead].is_sign_negative() {
            for x in a.iter_mut() {
                *x = -x.clone();
            }
        }
        let degree_exact = lead == n;
        let b: Vec<Float> = (0..=m)
            .map(|i| {
                let mut s = Float::new(prec);
                for (j, aj) in a.iter().enumerate() {
                    s += self.entry(i, j) * aj;
                }
                s
            })
            .collect();
        let null_residual = ns.singular_values[0].clone();
        let smallest = ns.singular_values.get(1).cloned().unwrap_or_else(|| Float::new(prec));
        let non_unique = smallest <= Float::with_val(prec, &null_residual * 10u32);
        Ok(Approximant {
            index,
            q_coeffs: a,
            p_coeffs: b,
            smallest_singular_value: smallest,
            null_residual,
            precision_bits: prec,
            degree_exact,
            non_unique,
        })
    }
}

/// `(Q_{m,n}, P_{m,n})` in the `p_j` basis of `μ`.
#[derive(Clone, Debug)]
pub struct Approximant {
    pub index: FrobeniusIndex,
    /// `a_0..a_n`, unit Euclidean norm, leading monomial coefficient positive.
    pub q_coeffs: Vec<Float>,
    /// `b_0..b_m`.
    pub p_coeffs: Vec<Float>,
    /// Smallest singular value of the row-scaled denominator block.
    pub smallest_singular_value: Float,
    /// Norm of the block applied to the computed null vector.
    pub null_residual: Float,
    pub precision_bits: u32,
    pub degree_exact: bool,
    pub non_unique: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ApproximantJson {
    pub m: usize,
    pub n: usize,
    pub precision_bits: u32,
    pub q_coeffs: Vec<String>,
    pub p_coeffs: Vec<String>,
    pub smallest_singular_value: String,
    pub degree_exact: bool,
    pub non_unique_warning: bool,
}

impl Approximant {
    pub fn to_json(&self) -> ApproximantJson {
        ApproximantJson {
            m: self.index.m,
            n: self.index.n,
            precision_bits: self.precision_bits,
            q_coeffs: self.q_coeffs.iter().map(mp::to_decimal).collect(),
            p_coeffs: self.p_coeffs.iter().map(mp::to_decimal).collect(),
            smallest_singular_value: mp::to_decimal(&self.smallest_singular_value),
            degree_exact: self.degree_exact,
            non_unique_warning: self.non_unique,
        }
    }

    pub fn from_json(j: &ApproximantJson) -> Result<Self> {
        let prec = j.precision_bits;
        let parse = |v: &Vec<String>| v.iter().map(|s| mp::parse_float(prec, s)).collect::<Result<Vec<_>>>();
        Ok(Approximant {
            index: FrobeniusIndex::new(j.m, j.n)?,
            q_coeffs: parse(&j.q_coeffs)?,
            p_coeffs: parse(&j.p_coeffs)?,
            smallest_singular_value: mp::parse_float(prec, &j.smallest_singular_value)?,
            null_residual: Float::new(prec),
            precision_bits: prec,
            degree_exact: j.degree_exact,
            non_unique: j.non_unique_warning,
        })
    }

    /// Coefficient of `x^n` in `Q`.
    pub fn q_leading_monomial(&self, rec: &Recurrence) -> Float {
        let n = self.index.n;
        let prec = self.precision_bits;
        let mut lc = Float::with_val(prec, 1) / rec.beta_at(0).sqrt();
        for k in 1..=n {
            lc /= rec.sqrt_beta_at(k);
        }
        lc * &self.q_coeffs[n]
    }
}

fn combine(coeffs: &[Float], p: &[Cplx], prec: u32) -> Cplx {
    let mut acc = Cplx::zero(prec);
    for (c, v) in coeffs.iter().zip(p) {
        acc = acc.add(&v.scale(&Float::with_val(prec, c)));
    }
    acc
}

/// Values of `Q`, `P` and `R = Q f − P` at one point.
#[derive(Clone, Debug)]
pub struct FormValues {
    pub q: Cplx,
    pub p: Cplx,
    pub f: Cplx,
    pub r: Cplx,
    /// Bits lost to cancellation in `Q f − P`.
    pub cancellation_bits: f64,
}

impl FrobeniusProblem {
    /// `Q(z)` and `P(z)` at precision `prec`.
    pub fn eval_qp(&self, appr: &Approximant, z: &Cplx, prec: u32) -> Result<(Cplx, Cplx)> {
        let deg = appr.index.m.max(appr.index.n);
        let rec = self.recurrence(deg + 2)?;
        let rec = if prec != rec.prec() { orthoexp::recurrence_coeffs(&self.mu, deg + 2, prec)? } else { rec };
        let z = z.with_prec(prec);
        let pv = orthoexp::eval_poly(&rec, deg, &z);
        Ok((combine(&appr.q_coeffs, &pv, prec), combine(&appr.p_coeffs, &pv, prec)))
    }

    /// `Q f − P` evaluated directly at precision `prec`.
    pub fn eval_direct(&self, appr: &Approximant, z: &Cplx, prec: u32) -> Result<FormValues> {
        let (q, p) = self.eval_qp(appr, z, prec)?;
        let f = self.target.eval(&z.with_prec(prec))?;
        let qf = q.mul(&f);
        let r = qf.sub(&p);
        let big = qf.abs().to_f64().max(p.abs().to_f64());
        let small = r.abs().to_f64();
        let cancellation_bits = if small > 0.0 && big > 0.0 { (big / small).log2().max(0.0) } else if big > 0.0 { prec as f64 } else { 0.0 };
        Ok(FormValues { q, p, f, r, cancellation_bits })
    }

    /// `R_{m,n}(z) = Q σ̂(z) − P(z)` with cancellation control: when more than
    /// half of the working bits cancel, the value is recomputed from
    /// `R(z) = ∫ Q(s) √β_{N+1} (q_N(s) p_{N+1}(z) − p_N(z) q_{N+1}(s)) / (s − z) dσ(s)`,
    /// `N = m + n`, which involves no cancellation.
    pub fn eval_linear_form(&self, appr: &Approximant, z: &Cplx) -> Result<Cplx> {
        if let Target::Markov(s) = &self.target {
            if s.interval.contains_closed(z) {
                return Err(Error::Domain("R has a jump on the support of sigma".into()));
            }
        }
        let v = self.eval_direct(appr, z, self.prec)?;
        if v.cancellation_bits <= self.prec as f64 / 2.0 {
            return Ok(v.r);
        }
        match &self.target {
            Target::Markov(_) => self.linear_form_integral(appr, std::slice::from_ref(z)).map(|mut v| v.remove(0)),
            _ => Ok(v.r),
        }
    }

    /// Cancellation-free evaluation of `R` at several points.
    pub fn linear_form_integral(&self, appr: &Approximant, zs: &[Cplx]) -> Result<Vec<Cplx>> {
        let sigma = match &self.target {
            Target::Markov(s) => s,
            _ => return Err(Error::Config("integral form of R needs a Markov target".into())),
        };
        let prec = self.prec;
        let nn = appr.index.total();
        let rho = zs
            .iter()
            .map(|z| sigma.interval.ellipse_param(z.to_c64()))
            .chain([self.mu.interval.a64(), self.mu.interval.b64()].map(|e| sigma.interval.ellipse_param(num_complex::Complex64::new(e, 0.0))))
            .fold(f64::INFINITY, f64::min);
        let ns = appr.index.n + 2 + quadrature_margin(prec, rho);
        let rule = orthoexp::arcsine_quadrature(sigma, ns, prec);
        let rec = self.recurrence(nn + 2)?;
        let sqrt_b = rec.sqrt_beta_at(nn + 1);
        let data: Vec<(Float, Cplx, Cplx)> = rule
            .nodes
            .par_iter()
            .zip(&rule.weights)
            .map(|(s, w)| {
                let sc = Cplx::real(s.clone());
                let q = orthoexp::second_kind(&self.mu, &rec, nn + 1, &sc)?;
                let pv = orthoexp::eval_poly_real(&rec, appr.index.n, s);
                let mut qs = Float::new(prec);
                for (a, p) in appr.q_coeffs.iter().zip(&pv) {
                    qs += a * p;
                }
                let coef = Float::with_val(prec, &qs * w) * &sqrt_b;
                Ok((s.clone(), q[nn].scale(&coef), q[nn + 1].scale(&coef)))
            })
            .collect::<Result<_>>()?;
        zs.par_iter()
            .map(|z| {
                let pz = orthoexp::eval_poly(&rec, nn + 1, z);
                let mut sa = Cplx::zero(prec);
                let mut sb = Cplx::zero(prec);
                for (s, a, b) in &data {
                    let inv = Cplx::real(s.clone()).sub(z).recip();
                    sa = sa.add(&a.mul(&inv));
                    sb = sb.add(&b.mul(&inv));
                }
                Ok(pz[nn + 1].mul(&sa).sub(&pz[nn].mul(&sb)))
            })
            .collect()
    }

    /// `C_{m,n}(z) = ∫ R(x)/(x − z) dμ(x)` by Gauss-`μ` quadrature with `R`
    /// evaluated at doubled precision.
    ///
    /// A relative perturbation `ε` of the coefficients of `Q` and `P` moves
    /// `C` by about `ε`, so values below `2^{-prec}` carry no information.
    pub fn eval_c(&self, appr: &Approximant, z: &Cplx) -> Result<Cplx> {
        if self.mu.interval.contains_closed(z) {
            return Err(Error::Domain("C has a jump on the support of mu".into()));
        }
        if let Target::Markov(s) = &self.target {
            if s.interval.contains_closed(z) {
                return Err(Error::Domain("C is evaluated off both supports".into()));
            }
        }
        let (rule, rvals) = self.r_on_mu_nodes(appr, Some(z))?;
        let prec = self.prec;
        let mut acc = Cplx::zero(prec);
        for ((x, w), r) in rule.nodes.iter().zip(&rule.weights).zip(&rvals) {
            let d = Cplx::real(x.clone()).sub(z);
            acc = acc.add(&d.recip().scale(&Float::with_val(prec, w * r)));
        }
        Ok(acc)
    }

    fn r_rho(&self, z: Option<&Cplx>) -> f64 {
        let mut rho = match self.target.analyticity(&self.mu.interval) {
            Analyticity::Ellipse(r) => r,
            Analyticity::Polynomial(_) => f64::INFINITY,
        };
        if let Some(z) = z {
            rho = rho.min(self.mu.interval.ellipse_param(z.to_c64()));
        }
        rho
    }

    fn r_at_nodes(&self, appr: &Approximant, nodes: usize, hi: u32) -> Result<(GaussRule, Vec<Float>)> {
        let prec = self.prec;
        let rule = self.gauss_rule(nodes)?;
        let r: Vec<Float> = rule
            .nodes
            .par_iter()
            .map(|x| {
                let v = self.eval_direct(appr, &Cplx::real(Float::with_val(hi, x)), hi)?;
                Ok(Float::with_val(prec, &v.r.re))
            })
            .collect::<Result<_>>()?;
        Ok((rule, r))
    }

    /// Gauss-`μ` rule fine enough to integrate `R` against polynomials of
    /// degree `m + n` and `1/(x − z)`, with `R` at its nodes.
    pub fn r_on_mu_nodes(&self, appr: &Approximant, z: Option<&Cplx>) -> Result<(GaussRule, Vec<Float>)> {
        let rho = self.r_rho(z);
        let nodes = appr.index.total() + appr.index.m.max(appr.index.n) + 2 + if rho.is_finite() { quadrature_margin(self.prec, rho) } else { 0 };
        self.r_at_nodes(appr, nodes, 2 * self.prec)
    }

    /// Zeros of `Q` from its comrade matrix, each polished by Newton steps.
    pub fn zeros_of_q(&self, appr: &Approximant) -> Result<QZeros> {
        let prec = self.prec;
        let rec = self.recurrence(appr.index.n + 2)?;
        let a = &appr.q_coeffs;
        let norm = a.iter().fold(Float::new(prec), |s, x| s + Float::with_val(prec, x.square_ref())).sqrt();
        let tiny = Float::with_val(prec, &norm >> (prec / 2));
        let deg = (0..a.len()).rev().find(|&k| Float::with_val(prec, a[k].abs_ref()) > tiny).unwrap_or(0);
        let deficient = deg < appr.index.n;
        if deg == 0 {
            return Ok(QZeros { zeros: vec![], degree_deficient: deficient });
        }
        // x v = (J − (√β_deg / a_deg) e_{deg−1} a^T) v with v = (p_0..p_{deg−1})
        let mut c = Matrix::zeros(deg, deg, prec);
        for k in 0..deg {
            c.set(k, k, rec.alpha_at(k));
            if k + 1 < deg {
                let s = rec.sqrt_beta_at(k + 1);
                c.set(k, k + 1, s.clone());
                c.set(k + 1, k, s);
            }
        }
        let factor = rec.sqrt_beta_at(deg) / &a[deg];
        for j in 0..deg {
            let v = Float::with_val(prec, c.get(deg - 1, j) - Float::with_val(prec, &factor * &a[j]));
            c.set(deg - 1, j, v);
        }
        // transpose: upper Hessenberg with the same spectrum
        let mut h = Matrix::zeros(deg, deg, prec);
        for i in 0..deg {
            for j in 0..deg {
                h.set(i, j, c.get(j, i).clone());
            }
        }
        let raw = mp::hessenberg_eigenvalues(h)?;
        let zeros = raw
            .into_iter()
            .map(|z0| {
                let mut z = z0;
                for _ in 0..3 {
                    let (q, dq) = q_and_derivative(&rec, a, deg, &z);
                    if dq.abs().is_zero() {
                        break;
                    }
                    let step = q.div(&dq);
                    z = z.sub(&step);
                    if step.abs() <= Float::with_val(prec, &z.abs() >> (prec - 8)) {
                        break;
                    }
                }
                z
            })
            .collect::<Vec<_>>();
        let mut zeros = zeros;
        zeros.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap()));
        Ok(QZeros { zeros, degree_deficient: deficient })
    }
}

fn q_and_derivative(rec: &Recurrence, a: &[Float], deg: usize, z: &Cplx) -> (Cplx, Cplx) {
    let prec = rec.prec();
    let mut p_prev = Cplx::zero(prec);
    let mut p = Cplx::real(Float::with_val(prec, 1) / rec.beta_at(0).sqrt());
    let mut d_prev = Cplx::zero(prec);
    let mut d = Cplx::zero(prec);
    let mut q = p.scale(&a[0]);
    let mut dq = Cplx::zero(prec);
    for k in 0..deg {
        let sb = rec.sqrt_beta_at(k + 1);
        let sbk = rec.sqrt_beta_at(k);
        let zm = z.sub_real(&rec.alpha_at(k));
        let p_next = zm.mul(&p).sub(&p_prev.scale(&sbk)).div_real(&sb);
        let d_next = zm.mul(&d).add(&p).sub(&d_prev.scale(&sbk)).div_real(&sb);
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        q = q.add(&p.scale(&a[k + 1]));
        dq = dq.add(&d.scale(&a[k + 1]));
    }
    (q, dq)
}

/// Zeros of `Q_{m,n}`, fewer than `n` when the top coefficients vanish.
#[derive(Clone, Debug)]
pub struct QZeros {
    pub zeros: Vec<Cplx>,
    pub degree_deficient: bool,
}

/// Real zeros of `R_{m,n}` on `Δ_μ` found by bisection on a grid of
/// `16 (m+n)` cells; these are the zeros of `V_{m,n}`.
pub fn linear_form_zeros_on_mu(problem: &FrobeniusProblem, appr: &Approximant) -> Result<Vec<Float>> {
    let prec = problem.prec;
    let hi = 2 * prec;
    let cells = 16 * appr.index.total().max(1);
    let a = problem.mu.interval.a_f(prec);
    let b = problem.mu.interval.b_f(prec);
    let eval = |x: &Float| -> Result<Float> { Ok(Float::with_val(prec, &problem.eval_direct(appr, &Cplx::real(x.clone()), hi)?.r.re)) };
    let grid: Vec<Float> = (0..=cells)
        .map(|k| {
            // Chebyshev-spaced so the cells shrink toward the endpoints
            let t = std::f64::consts::PI * (cells - k) as f64 / cells as f64;
            let c = Float::with_val(prec, t).cos();
            let mid = Float::with_val(prec, &a + &b) / 2u32;
            let h = Float::with_val(prec, &b - &a) / 2u32;
            mid + h * c
        })
        .collect();
    let vals: Vec<Float> = grid.par_iter().map(eval).collect::<Result<_>>()?;
    let mut zeros = Vec::new();
    for k in 0..cells {
        if vals[k].is_zero() {
            zeros.push(grid[k].clone());
            continue;
        }
        if (vals[k].is_sign_negative()) != (vals[k + 1].is_sign_negative()) && !vals[k + 1].is_zero() {
            let (mut lo, mut hi_x) = (grid[k].clone(), grid[k + 1].clone());
            let mut flo = vals[k].clone();
            for _ in 0..(prec / 2).min(200) {
                let mid = Float::with_val(prec, &lo + &hi_x) / 2u32;
                let fm = eval(&mid)?;
                if fm.is_sign_negative() == flo.is_sign_negative() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi_x = mid;
                }
            }
            zeros.push(Float::with_val(prec, &lo + &hi_x) / 2u32);
        }
    }
    Ok(zeros)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arcsine(a: f64, b: f64) -> MeasureSpec {
        MeasureSpec::arcsine(Interval::from_f64(a, b).unwrap())
    }

    #[test]
    fn index_validation() {
        assert!(FrobeniusIndex::new(0, 1).is_ok());
        assert!(FrobeniusIndex::new(1, 3).is_err());
        assert!(FrobeniusIndex::new(3, 0).is_err());
        assert_eq!(FrobeniusIndex::new(2, 2).unwrap().total(), 4);
    }

    #[test]
    fn unit_target_gives_identity_block() {
        let pb = FrobeniusProblem::new(arcsine(-1.0, 1.0), Target::Polynomial(vec![Rational::from(1)]), 128).unwrap();
        let m = pb.build_frobenius_matrix(FrobeniusIndex::new(3, 3).unwrap()).unwrap();
        for i in 0..=3 {
            for j in 0..=3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((m.get(i, j).to_f64() - e).abs() < 1e-30);
            }
        }
    }

    #[test]
    fn overlapping_supports_rejected() {
        assert!(matches!(FrobeniusProblem::markov(arcsine(-1.0, 1.0), arcsine(0.5, 2.0), 64), Err(Error::Domain(_))));
    }
}
