//! Experiments confronting computed approximants with the potential-theoretic
//! predictions: error rates along ray sequences, zero distribution of `Q`,
//! and stabilization of normalized ratios.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::approximant::{Approximant, FrobeniusIndex, FrobeniusProblem, Target, TargetFunction};
use crate::equilibrium::{Domain, EquilibriumData};
use crate::error::{Error, Result};
use crate::mp::{self, Cplx};
use crate::orthoexp;

/// Expected behaviour of the approximants at a test point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Converge,
    Diverge,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestPoint {
    pub z: C64,
    pub expect: Option<Expect>,
}

impl TestPoint {
    pub fn new(re: f64, im: f64) -> Self {
        TestPoint { z: C64::new(re, im), expect: None }
    }

    pub fn expecting(mut self, e: Expect) -> Self {
        self.expect = Some(e);
        self
    }
}

/// A ray sequence of indices with `n/(n+m+1) → c`.
#[derive(Clone, Debug, PartialEq)]
pub struct RaySpec {
    pub c_target: Rational,
    pub indices: Vec<FrobeniusIndex>,
    pub test_points: Vec<TestPoint>,
}

impl RaySpec {
    /// Checks `c ∈ (0, 1/2]` and that every ratio lies within `1/(n+m+1)`
    /// of `c`, so the sequence tends to `c`.
    pub fn new(c_target: Rational, indices: Vec<FrobeniusIndex>, test_points: Vec<TestPoint>) -> Result<Self> {
        if c_target <= 0 || c_target > Rational::from((1, 2)) {
            return Err(Error::Config(format!("ray parameter c must lie in (0, 1/2], got {c_target}")));
        }
        if indices.is_empty() {
            return Err(Error::Config("a ray needs at least one index".into()));
        }
        for ix in &indices {
            let ratio = Rational::from((ix.n as u64, ix.total() as u64 + 1));
            let dev = Rational::from(&ratio - &c_target).abs();
            if dev > Rational::from((1, ix.total() as u64 + 1)) {
                return Err(Error::Config(format!(
                    "index (m, n) = ({}, {}) has ratio {} too far from c = {}",
                    ix.m, ix.n, ratio, c_target
                )));
            }
        }
        Ok(RaySpec { c_target, indices, test_points })
    }

    /// `(n − 1, n)` for each `n`; `c = 1/2`.
    pub fn diagonal<I: IntoIterator<Item = usize>>(ns: I) -> Result<Self> {
        let indices = ns.into_iter().map(|n| FrobeniusIndex::new(n.saturating_sub(1), n)).collect::<Result<_>>()?;
        RaySpec::new(Rational::from((1, 2)), indices, vec![])
    }

    /// `m = round(n/c) − n − 1` for each `n`.
    pub fn with_ratio<I: IntoIterator<Item = usize>>(c: &Rational, ns: I) -> Result<Self> {
        if *c <= 0 {
            return Err(Error::Config(format!("ray parameter c must be positive, got {c}")));
        }
        let indices = ns
            .into_iter()
            .map(|n| {
                let total = Rational::from(n as u64) / c.clone();
                let total = total.round().numer().to_usize().unwrap_or(0);
                FrobeniusIndex::new(total.saturating_sub(n + 1), n)
            })
            .collect::<Result<_>>()?;
        RaySpec::new(c.clone(), indices, vec![])
    }

    pub fn with_points(mut self, points: Vec<TestPoint>) -> Self {
        self.test_points = points;
        self
    }

    pub fn c64(&self) -> f64 {
        self.c_target.to_f64()
    }
}

/// An index left out of aggregation because its conditioning certificate
/// leaves too few digits of headroom.
#[derive(Clone, Debug, Serialize)]
pub struct Excluded {
    pub m: usize,
    pub n: usize,
    pub smallest_singular_value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub m: usize,
    pub n: usize,
    pub smallest_singular_value: String,
    pub degree_exact: bool,
    pub non_unique: bool,
}

/// Approximants of a ray, solved from one shared table.
pub struct RayRun {
    pub problem: FrobeniusProblem,
    pub ray: RaySpec,
    pub approximants: Vec<Approximant>,
    pub certificates: Vec<Certificate>,
    pub excluded: Vec<Excluded>,
}

impl RayRun {
    pub fn solve(problem: FrobeniusProblem, ray: RaySpec) -> Result<Self> {
        let all = problem.solve_many(&ray.indices)?;
        let digits = mp::decimal_digits(problem.prec) as i32;
        let floor = Float::with_val(problem.prec, Float::u_pow_u(10, (digits - 16).max(0) as u32)).recip();
        let mut approximants = Vec::new();
        let mut certificates = Vec::new();
        let mut excluded = Vec::new();
        for a in all {
            certificates.push(Certificate {
                m: a.index.m,
                n: a.index.n,
                smallest_singular_value: mp::to_decimal(&a.smallest_singular_value),
                degree_exact: a.degree_exact,
                non_unique: a.non_unique,
            });
            if a.smallest_singular_value < floor {
                excluded.push(Excluded { m: a.index.m, n: a.index.n, smallest_singular_value: a.smallest_singular_value.to_f64() });
            } else {
                approximants.push(a);
            }
        }
        Ok(RayRun { problem, ray, approximants, certificates, excluded })
    }
}

/// Reference value of the target at `z`, the boundary value from above on
/// the open support of `σ`.
fn reference_value(problem: &FrobeniusProblem, z: C64, prec: u32) -> Result<Cplx> {
    if let Target::Markov(s) = &problem.target {
        let zc = Cplx::from_c64(prec, z);
        if z.im == 0.0 && s.interval.contains_closed(&zc) {
            return orthoexp::cauchy_boundary_value(s, &Float::with_val(prec, z.re), prec);
        }
    }
    problem.target.eval(&Cplx::from_c64(prec, z))
}

#[derive(Clone, Debug, Serialize)]
pub struct RateRow {
    pub m: usize,
    pub n: usize,
    pub point: C64,
    /// `ln|f(z) − P/Q(z)|`, absent when skipped.
    pub log_error: Option<f64>,
    /// `−ln|error| / (n+m+1)`.
    pub slope: Option<f64>,
    pub predicted: f64,
    pub deviation: Option<f64>,
    pub notice: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointSummary {
    pub point: C64,
    pub predicted: f64,
    pub class: String,
    pub expect: Option<Expect>,
    /// `−Δ ln|error| / Δ(n+m+1)` between the first and last kept index.
    pub mean_slope: Option<f64>,
    pub max_deviation: Option<f64>,
    pub converging: Option<bool>,
    pub dual_labeled: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RateReport {
    pub tolerance: f64,
    pub rows: Vec<RateRow>,
    pub points: Vec<PointSummary>,
    pub degenerate_exact: bool,
    pub excluded: Vec<Excluded>,
    pub pass: bool,
}

impl RateReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,n,re_z,im_z,log_error,slope,predicted,deviation,notice\n");
        let opt = |v: Option<f64>| v.map(|x| mp::to_sig(x, 20)).unwrap_or_default();
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.m,
                r.n,
                mp::to_sig(r.point.re, 20),
                mp::to_sig(r.point.im, 20),
                opt(r.log_error),
                opt(r.slope),
                mp::to_sig(r.predicted, 20),
                opt(r.deviation),
                r.notice.clone().unwrap_or_default()
            ));
        }
        s
    }
}

/// Local error slopes `−ln|f − P/Q| / (n+m+1)` along the ray at every test
/// point, compared with `V^{τ_μ}(z) − 2V^{τ_σ}(z) + 3ℓ_σ`. A point passes
/// when every local slope is within `tolerance` (relative) of the
/// prediction and the ray-wide slope has the sign its label demands.
pub fn convergence_rate_experiment(run: &RayRun, eq: &EquilibriumData, tolerance: f64) -> Result<RateReport> {
    let problem = &run.problem;
    let hi = 2 * problem.prec;
    let floor_bits = problem.prec as f64 - 8.0;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut any_error = false;
    let mut all_exact = true;
    for tp in &run.ray.test_points {
        let z = tp.z;
        let f = reference_value(problem, z, hi)?;
        let predicted = eq.classifier(z);
        let errs: Vec<(Option<f64>, Option<String>)> = run
            .approximants
            .par_iter()
            .map(|a| {
                let (q, p) = problem.eval_qp(a, &Cplx::from_c64(hi, z), hi)?;
                if q.abs().is_zero() {
                    return Ok((None, Some("Q vanishes at the test point".to_string())));
                }
                let e = f.sub(&p.div(&q)).abs();
                let scale = f.abs().to_f64().max(f64::MIN_POSITIVE);
                if e.is_zero() || (e.to_f64() / scale).log2() < -floor_bits {
                    return Ok((None, Some("error below working precision".to_string())));
                }
                Ok((Some(e.ln().to_f64()), None))
            })
            .collect::<Result<_>>()?;
        let mut prev: Option<(usize, f64)> = None;
        let mut first: Option<(usize, f64)> = None;
        let mut max_dev: Option<f64> = None;
        for (a, (log_error, notice)) in run.approximants.iter().zip(errs) {
            let total = a.index.total() + 1;
            let mut slope = None;
            if let Some(le) = log_error {
                any_error = true;
                all_exact = false;
                slope = Some(-le / total as f64);
                prev = Some((total, le));
                first.get_or_insert((total, le));
            }
            let deviation = slope.map(|s| (s - predicted).abs() / predicted.abs());
            if let Some(d) = deviation {
                max_dev = Some(max_dev.map_or(d, |m: f64| m.max(d)));
            }
            rows.push(RateRow { m: a.index.m, n: a.index.n, point: z, log_error, slope, predicted, deviation, notice });
        }
        let mean_slope = match (first, prev) {
            (Some((t0, l0)), Some((t1, l1))) if t1 > t0 => Some(-(l1 - l0) / (t1 - t0) as f64),
            _ => None,
        };
        let class = eq.classify(z);
        let converging = mean_slope.map(|s| s > 0.0);
        let dual_labeled = matches!((converging, class), (Some(true), Domain::DivergenceMinus) | (Some(false), Domain::ConvergencePlus));
        let expected_ok = match (tp.expect, converging) {
            (Some(Expect::Converge), Some(c)) => c,
            (Some(Expect::Diverge), Some(c)) => !c,
            _ => true,
        };
        let pass = !dual_labeled && expected_ok && max_dev.is_some_and(|d| d <= tolerance);
        points.push(PointSummary {
            point: z,
            predicted,
            class: class.label().to_string(),
            expect: tp.expect,
            mean_slope,
            max_deviation: max_dev,
            converging,
            dual_labeled,
            pass,
        });
    }
    let degenerate_exact = !any_error && all_exact && !run.approximants.is_empty();
    let pass = !degenerate_exact && !points.is_empty() && points.iter().all(|p| p.pass);
    Ok(RateReport { tolerance, rows, points, degenerate_exact, excluded: run.excluded.clone(), pass })
}

/// The limiting zero distribution to compare against.
pub struct ZeroReference {
    cdf: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    cdf_left: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    atom: Option<f64>,
    pub support: (f64, f64),
}

impl ZeroReference {
    /// `τ_{σ,c}/c` with support `Δ_{σ,c}`.
    pub fn from_equilibrium(eq: &EquilibriumData) -> Self {
        let d = eq.tau_sigma.clone();
        let mass = d.mass();
        let support = d.support();
        let f = move |x| d.cdf(x) / mass;
        let g = f.clone();
        ZeroReference { cdf: Box::new(f), cdf_left: Box::new(g), atom: None, support }
    }

    /// A unit point mass at `t0`; zeros within `1e-12` of it are moved onto it.
    pub fn point_mass(t0: f64) -> Self {
        ZeroReference {
            cdf: Box::new(move |x| if x >= t0 { 1.0 } else { 0.0 }),
            cdf_left: Box::new(move |x| if x > t0 { 1.0 } else { 0.0 }),
            atom: Some(t0),
            support: (t0, t0),
        }
    }

    fn snap(&self, x: f64) -> f64 {
        match self.atom {
            Some(t0) if (x - t0).abs() <= 1e-12 * t0.abs().max(1.0) => t0,
            _ => x,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        (self.cdf)(x)
    }

    /// `lim_{y↑x} F(y)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        (self.cdf_left)(x)
    }

    /// Distance from `z` to the support segment.
    pub fn distance(&self, z: C64) -> f64 {
        let x = z.re.clamp(self.support.0, self.support.1);
        (z - x).norm()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroRow {
    pub m: usize,
    pub n: usize,
    pub ks_distance: f64,
    pub outside: usize,
    pub outside_fraction: f64,
    pub degree_deficient: bool,
    #[serde(skip)]
    pub zeros: Vec<C64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroReport {
    pub neighborhood: f64,
    pub support: (f64, f64),
    pub rows: Vec<ZeroRow>,
    pub excluded: Vec<Excluded>,
}

impl ZeroReport {
    pub fn row(&self, n: usize) -> Option<&ZeroRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,n,ks_distance,outside,outside_fraction\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{},{}\n", r.m, r.n, mp::to_sig(r.ks_distance, 20), r.outside, mp::to_sig(r.outside_fraction, 20)));
        }
        s
    }

    pub fn zeros_csv(&self) -> String {
        let mut s = String::from("m,n,re,im\n");
        for r in &self.rows {
            for z in &r.zeros {
                s.push_str(&format!("{},{},{},{}\n", r.m, r.n, mp::to_sig(z.re, 20), mp::to_sig(z.im, 20)));
            }
        }
        s
    }
}

/// Kolmogorov distance between the empirical CDF of `xs` and a continuous
/// `cdf`.
pub fn kolmogorov_distance<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> f64 {
    kolmogorov_with_limits(xs, &cdf, &cdf)
}

fn kolmogorov_with_limits(xs: &[f64], cdf: &dyn Fn(f64) -> f64, cdf_left: &dyn Fn(f64) -> f64) -> f64 {
    let mut xs = xs.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (k, &x)| {
        d.max(((k as f64 + 1.0) / n - cdf(x)).abs()).max((k as f64 / n - cdf_left(x)).abs())
    })
}

/// Zero-counting CDFs of `Q_{m,n}` (real parts, normalized by `n`) against
/// the reference distribution, with the count of zeros farther than
/// `neighborhood` from its support.
pub fn zero_distribution_experiment(run: &RayRun, reference: &ZeroReference, neighborhood: f64) -> Result<ZeroReport> {
    let rows = run
        .approximants
        .par_iter()
        .map(|a| {
            let qz = run.problem.zeros_of_q(a)?;
            let zeros: Vec<C64> = qz.zeros.iter().map(|z| z.to_c64()).collect();
            let n = a.index.n;
            let re: Vec<f64> = zeros.iter().map(|z| reference.snap(z.re)).collect();
            let ks = if n == 0 || zeros.is_empty() { 0.0 } else { kolmogorov_with_limits(&re, &|x| reference.cdf(x), &|x| reference.cdf_left(x)) };
            let outside = zeros.iter().filter(|z| reference.distance(**z) > neighborhood).count();
            Ok(ZeroRow {
                m: a.index.m,
                n,
                ks_distance: ks,
                outside,
                outside_fraction: if n == 0 { 0.0 } else { outside as f64 / n as f64 },
                degree_deficient: qz.degree_deficient,
                zeros,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ZeroReport { neighborhood, support: reference.support, rows, excluded: run.excluded.clone() })
}

#[derive(Clone, Debug, Serialize)]
pub struct SzegoRow {
    pub m: usize,
    pub n: usize,
    pub point: C64,
    /// `ln r_n(z) − ln r_n(anchor)`.
    pub log_ratio: f64,
    /// `|r_{n'}(z)/r_n(z) − 1|` against the next index of the ray.
    pub ratio_change: Option<f64>,
    /// `ln π_n(z) − ln π_n(anchor)`, absent on the supports and when
    /// unresolved.
    pub log_product: Option<f64>,
    /// `C` at `z` or at the anchor is below the coefficient roundoff floor.
    pub product_unresolved: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductSpread {
    pub m: usize,
    pub n: usize,
    /// `max π_n / min π_n − 1` over the points off the supports, absent
    /// when one of the products is unresolved.
    pub variation: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SzegoReport {
    pub anchor: C64,
    pub rows: Vec<SzegoRow>,
    pub product_spread: Vec<ProductSpread>,
    pub degenerate_exact: bool,
    pub excluded: Vec<Excluded>,
}

impl SzegoReport {
    /// Largest `|r_{n+1}/r_n − 1|` over the points at degree `n`.
    pub fn max_ratio_change(&self, n: usize) -> Option<f64> {
        self.rows.iter().filter(|r| r.n == n).filter_map(|r| r.ratio_change).reduce(f64::max)
    }

    pub fn product_variation(&self, n: usize) -> Option<f64> {
        self.product_spread.iter().find(|p| p.n == n).and_then(|p| p.variation)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,n,re_z,im_z,log_ratio,ratio_change,log_product,product_unresolved\n");
        let opt = |v: Option<f64>| v.map(|x| mp::to_sig(x, 20)).unwrap_or_default();
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.m,
                r.n,
                mp::to_sig(r.point.re, 20),
                mp::to_sig(r.point.im, 20),
                mp::to_sig(r.log_ratio, 20),
                opt(r.ratio_change),
                opt(r.log_product),
                r.product_unresolved
            ));
        }
        s
    }
}

/// Real point midway between `Δ_μ` and `Δ_σ`.
pub fn default_anchor(problem: &FrobeniusProblem) -> Result<C64> {
    let s = problem.target.sigma().ok_or_else(|| Error::Config("the anchor needs a Markov target".into()))?;
    let (m, s) = (&problem.mu.interval, &s.interval);
    let mid = if m.b64() <= s.a64() { 0.5 * (m.b64() + s.a64()) } else { 0.5 * (s.b64() + m.a64()) };
    Ok(C64::new(mid, 0.0))
}

fn log_abs_w(z: C64, (a, b): (f64, f64)) -> f64 {
    0.5 * ((z - a).norm().ln() + (z - b).norm().ln())
}

struct Logs {
    ratio: f64,
    product: Option<f64>,
    r_relative: Option<f64>,
    unresolved: bool,
}

fn szego_logs(problem: &FrobeniusProblem, eq: &EquilibriumData, a: &Approximant, z: C64) -> Result<Logs> {
    let prec = problem.prec;
    let zc = Cplx::from_c64(prec, z);
    let (q, _) = problem.eval_qp(a, &zc, prec)?;
    let lq = q.ln_abs().to_f64();
    let ratio = lq - eq.log_phi_modulus(z, 0, a.index.m + 1, a.index.n)?;
    let on_mu = problem.mu.interval.contains_closed(&zc);
    let on_sigma = problem.target.sigma().is_some_and(|s| s.interval.contains_closed(&zc));
    if on_mu || on_sigma {
        return Ok(Logs { ratio, product: None, r_relative: None, unresolved: false });
    }
    let r = problem.eval_linear_form(a, &zc)?;
    let qf = problem.eval_direct(a, &zc, prec)?;
    let r_relative = Some(r.abs().to_f64() / qf.q.mul(&qf.f).abs().to_f64().max(f64::MIN_POSITIVE));
    let c = problem.eval_c(a, &zc)?;
    if c.abs() <= Float::with_val(prec, mp::epsilon(prec) << 16) {
        return Ok(Logs { ratio, product: None, r_relative, unresolved: true });
    }
    let w_mu = log_abs_w(z, (problem.mu.interval.a64(), problem.mu.interval.b64()));
    let w_sigma = log_abs_w(z, eq.tau_sigma.support());
    let product = lq + w_sigma + r.ln_abs().to_f64() + c.ln_abs().to_f64() + w_mu;
    Ok(Logs { ratio, product: Some(product), r_relative, unresolved: false })
}

/// Normalized ratios `r_n(z)/r_n(anchor)` with their Cauchy differences
/// along the ray, and products `π_n(z)/π_n(anchor)` at points off the
/// supports.
pub fn szego_stabilization_experiment(run: &RayRun, eq: &EquilibriumData, points: &[C64], anchor: Option<C64>) -> Result<SzegoReport> {
    let problem = &run.problem;
    let anchor = match anchor {
        Some(a) => a,
        None => default_anchor(problem)?,
    };
    if eq.classify(anchor) == Domain::DivergenceMinus {
        return Err(Error::Domain(format!("anchor {anchor} lies in the divergence domain")));
    }
    let floor = (2.0f64).powi(-(problem.prec as i32 - 8));
    let per_index: Vec<(Logs, Vec<Logs>)> = run
        .approximants
        .par_iter()
        .map(|a| {
            let base = szego_logs(problem, eq, a, anchor)?;
            let at = points.iter().map(|&z| szego_logs(problem, eq, a, z)).collect::<Result<Vec<_>>>()?;
            Ok((base, at))
        })
        .collect::<Result<_>>()?;
    let degenerate_exact = per_index.iter().any(|(b, _)| b.r_relative.is_some_and(|r| r < floor) || b.product.is_some_and(|p| !p.is_finite()));
    let mut rows = Vec::new();
    let mut product_spread = Vec::new();
    for (k, (a, (base, at))) in run.approximants.iter().zip(&per_index).enumerate() {
        let next = per_index.get(k + 1);
        let mut logs_pi = vec![0.0];
        let mut unresolved_here = base.unresolved;
        for (j, (&z, l)) in points.iter().zip(at).enumerate() {
            let log_ratio = l.ratio - base.ratio;
            let ratio_change = next.map(|(nb, nat)| ((nat[j].ratio - nb.ratio) - log_ratio).exp_m1().abs());
            let log_product = match (l.product, base.product) {
                (Some(p), Some(b)) => Some(p - b),
                _ => None,
            };
            if let Some(p) = log_product {
                logs_pi.push(p);
            }
            let product_unresolved = l.unresolved || (base.unresolved && l.r_relative.is_some());
            unresolved_here |= l.unresolved;
            rows.push(SzegoRow { m: a.index.m, n: a.index.n, point: z, log_ratio, ratio_change, log_product, product_unresolved });
        }
        let hi = logs_pi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = logs_pi.iter().copied().fold(f64::INFINITY, f64::min);
        let variation = (!unresolved_here).then(|| (hi - lo).exp_m1());
        product_spread.push(ProductSpread { m: a.index.m, n: a.index.n, variation });
    }
    Ok(SzegoReport { anchor, rows, product_spread, degenerate_exact, excluded: run.excluded.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_ratio_rays() {
        let d = RaySpec::diagonal([3, 4]).unwrap();
        assert_eq!((d.indices[0].m, d.indices[0].n), (2, 3));
        let r = RaySpec::with_ratio(&Rational::from((1, 3)), [40]).unwrap();
        assert_eq!((r.indices[0].m, r.indices[0].n), (79, 40));
        assert!(RaySpec::with_ratio(&Rational::from((2, 3)), [4]).is_err());
    }

    #[test]
    fn far_ratio_rejected() {
        let ix = vec![FrobeniusIndex::new(30, 2).unwrap()];
        assert!(RaySpec::new(Rational::from((1, 2)), ix, vec![]).is_err());
    }

    #[test]
    fn kolmogorov_uniform_sample() {
        let xs: Vec<f64> = (0..10).map(|k| (k as f64 + 0.5) / 10.0).collect();
        let d = kolmogorov_distance(&xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.05).abs() < 1e-15);
    }
}
