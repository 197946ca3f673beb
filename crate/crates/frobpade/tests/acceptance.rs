//! Acceptance run: one line per criterion, with the measured quantity, the
//! pinned tolerance and the wall time against its budget. Any failure
//! exits with status 1.

use std::time::{Duration, Instant};

use frobpade::approximant::{FrobeniusIndex, FrobeniusProblem};
use frobpade::curve::{self, CurveEval};
use frobpade::equilibrium::{self, equilibrium_oracle, Domain, EquilibriumData};
use frobpade::harness::{self, Expect, RayRun, RaySpec, TestPoint, ZeroReference};
use frobpade::orthoexp::{Interval, MeasureSpec};
use frobpade::Result;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rug::float::Constant;
use rug::{Float, Rational};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn iv(a: &str, b: &str) -> Interval {
    Interval::parse(a, b).unwrap()
}

fn arcsine_pair(mu: &Interval, sigma: &Interval, prec: u32) -> Result<FrobeniusProblem> {
    FrobeniusProblem::markov(MeasureSpec::arcsine(mu.clone()), MeasureSpec::arcsine(sigma.clone()), prec)
}

fn c1_closed_form_endpoint() -> Result<Outcome> {
    let k = curve::solve_curve(&iv("-1", "0"), &iv("0", "3"), &Rational::from((1, 3)), 128)?;
    let err = (k.b_sigma_c64() - 2.43).abs();
    outcome(err < 1e-10, format!("b_sigma_c = {:.15}, |b - 2.43| = {err:.1e} < 1e-10", k.b_sigma_c64()))
}

fn c2_perfect_square() -> Result<Outcome> {
    let configs = [
        (("-1", "1"), ("2", "3"), (1, 5)),
        (("-1", "1"), ("2", "3"), (7, 20)),
        (("-1", "1"), ("2", "3"), (1, 2)),
        (("0", "1"), ("-3", "-1"), (1, 5)),
        (("0", "2"), ("-2", "-1/2"), (1, 2)),
    ];
    let mut worst = 0.0f64;
    for (mu, sigma, c) in configs {
        let k = curve::solve_curve(&iv(mu.0, mu.1), &iv(sigma.0, sigma.1), &Rational::from(c), 256)?;
        let r = k.square_residual.to_f64();
        worst = worst.max(r);
    }
    outcome(worst < 1e-20, format!("5 configurations, largest square residual {worst:.1e} < 1e-20"))
}

fn c3_curve_vs_oracle() -> Result<Outcome> {
    let (mu, sigma) = (iv("-1", "1"), iv("2", "3"));
    let (mut sup, mut mass_err, mut resid) = (0.0f64, 0.0f64, 0.0f64);
    for c in [(1, 5), (7, 20), (1, 2)] {
        let c = Rational::from(c);
        let (_, eq) = equilibrium::equilibrium_for(&mu, &sigma, &c, 192)?;
        let oracle = equilibrium_oracle(&mu, &sigma, c.to_f64(), 64)?;
        for (a, b) in [(&eq.tau_mu, &oracle.tau_mu), (&eq.tau_sigma, &oracle.tau_sigma)] {
            let (lo, hi) = a.support();
            for k in 0..=200 {
                let x = lo + (hi - lo) * k as f64 / 200.0;
                sup = sup.max((a.regularized(x) - b.regularized(x)).abs());
            }
        }
        for d in [&eq, &oracle] {
            mass_err = mass_err.max((d.tau_mu.mass() - 1.0).abs()).max((d.tau_sigma.mass() - c.to_f64()).abs());
            let (rs, rm) = equilibrium::residuals(d, 64);
            resid = resid.max(rs).max(rm);
        }
    }
    outcome(
        sup < 1e-3 && mass_err < 1e-8 && resid < 1e-6,
        format!("c in {{1/5, 7/20, 1/2}}: density sup {sup:.1e} < 1e-3, mass error {mass_err:.1e} < 1e-8, residual {resid:.1e} < 1e-6"),
    )
}

/// Moments `∫ x^i R dμ` on an independent Gauss-Chebyshev rule, with
/// `σ̂(x) = 1/√((2 − x)(3 − x))` and `p_k = √2 T_k` in closed form.
struct OrthogonalityOracle {
    prec: u32,
    sigma_hat: Vec<Float>,
    basis: Vec<Vec<Float>>,
    powers: Vec<Vec<Float>>,
}

impl OrthogonalityOracle {
    fn new(nodes: usize, degree: usize, prec: u32) -> Self {
        let pi = Float::with_val(prec, Constant::Pi);
        let sqrt2 = Float::with_val(prec, 2).sqrt();
        let thetas: Vec<Float> = (0..nodes).map(|j| Float::with_val(prec, &pi * (2 * j + 1) as u32) / (2 * nodes) as u32).collect();
        let xs: Vec<Float> = thetas.iter().map(|t| Float::with_val(prec, t.cos_ref())).collect();
        let sigma_hat = xs
            .iter()
            .map(|x| {
                let d = Float::with_val(prec, 2 - x.clone()) * Float::with_val(prec, 3 - x.clone());
                d.sqrt().recip()
            })
            .collect();
        let basis = thetas
            .iter()
            .map(|t| {
                (0..=degree)
                    .map(|k| if k == 0 { Float::with_val(prec, 1) } else { Float::with_val(prec, t * k as u32).cos() * &sqrt2 })
                    .collect()
            })
            .collect();
        let powers = xs
            .iter()
            .map(|x| {
                let mut acc = Float::with_val(prec, 1);
                (0..=degree)
                    .map(|_| {
                        let v = acc.clone();
                        acc *= x;
                        v
                    })
                    .collect()
            })
            .collect();
        OrthogonalityOracle { prec, sigma_hat, basis, powers }
    }

    /// Largest `|∫ x^i R dμ|`, `i ≤ m + n`, divided by `‖R‖_{L²(μ)}`.
    fn relative_moment(&self, q: &[Float], p: &[Float], total: usize) -> f64 {
        let prec = self.prec;
        let combine = |c: &[Float], row: &[Float]| c.iter().zip(row).fold(Float::new(prec), |acc, (a, b)| acc + Float::with_val(prec, a * b));
        let r: Vec<Float> = self
            .basis
            .iter()
            .zip(&self.sigma_hat)
            .map(|(row, s)| combine(q, row) * s - combine(p, row))
            .collect();
        let nodes = r.len() as u32;
        let norm = (r.iter().fold(Float::new(prec), |acc, v| acc + Float::with_val(prec, v.square_ref())) / nodes).sqrt();
        let worst = (0..=total)
            .map(|i| {
                let s = r.iter().zip(&self.powers).fold(Float::new(prec), |acc, (v, xp)| acc + Float::with_val(prec, v * &xp[i]));
                Float::with_val(prec, s / nodes).abs()
            })
            .fold(Float::new(prec), |a, b| if b > a { b } else { a });
        (worst / norm).to_f64()
    }
}

fn c4_orthogonality() -> Result<Outcome> {
    let problem = arcsine_pair(&iv("-1", "1"), &iv("2", "3"), 512)?;
    let indices: Vec<FrobeniusIndex> = (1..=40)
        .flat_map(|total: usize| (1..=total).filter(move |&n| n <= total - n + 1).map(move |n| (total - n, n)))
        .map(|(m, n)| FrobeniusIndex::new(m, n))
        .collect::<Result<_>>()?;
    let table = problem.table(40, 20)?;
    let oracle = OrthogonalityOracle::new(250, 40, 1024);
    let worst = indices
        .par_iter()
        .map(|&ix| {
            let a = table.solve(ix)?;
            let up = |v: &[Float]| v.iter().map(|x| Float::with_val(1024, x)).collect::<Vec<_>>();
            Ok((oracle.relative_moment(&up(&a.q_coeffs), &up(&a.p_coeffs), ix.total()), ix))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((0.0f64, indices[0]), |a, b| if b.0 > a.0 { b } else { a });
    outcome(
        worst.0 < 1e-40,
        format!("{} indices with m+n <= 40, largest relative moment {:.1e} at ({}, {}) < 1e-40", indices.len(), worst.0, worst.1.m, worst.1.n),
    )
}

fn c5_rate_at_origin() -> Result<Outcome> {
    let (mu, sigma) = (iv("-1", "1"), iv("2", "3"));
    let (_, eq) = equilibrium::equilibrium_for(&mu, &sigma, &Rational::from((1, 2)), 192)?;
    let ray = RaySpec::diagonal(30..=60)?.with_points(vec![TestPoint::new(0.0, 0.0).expecting(Expect::Converge)]);
    let run = RayRun::solve(arcsine_pair(&mu, &sigma, 1024)?, ray)?;
    let report = harness::convergence_rate_experiment(&run, &eq, 0.02)?;
    let p = &report.points[0];
    let dev = p.max_deviation.unwrap_or(f64::INFINITY);
    outcome(
        report.pass,
        format!(
            "predicted {:.6}, mean slope {:.6}, largest deviation of -ln|error|/(n+m+1) {:.2}% < 2%",
            p.predicted,
            p.mean_slope.unwrap_or(f64::NAN),
            100.0 * dev
        ),
    )
}

/// The c = 1/3 configuration with the supports pulled apart by 1/100.
fn separated() -> Result<(Interval, Interval, Rational, EquilibriumData)> {
    let (mu, sigma, c) = (iv("-1", "-1/100"), iv("0", "3"), Rational::from((1, 3)));
    let (_, eq) = equilibrium::equilibrium_for(&mu, &sigma, &c, 192)?;
    Ok((mu, sigma, c, eq))
}

fn c6_divergence_dichotomy() -> Result<Outcome> {
    let (mu, sigma, c, eq) = separated()?;
    let points = vec![TestPoint::new(2.8, 0.0).expecting(Expect::Diverge), TestPoint::new(2.0, 0.5).expecting(Expect::Converge)];
    let run = RayRun::solve(arcsine_pair(&mu, &sigma, 512)?, RaySpec::with_ratio(&c, 10..=30)?.with_points(points))?;
    let report = harness::convergence_rate_experiment(&run, &eq, 0.05)?;
    let minus = eq.classify(C64::new(2.8, 0.0)) == Domain::DivergenceMinus;
    let plus = eq.classify(C64::new(2.0, 0.5)) == Domain::ConvergencePlus;
    let dual = report.points.iter().any(|p| p.dual_labeled);
    let behaves = report.points.iter().all(|p| p.converging == p.expect.map(|e| e == Expect::Converge));
    let slopes: Vec<String> = report.points.iter().map(|p| format!("{:.4} at {}", p.mean_slope.unwrap_or(f64::NAN), p.point)).collect();
    outcome(
        minus && plus && !dual && behaves,
        format!("2.8 {}, 2+0.5i {}, mean slopes [{}], dual labels {dual}", eq.classify(C64::new(2.8, 0.0)).label(), eq.classify(C64::new(2.0, 0.5)).label(), slopes.join(", ")),
    )
}

fn c7_zero_localization() -> Result<Outcome> {
    let (mu, sigma, c, eq) = separated()?;
    let run = RayRun::solve(arcsine_pair(&mu, &sigma, 512)?, RaySpec::with_ratio(&c, [40])?)?;
    let report = harness::zero_distribution_experiment(&run, &ZeroReference::from_equilibrium(&eq), 0.05)?;
    let row = report.row(40).expect("n = 40 solved");
    outcome(
        row.ks_distance < 0.06 && row.outside <= 1,
        format!("(m, n) = ({}, 40): Kolmogorov distance {:.4} < 0.06, {} zeros outside the 0.05-neighborhood (<= 1)", row.m, row.ks_distance, row.outside),
    )
}

fn c8_normalization_shadows() -> Result<Outcome> {
    let (mu, sigma) = (iv("-1", "1"), iv("2", "3"));
    let (_, eq) = equilibrium::equilibrium_for(&mu, &sigma, &Rational::from((1, 2)), 192)?;
    // golden-ratio sequence over [-5, 6] x [-4, 4]
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut sheet_sum = 0.0f64;
    for k in 1..=50 {
        let z = C64::new(-5.0 + 11.0 * (k as f64 * g).fract(), -4.0 + 8.0 * (k as f64 * g * g).fract());
        let s: f64 = (0..3).map(|sheet| eq.log_phi_modulus(z, sheet, 39, 40)).sum::<Result<f64>>()?;
        sheet_sum = sheet_sum.max(s.abs());
    }
    // C at n = 40 is near 2^-600, below the roundoff floor of 512-bit coefficients
    let run = RayRun::solve(arcsine_pair(&mu, &sigma, 1024)?, RaySpec::diagonal(39..=41)?)?;
    let points = [C64::new(-2.0, 1.0), C64::new(0.0, 2.0), C64::new(4.0, 0.5), C64::new(1.5, 1.0), C64::new(-3.0, -0.5)];
    let report = harness::szego_stabilization_experiment(&run, &eq, &points, None)?;
    let variation = report.product_variation(40).unwrap_or(f64::INFINITY);
    let change = report.max_ratio_change(40).unwrap_or(f64::INFINITY);
    outcome(
        sheet_sum < 1e-10 && variation < 0.1 && change < 0.05,
        format!("sheet sum {sheet_sum:.1e} < 1e-10, product variation {variation:.1e} < 0.1, ratio change {change:.1e} < 0.05"),
    )
}

fn c9_trajectory() -> Result<Outcome> {
    let (k, eq) = equilibrium::equilibrium_for(&iv("-1", "0"), &iv("0", "3"), &Rational::from((1, 3)), 128)?;
    let eval = CurveEval::new(&k);
    let upper = curve::trace_divergence_boundary(&eval, 1e-3, 100_000, true)?;
    let lower = curve::trace_divergence_boundary(&eval, 1e-3, 100_000, false)?;
    let worst = upper.points.iter().step_by(10).map(|p| eq.classifier(p.z).abs()).fold(0.0, f64::max);
    let asym = upper
        .points
        .iter()
        .zip(&lower.points)
        .map(|(u, l)| (u.z - l.z.conj()).norm())
        .fold(0.0, f64::max);
    let same_len = upper.points.len() == lower.points.len();
    outcome(
        worst < 1e-3 && asym < 1e-10 && same_len,
        format!("{} points, largest |G| on every 10th {worst:.1e} < 1e-3, conjugation mismatch {asym:.1e} < 1e-10", upper.points.len()),
    )
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Result<Outcome>); 9] = [
        (1, "closed-form endpoint", Duration::from_secs(1), c1_closed_form_endpoint),
        (2, "perfect-square certificate", Duration::from_secs(30), c2_perfect_square),
        (3, "curve vs iterative oracle", Duration::from_secs(120), c3_curve_vs_oracle),
        (4, "defining orthogonality", Duration::from_secs(300), c4_orthogonality),
        (5, "rate reproduction at z = 0", Duration::from_secs(600), c5_rate_at_origin),
        (6, "divergence dichotomy", Duration::from_secs(300), c6_divergence_dichotomy),
        (7, "zero localization", Duration::from_secs(180), c7_zero_localization),
        (8, "normalization shadows", Duration::from_secs(600), c8_normalization_shadows),
        (9, "trajectory validity", Duration::from_secs(60), c9_trajectory),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "criterion {id} {name}: {} | {detail} | {:.2}s of {}s",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
