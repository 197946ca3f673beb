//! Command-line front end: configuration, dispatch and run directories.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64 as C64;
use rug::Rational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::approximant::{self, FrobeniusIndex, FrobeniusProblem, Target};
use crate::curve::{self, CurveEval};
use crate::equilibrium;
use crate::error::{Error, Result};
use crate::harness::{self, Expect, RayRun, RaySpec, TestPoint, ZeroReference};
use crate::mp;
use crate::orthoexp::{Interval, MeasureSpec, WeightDesc};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_PRECISION: u32 = 256;

fn default_weight() -> WeightDesc {
    WeightDesc::Named("one".into())
}

fn is_default_weight(w: &WeightDesc) -> bool {
    *w == default_weight()
}

/// A measure `ρ dx / (π √((x − a)(b − x)))` on `[a, b]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDesc {
    pub a: String,
    pub b: String,
    #[serde(default = "default_weight", skip_serializing_if = "is_default_weight")]
    pub weight: WeightDesc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<String>,
}

impl MeasureDesc {
    pub fn new(a: &str, b: &str) -> Self {
        MeasureDesc { a: a.into(), b: b.into(), weight: default_weight(), mass: None }
    }

    pub fn interval(&self, field: &str) -> Result<Interval> {
        Interval::parse(&self.a, &self.b).map_err(|e| at_field(field, e))
    }

    pub fn to_spec(&self, field: &str) -> Result<MeasureSpec> {
        let weight = self.weight.to_weight().map_err(|e| at_field(&format!("{field}.weight"), e))?;
        let mass = self.mass.as_deref().map(mp::parse_rational).transpose().map_err(|e| at_field(&format!("{field}.mass"), e))?;
        MeasureSpec::new(self.interval(field)?, weight, mass).map_err(|e| at_field(field, e))
    }
}

/// Target other than the Markov function of `sigma`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum TargetDesc {
    Pole(String),
    Polynomial(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexBlock {
    pub m: usize,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDesc {
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expect>,
}

fn zero_string() -> String {
    "0".into()
}

impl PointDesc {
    fn to_c64(&self, field: &str) -> Result<C64> {
        let re = parse_f64(&self.re, &format!("{field}.re"))?;
        let im = parse_f64(&self.im, &format!("{field}.im"))?;
        Ok(C64::new(re, im))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayBlock {
    pub c: String,
    pub n: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointDesc>,
    /// Relative slope tolerance of the rate experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
    /// Half-width of the neighbourhood of `Δ_{σ,c}` for zero counting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighborhood: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub szego_points: Vec<PointDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<PointDesc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveBlock {
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainsBlock {
    pub re: [String; 2],
    pub im: [String; 2],
    pub nx: usize,
    pub ny: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryBlock {
    pub step: String,
    pub max_points: usize,
}

/// Everything a run needs, read from one TOML file. Numbers that carry
/// precision are decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    pub mu: MeasureDesc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<MeasureDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<IndexBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<RayBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domains: Option<DomainsBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectoryBlock>,
}

fn at_field(field: &str, e: Error) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!("field `{field}`: {m}")),
        Error::Domain(m) => Error::Config(format!("field `{field}`: {m}")),
        other => other,
    }
}

fn parse_f64(s: &str, field: &str) -> Result<f64> {
    mp::parse_rational(s).map(|q| q.to_f64()).map_err(|e| at_field(field, e))
}

fn parse_c(s: &str, field: &str) -> Result<Rational> {
    let c = mp::parse_rational(s).map_err(|e| at_field(field, e))?;
    if c <= 0 || c > Rational::from((1, 2)) {
        return Err(Error::Config(format!("field `{field}`: c must lie in (0, 1/2], got {s}")));
    }
    Ok(c)
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Interior overlap of the supports and `c` out of range are rejected;
    /// touching supports are allowed for the curve commands.
    pub fn validate(&self) -> Result<()> {
        let mu = self.mu.interval("mu")?;
        if let Some(s) = &self.sigma {
            let sigma = s.interval("sigma")?;
            if mu.a < sigma.b && sigma.a < mu.b {
                return Err(Error::Config(format!(
                    "field `sigma`: interval [{}, {}] overlaps mu = [{}, {}]",
                    s.a, s.b, self.mu.a, self.mu.b
                )));
            }
        }
        if let Some(r) = &self.ray {
            parse_c(&r.c, "ray.c")?;
            if r.n.is_empty() {
                return Err(Error::Config("field `ray.n`: at least one degree is required".into()));
            }
        }
        if let Some(c) = &self.curve {
            parse_c(&c.c, "curve.c")?;
        }
        if let Some(p) = self.precision_bits {
            if p < 53 {
                return Err(Error::Config(format!("field `precision_bits`: at least 53 bits required, got {p}")));
            }
        }
        Ok(())
    }

    pub fn precision(&self) -> u32 {
        self.precision_bits.unwrap_or(DEFAULT_PRECISION)
    }

    fn sigma_desc(&self) -> Result<&MeasureDesc> {
        self.sigma.as_ref().ok_or_else(|| Error::Config("missing section `sigma`".into()))
    }

    pub fn problem(&self) -> Result<FrobeniusProblem> {
        let mu = self.mu.to_spec("mu")?;
        let target = match &self.target {
            Some(TargetDesc::Pole(t)) => Target::SimplePole(mp::parse_rational(t).map_err(|e| at_field("target.pole", e))?),
            Some(TargetDesc::Polynomial(c)) => {
                Target::Polynomial(c.iter().map(|s| mp::parse_rational(s)).collect::<Result<_>>().map_err(|e| at_field("target.polynomial", e))?)
            }
            None => Target::Markov(self.sigma_desc()?.to_spec("sigma")?),
        };
        FrobeniusProblem::new(mu, target, self.precision()).map_err(|e| at_field("sigma", e))
    }

    pub fn intervals(&self) -> Result<(Interval, Interval)> {
        Ok((self.mu.interval("mu")?, self.sigma_desc()?.interval("sigma")?))
    }

    /// `c` of the `curve` block, else of the `ray` block.
    pub fn curve_c(&self) -> Result<Rational> {
        match (&self.curve, &self.ray) {
            (Some(c), _) => parse_c(&c.c, "curve.c"),
            (None, Some(r)) => parse_c(&r.c, "ray.c"),
            _ => Err(Error::Config("missing section `curve` (or `ray`) giving c".into())),
        }
    }

    pub fn ray_spec(&self) -> Result<RaySpec> {
        let r = self.ray.as_ref().ok_or_else(|| Error::Config("missing section `ray`".into()))?;
        let c = parse_c(&r.c, "ray.c")?;
        let points = r
            .points
            .iter()
            .enumerate()
            .map(|(k, p)| Ok(TestPoint { z: p.to_c64(&format!("ray.points[{k}]"))?, expect: p.expect }))
            .collect::<Result<Vec<_>>>()?;
        let spec = if c == Rational::from((1, 2)) {
            RaySpec::diagonal(r.n.iter().copied())
        } else {
            RaySpec::with_ratio(&c, r.n.iter().copied())
        };
        Ok(spec.map_err(|e| at_field("ray.n", e))?.with_points(points))
    }

    /// SHA-256 of the resolved configuration and the command it runs.
    pub fn hash(&self, command: &str) -> String {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update([0u8]);
        h.update(self.to_toml().as_bytes());
        hex::encode(h.finalize())
    }
}

#[derive(Parser, Debug)]
#[command(name = "frobpade", version, about = "Frobenius-Pade approximants to Markov functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Working precision in bits, overriding the configuration.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Parent directory of run directories.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Experiment suite for `verify`: rate, zeros, szego or all.
    #[arg(long, global = true)]
    pub suite: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Approximant JSON for the configured index.
    Approximate,
    /// Spectral curve JSON.
    Curve,
    /// Classifier raster and equilibrium densities as CSV.
    Domains,
    /// Traced boundary of the convergence domain as CSV.
    Trajectory,
    /// Zeros of Q and of R on the support of mu as CSV.
    Zeros,
    /// Harness experiments with a JSON summary.
    Verify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Approximate => "approximate",
            Command::Curve => "curve",
            Command::Domains => "domains",
            Command::Trajectory => "trajectory",
            Command::Zeros => "zeros",
            Command::Verify => "verify",
        }
    }
}

/// Files produced by one command, by name.
pub type Outputs = BTreeMap<String, String>;

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    crate_version: &'a str,
    command: &'a str,
    suite: Option<&'a str>,
    config_hash: &'a str,
    precision_bits: u32,
    status: &'a str,
    files: Vec<&'a str>,
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

/// Writes `files` with a manifest and the resolved configuration into
/// `parent/<hash>`, staging in a sibling directory and renaming at the end.
pub fn write_run_dir(parent: &Path, cfg: &RunConfig, command: &str, suite: Option<&str>, status: &str, files: &Outputs) -> Result<PathBuf> {
    let key = match suite {
        Some(s) => format!("{command}:{s}"),
        None => command.to_string(),
    };
    let hash = cfg.hash(&key);
    fs::create_dir_all(parent)?;
    let dest = parent.join(&hash[..16]);
    let stage = parent.join(format!(".{}.partial-{}", &hash[..16], std::process::id()));
    if stage.exists() {
        fs::remove_dir_all(&stage)?;
    }
    let result = (|| -> Result<()> {
        fs::create_dir_all(&stage)?;
        let mut names: Vec<&str> = files.keys().map(|s| s.as_str()).collect();
        names.push("config.toml");
        names.sort_unstable();
        for (name, contents) in files {
            fs::write(stage.join(name), contents)?;
        }
        fs::write(stage.join("config.toml"), cfg.to_toml())?;
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            crate_version: env!("CARGO_PKG_VERSION"),
            command,
            suite,
            config_hash: &hash,
            precision_bits: cfg.precision(),
            status,
            files: names,
        };
        fs::write(stage.join("manifest.json"), json(&manifest))?;
        if dest.exists() {
            fs::remove_dir_all(&dest)?;
        }
        fs::rename(&stage, &dest)?;
        Ok(())
    })();
    if let Err(e) = result {
        let _ = fs::remove_dir_all(&stage);
        return Err(e);
    }
    Ok(dest)
}

#[derive(Serialize)]
struct ErrorReport {
    kind: &'static str,
    message: String,
    exit_code: i32,
}

/// Outcome of a command: its files and whether its checks passed.
pub struct Run {
    pub outputs: Outputs,
    pub pass: bool,
}

impl Run {
    fn ok(outputs: Outputs) -> Self {
        Run { outputs, pass: true }
    }
}

pub fn approximate(cfg: &RunConfig) -> Result<Run> {
    let ix = cfg.index.as_ref().ok_or_else(|| Error::Config("missing section `index`".into()))?;
    let index = FrobeniusIndex::new(ix.m, ix.n).map_err(|e| at_field("index", e))?;
    let appr = cfg.problem()?.solve(index)?;
    Ok(Run::ok(Outputs::from([("approximant.json".into(), json(&appr.to_json()))])))
}

pub fn curve(cfg: &RunConfig) -> Result<Run> {
    let (mu, sigma) = cfg.intervals()?;
    let c = curve::solve_curve(&mu, &sigma, &cfg.curve_c()?, cfg.precision())?;
    Ok(Run::ok(Outputs::from([("curve.json".into(), json(&c.to_json()))])))
}

pub fn domains(cfg: &RunConfig) -> Result<Run> {
    let (mu, sigma) = cfg.intervals()?;
    let (_, eq) = equilibrium::equilibrium_for(&mu, &sigma, &cfg.curve_c()?, cfg.precision())?;
    let d = cfg.domains.as_ref().ok_or_else(|| Error::Config("missing section `domains`".into()))?;
    let re = (parse_f64(&d.re[0], "domains.re")?, parse_f64(&d.re[1], "domains.re")?);
    let im = (parse_f64(&d.im[0], "domains.im")?, parse_f64(&d.im[1], "domains.im")?);
    let rows = equilibrium::domain_raster(&eq, re, im, d.nx, d.ny);
    Ok(Run::ok(Outputs::from([("domains.csv".into(), equilibrium::raster_csv(&rows)), ("densities.csv".into(), eq.densities_csv(256))])))
}

#[derive(Serialize)]
struct TraceSummary {
    b_sigma_c: String,
    upper_points: usize,
    upper_end: curve::TraceEnd,
    lower_points: usize,
    lower_end: curve::TraceEnd,
}

pub fn trajectory(cfg: &RunConfig) -> Result<Run> {
    let (mu, sigma) = cfg.intervals()?;
    let c = curve::solve_curve(&mu, &sigma, &cfg.curve_c()?, cfg.precision())?;
    let t = cfg.trajectory.as_ref().ok_or_else(|| Error::Config("missing section `trajectory`".into()))?;
    let step = parse_f64(&t.step, "trajectory.step")?;
    let eval = CurveEval::new(&c);
    let upper = curve::trace_divergence_boundary(&eval, step, t.max_points, true)?;
    let lower = curve::trace_divergence_boundary(&eval, step, t.max_points, false)?;
    let summary = TraceSummary {
        b_sigma_c: mp::to_decimal(&c.endpoints.b_sigma_c),
        upper_points: upper.points.len(),
        upper_end: upper.end,
        lower_points: lower.points.len(),
        lower_end: lower.end,
    };
    Ok(Run::ok(Outputs::from([
        ("trajectory.csv".into(), upper.to_csv()),
        ("trajectory_lower.csv".into(), lower.to_csv()),
        ("trajectory.json".into(), json(&summary)),
    ])))
}

pub fn zeros(cfg: &RunConfig) -> Result<Run> {
    let ix = cfg.index.as_ref().ok_or_else(|| Error::Config("missing section `index`".into()))?;
    let index = FrobeniusIndex::new(ix.m, ix.n).map_err(|e| at_field("index", e))?;
    let problem = cfg.problem()?;
    let appr = problem.solve(index)?;
    let qz = problem.zeros_of_q(&appr)?;
    let mut s = String::from("kind,re,im\n");
    for z in &qz.zeros {
        let z = z.to_c64();
        s.push_str(&format!("q,{},{}\n", mp::to_sig(z.re, 20), mp::to_sig(z.im, 20)));
    }
    for x in approximant::linear_form_zeros_on_mu(&problem, &appr)? {
        s.push_str(&format!("r,{},0\n", mp::to_sig(x.to_f64(), 20)));
    }
    Ok(Run::ok(Outputs::from([("zeros.csv".into(), s)])))
}

#[derive(Serialize)]
struct VerifySummary {
    suite: String,
    pass: bool,
    certificates: Vec<harness::Certificate>,
    rate: Option<harness::RateReport>,
    zeros: Option<ZeroSummary>,
    szego: Option<SzegoSummary>,
}

#[derive(Serialize)]
struct ZeroSummary {
    support: (f64, f64),
    neighborhood: f64,
    rows: Vec<harness::ZeroRow>,
}

#[derive(Serialize)]
struct SzegoSummary {
    anchor: C64,
    degenerate_exact: bool,
    product_spread: Vec<harness::ProductSpread>,
    max_ratio_change: Vec<(usize, Option<f64>)>,
}

pub fn verify(cfg: &RunConfig, suite: &str) -> Result<Run> {
    let suites: &[&str] = match suite {
        "rate" => &["rate"],
        "zeros" => &["zeros"],
        "szego" => &["szego"],
        "all" => &["rate", "zeros", "szego"],
        other => return Err(Error::Config(format!("unknown suite `{other}` (expected rate, zeros, szego or all)"))),
    };
    let (mu, sigma) = cfg.intervals()?;
    let ray = cfg.ray_spec()?;
    let r = cfg.ray.as_ref().expect("ray_spec checked the section");
    let (_, eq) = equilibrium::equilibrium_for(&mu, &sigma, &ray.c_target, cfg.precision())?;
    let run = RayRun::solve(cfg.problem()?, ray)?;
    let mut outputs = Outputs::new();
    let mut summary = VerifySummary { suite: suite.into(), pass: true, certificates: run.certificates.clone(), rate: None, zeros: None, szego: None };
    if suites.contains(&"rate") {
        let tol = r.tolerance.as_deref().map(|s| parse_f64(s, "ray.tolerance")).transpose()?.unwrap_or(0.02);
        let rep = harness::convergence_rate_experiment(&run, &eq, tol)?;
        outputs.insert("rate.csv".into(), rep.to_csv());
        summary.pass &= rep.pass;
        summary.rate = Some(rep);
    }
    if suites.contains(&"zeros") {
        let nb = r.neighborhood.as_deref().map(|s| parse_f64(s, "ray.neighborhood")).transpose()?.unwrap_or(0.05);
        let rep = harness::zero_distribution_experiment(&run, &ZeroReference::from_equilibrium(&eq), nb)?;
        outputs.insert("zeros.csv".into(), rep.to_csv());
        outputs.insert("zero_locations.csv".into(), rep.zeros_csv());
        summary.zeros = Some(ZeroSummary { support: rep.support, neighborhood: nb, rows: rep.rows });
    }
    if suites.contains(&"szego") {
        let pts = r
            .szego_points
            .iter()
            .enumerate()
            .map(|(k, p)| p.to_c64(&format!("ray.szego_points[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        let anchor = r.anchor.as_ref().map(|p| p.to_c64("ray.anchor")).transpose()?;
        let rep = harness::szego_stabilization_experiment(&run, &eq, &pts, anchor)?;
        outputs.insert("szego.csv".into(), rep.to_csv());
        let ns: Vec<usize> = run.approximants.iter().map(|a| a.index.n).collect();
        summary.pass &= !rep.degenerate_exact;
        summary.szego = Some(SzegoSummary {
            anchor: rep.anchor,
            degenerate_exact: rep.degenerate_exact,
            max_ratio_change: ns.iter().map(|&n| (n, rep.max_ratio_change(n))).collect(),
            product_spread: rep.product_spread,
        });
    }
    let pass = summary.pass;
    outputs.insert("summary.json".into(), json(&summary));
    Ok(Run { outputs, pass })
}

/// Parses `argv`, runs the command and returns the process exit status:
/// 0 on success, 1 on configuration errors, 2 on numerical failures and
/// failed verification.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be positive");
            return 1;
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut cfg = match cli.config.as_deref().map(RunConfig::load) {
        Some(Ok(c)) => c,
        Some(Err(e)) => {
            eprintln!("error: {e}");
            return 1;
        }
        None => {
            eprintln!("error: --config PATH is required");
            return 1;
        }
    };
    if let Some(p) = cli.precision {
        cfg.precision_bits = Some(p);
        if let Err(e) = cfg.validate() {
            eprintln!("error: {e}");
            return 1;
        }
    }
    let parent = cli.out.clone().or_else(|| cfg.output_dir.clone().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("runs"));
    let suite = match cli.command {
        Command::Verify => Some(cli.suite.clone().unwrap_or_else(|| "all".into())),
        _ => None,
    };
    let result = match cli.command {
        Command::Approximate => approximate(&cfg),
        Command::Curve => curve(&cfg),
        Command::Domains => domains(&cfg),
        Command::Trajectory => trajectory(&cfg),
        Command::Zeros => zeros(&cfg),
        Command::Verify => verify(&cfg, suite.as_deref().unwrap_or("all")),
    };
    let name = cli.command.name();
    match result {
        Ok(r) => {
            let status = if r.pass { "ok" } else { "failed-checks" };
            match write_run_dir(&parent, &cfg, name, suite.as_deref(), status, &r.outputs) {
                Ok(dir) => {
                    println!("{}", dir.display());
                    if r.pass {
                        0
                    } else {
                        eprintln!("verification checks failed; see {}", dir.join("summary.json").display());
                        2
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            let code = e.exit_code();
            eprintln!("error: {e}");
            if code == 2 {
                let report = ErrorReport { kind: e.kind(), message: e.to_string(), exit_code: code };
                let files = Outputs::from([("error.json".into(), json(&report))]);
                if let Ok(dir) = write_run_dir(&parent, &cfg, name, suite.as_deref(), "error", &files) {
                    eprintln!("error report written to {}", dir.display());
                }
            }
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOUCHING: &str = r#"
precision_bits = 128

[mu]
a = "-1"
b = "0"

[sigma]
a = "0"
b = "3"

[curve]
c = "1/3"
"#;

    #[test]
    fn config_round_trip() {
        let cfg = RunConfig::from_toml(TOUCHING).unwrap();
        let again = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.hash("curve"), again.hash("curve"));
        assert_ne!(cfg.hash("curve"), cfg.hash("domains"));
    }

    #[test]
    fn overlap_and_c_rejected() {
        let bad = TOUCHING.replace("a = \"0\"\nb = \"3\"", "a = \"-1/2\"\nb = \"3\"");
        let e = RunConfig::from_toml(&bad).unwrap_err();
        assert!(e.to_string().contains("sigma"));
        assert_eq!(e.exit_code(), 1);
        let e = RunConfig::from_toml(&TOUCHING.replace("1/3", "3/5")).unwrap_err();
        assert!(e.to_string().contains("curve.c"));
    }

    #[test]
    fn unknown_field_rejected() {
        let e = RunConfig::from_toml(&format!("{TOUCHING}\nbogus = 1\n")).unwrap_err();
        assert!(e.to_string().contains("bogus"));
    }
}
