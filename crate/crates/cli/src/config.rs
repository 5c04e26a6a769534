//! Job configuration: command-line flags over an optional JSON file, then
//! per-command defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use quasitoda::toda::TodaType;
use quasitoda::Rational;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Parser)]
#[command(
    name = "quasitoda",
    version,
    about = "Seeded exact certificates for noncommutative Toda and KdV constructions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the Toda system of type A, B or C and check it.
    TodaSolve(Flags),
    /// Rank of Toda kernels.
    TodaRank(Flags),
    /// Toda solutions with `psi = 1` in flow form.
    TodaFlow(Flags),
    /// Closed-form solution of the length-two type C system.
    Liouville(Flags),
    /// Monic polynomial with prescribed roots.
    Vieta(Flags),
    /// Operator with a prescribed kernel and its factorization.
    Factorize(Flags),
    /// Pseudodifferential calculus, KP and KdV flows.
    KpCheck(Flags),
    /// KdV multisolitons by dressing.
    KdvSoliton(Flags),
    /// Scalar multisolitons against the determinant formula.
    TauCheck(Flags),
    /// Scalar 1-soliton series against the sech-squared profile.
    SechCheck(Flags),
}

impl Command {
    pub fn split(self) -> (Job, Flags) {
        match self {
            Command::TodaSolve(f) => (Job::TodaSolve, f),
            Command::TodaRank(f) => (Job::TodaRank, f),
            Command::TodaFlow(f) => (Job::TodaFlow, f),
            Command::Liouville(f) => (Job::Liouville, f),
            Command::Vieta(f) => (Job::Vieta, f),
            Command::Factorize(f) => (Job::Factorize, f),
            Command::KpCheck(f) => (Job::KpCheck, f),
            Command::KdvSoliton(f) => (Job::KdvSoliton, f),
            Command::TauCheck(f) => (Job::TauCheck, f),
            Command::SechCheck(f) => (Job::SechCheck, f),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Job {
    TodaSolve,
    TodaRank,
    TodaFlow,
    Liouville,
    Vieta,
    Factorize,
    KpCheck,
    KdvSoliton,
    TauCheck,
    SechCheck,
}

impl Job {
    pub fn name(self) -> &'static str {
        match self {
            Job::TodaSolve => "toda-solve",
            Job::TodaRank => "toda-rank",
            Job::TodaFlow => "toda-flow",
            Job::Liouville => "liouville",
            Job::Vieta => "vieta",
            Job::Factorize => "factorize",
            Job::KpCheck => "kp-check",
            Job::KdvSoliton => "kdv-soliton",
            Job::TauCheck => "tau-check",
            Job::SechCheck => "sech-check",
        }
    }
}

/// Flags shared by every command; unset flags fall back to the config file.
#[derive(Clone, Debug, Default, Args)]
pub struct Flags {
    /// JSON file with any of the fields below (snake_case); flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Matrix size of the coefficient algebra.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Truncation orders, `a,b` or a single `a` for both.
    #[arg(long)]
    pub orders: Option<String>,
    /// Number of consecutive seeds to run.
    #[arg(long)]
    pub instances: Option<usize>,
    /// Toda system type: A, B or C.
    #[arg(long = "type")]
    pub kind: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of free components for types B and C.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub solitons: Option<usize>,
    /// Degree of the polynomial initial data.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Depth of fractional powers in kp-check.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Lowest pseudodifferential order kept.
    #[arg(long, allow_hyphen_values = true)]
    pub floor: Option<i64>,
    /// Rational literal, e.g. `1` or `3/2`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Rational literal, e.g. `1` or `3/2`.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Nodes per axis of the sample grid.
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Write the JSON report here (it is always printed).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write a series dump of the solution here.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// Write grid samples of the solution here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Integers or strings in the JSON file.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Text {
    Int(i64),
    Str(String),
}

impl Text {
    fn into_string(self) -> String {
        match self {
            Text::Int(i) => i.to_string(),
            Text::Str(s) => s,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum OrdersField {
    Pair([usize; 2]),
    One(usize),
    Str(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<String>,
    seed: Option<u64>,
    dim: Option<usize>,
    orders: Option<OrdersField>,
    instances: Option<usize>,
    #[serde(rename = "type")]
    kind: Option<String>,
    n: Option<usize>,
    k: Option<usize>,
    solitons: Option<usize>,
    degree: Option<usize>,
    depth: Option<usize>,
    floor: Option<i64>,
    alpha: Option<Text>,
    a: Option<Text>,
    radius: Option<f64>,
    grid_points: Option<usize>,
    tolerance: Option<f64>,
    report: Option<PathBuf>,
    dump: Option<PathBuf>,
    csv: Option<PathBuf>,
}

/// A fully resolved job.
#[derive(Clone, Debug, PartialEq)]
pub struct JobConfig {
    pub job: Job,
    pub seed: u64,
    pub instances: usize,
    pub dim: usize,
    pub orders: (usize, usize),
    pub kind: TodaType,
    pub n: usize,
    pub k: usize,
    pub solitons: usize,
    pub degree: usize,
    pub depth: usize,
    pub floor: i64,
    pub alpha: Rational,
    pub a: Rational,
    pub radius: f64,
    pub grid_points: usize,
    pub tolerance: f64,
    pub report: Option<PathBuf>,
    pub dump: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

pub fn parse_orders(s: &str) -> Result<(usize, usize), ConfigError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<usize>().map_err(|_| invalid(format!("bad orders `{s}`")));
    match parts.as_slice() {
        [a] => {
            let a = num(a)?;
            Ok((a, a))
        }
        [a, b] => Ok((num(a)?, num(b)?)),
        _ => Err(invalid(format!("bad orders `{s}`: expected `a,b`"))),
    }
}

fn parse_kind(s: &str) -> Result<TodaType, ConfigError> {
    match s {
        "A" | "a" => Ok(TodaType::A),
        "B" | "b" => Ok(TodaType::B),
        "C" | "c" => Ok(TodaType::C),
        _ => Err(invalid(format!("unknown Toda type `{s}` (expected A, B or C)"))),
    }
}

fn parse_rational(name: &str, s: &str) -> Result<Rational, ConfigError> {
    s.trim().parse::<Rational>().map_err(|_| invalid(format!("--{name}: `{s}` is not a rational literal")))
}

fn read_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| ConfigError::Json { path: path.into(), source })
}

impl JobConfig {
    /// Merge flags over the config file (if any) and fill in the defaults of
    /// `job`.
    pub fn resolve(job: Job, flags: Flags) -> Result<Self, ConfigError> {
        let file = match &flags.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        if let Some(c) = &file.command {
            if c != job.name() {
                return Err(invalid(format!("config is for `{c}`, not `{}`", job.name())));
            }
        }
        let orders = match (flags.orders, file.orders) {
            (Some(s), _) => Some(parse_orders(&s)?),
            (None, Some(OrdersField::Pair([a, b]))) => Some((a, b)),
            (None, Some(OrdersField::One(a))) => Some((a, a)),
            (None, Some(OrdersField::Str(s))) => Some(parse_orders(&s)?),
            (None, None) => None,
        };
        let kind = match flags.kind.or(file.kind) {
            Some(s) => parse_kind(&s)?,
            None => TodaType::A,
        };
        let scalar_job = matches!(job, Job::TauCheck | Job::SechCheck);
        let dim = flags.dim.or(file.dim).unwrap_or(if scalar_job { 1 } else { 2 });
        let default_orders = match job {
            Job::Factorize => (8, 8),
            Job::Vieta => (6, 6),
            Job::KpCheck => (8, 8),
            Job::KdvSoliton | Job::TauCheck => (8, 4),
            Job::SechCheck => (16, 16),
            Job::TodaSolve | Job::TodaRank | Job::TodaFlow | Job::Liouville => (6, 6),
        };
        let alpha = flags.alpha.or(file.alpha.map(Text::into_string)).unwrap_or_else(|| "1".into());
        let a = flags.a.or(file.a.map(Text::into_string)).unwrap_or_else(|| "1".into());
        let cfg = JobConfig {
            job,
            seed: flags.seed.or(file.seed).unwrap_or(0),
            instances: flags.instances.or(file.instances).unwrap_or(1),
            dim,
            orders: orders.unwrap_or(default_orders),
            kind,
            n: flags.n.or(file.n).unwrap_or(3),
            k: flags.k.or(file.k).unwrap_or(if kind == TodaType::C { 2 } else { 1 }),
            solitons: flags.solitons.or(file.solitons).unwrap_or(2),
            degree: flags.degree.or(file.degree).unwrap_or(3),
            depth: flags.depth.or(file.depth).unwrap_or(4),
            floor: flags.floor.or(file.floor).unwrap_or(-5),
            alpha: parse_rational("alpha", &alpha)?,
            a: parse_rational("a", &a)?,
            radius: flags.radius.or(file.radius).unwrap_or(0.5),
            grid_points: flags.grid_points.or(file.grid_points).unwrap_or(11),
            tolerance: flags.tolerance.or(file.tolerance).unwrap_or(1e-9),
            report: flags.report.or(file.report),
            dump: flags.dump.or(file.dump),
            csv: flags.csv.or(file.csv),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.dim == 0 {
            return Err(invalid("--dim must be at least 1"));
        }
        if self.instances == 0 {
            return Err(invalid("--instances must be at least 1"));
        }
        if matches!(self.job, Job::TauCheck | Job::SechCheck) && self.dim != 1 {
            return Err(invalid(format!("{} is a scalar check: --dim must be 1", self.job.name())));
        }
        let positive =
            |v: usize, name: &str| if v == 0 { Err(invalid(format!("--{name} must be at least 1"))) } else { Ok(()) };
        match self.job {
            Job::TodaSolve if self.kind == TodaType::A => positive(self.n, "n")?,
            Job::TodaSolve if self.kind == TodaType::C => positive(self.k, "k")?,
            Job::TodaRank | Job::TodaFlow | Job::Vieta | Job::Factorize => positive(self.n, "n")?,
            Job::KpCheck => positive(self.depth, "depth")?,
            Job::TauCheck => positive(self.solitons, "solitons")?,
            // the t_3 flow reads L down to order -4
            Job::KdvSoliton if self.floor > -4 => return Err(invalid("--floor must be at most -4")),
            _ => {}
        }
        if !(self.radius.is_finite() && self.radius >= 0.0) {
            return Err(invalid("--radius must be a finite non-negative number"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(invalid("--tolerance must be a finite positive number"));
        }
        Ok(())
    }
}
