//! Running a resolved job: certificates into a report, plus the optional
//! dump and CSV artifacts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use quasitoda::soliton::{self, Grid, SolitonSpec};
use quasitoda::toda::TodaType;
use quasitoda::{AlgebraElement, Error, Series};
use thiserror::Error;

use crate::certs;
use crate::config::{ConfigError, Job, JobConfig};
use crate::report::{Certificate, Report};

/// Everything a successful run produces; nothing is written yet.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub artifacts: Vec<(PathBuf, String)>,
}

#[derive(Debug, Error)]
pub enum JobError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("degenerate instance: {0}")]
    Degenerate(Error),
    #[error("invalid parameters: {0}")]
    Parameters(Error),
    #[error("internal check failed: {0}")]
    Inconsistent(Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl JobError {
    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Inconsistent(_) => 1,
            JobError::Degenerate(_) => 2,
            JobError::Config(_) | JobError::Parameters(_) | JobError::Io { .. } => 3,
        }
    }

    /// Short machine-readable kind for the error line on stderr.
    pub fn kind(&self) -> &'static str {
        match self {
            JobError::Config(_) => "config",
            JobError::Degenerate(_) => "degenerate",
            JobError::Parameters(_) => "parameters",
            JobError::Inconsistent(_) => "inconsistent",
            JobError::Io { .. } => "io",
        }
    }
}

impl From<Error> for JobError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotInvertible
            | Error::QuasidetUndefined { .. }
            | Error::DegenerateKernel
            | Error::DegeneratePrefix(_)
            | Error::ConstantTermNotOne(_)
            | Error::SymmetryViolated(_)
            | Error::DegenerateData(_)
            | Error::DegenerateGenerators(_) => JobError::Degenerate(e),
            Error::Inconsistent(_) | Error::TangencyViolation(_) => JobError::Inconsistent(e),
            Error::DimMismatch(..)
            | Error::NotSquare(..)
            | Error::VarMismatch(..)
            | Error::UnknownVar(_)
            | Error::NonzeroConstantTerm
            | Error::Shape(_)
            | Error::FloorTooShallow(_)
            | Error::Parse(_) => JobError::Parameters(e),
        }
    }
}

fn seeds(cfg: &JobConfig) -> impl Iterator<Item = u64> {
    let start = cfg.seed;
    (0..cfg.instances as u64).map(move |i| start.wrapping_add(i))
}

fn grid(cfg: &JobConfig) -> Grid {
    Grid { radius: cfg.radius, points: cfg.grid_points }
}

fn bundle_header(out: &mut String, cfg: &JobConfig, kind: &str, n: usize, seed: u64) {
    let _ = writeln!(out, "n={n} type={kind} d={} orders={},{} seed={seed}", cfg.dim, cfg.orders.0, cfg.orders.1);
}

fn bundle_body(out: &mut String, phi: &[Series]) {
    for (i, p) in phi.iter().enumerate() {
        let _ = writeln!(out, "phi_{}:", i + 1);
        out.push_str(&p.to_dump());
    }
}

/// Run the job without touching the file system.
pub fn run(cfg: &JobConfig) -> Result<Outcome, JobError> {
    let mut certs: Vec<Certificate> = Vec::new();
    let mut artifacts = Vec::new();
    let mut dump = String::new();
    let (d, o) = (cfg.dim, cfg.orders);
    match cfg.job {
        Job::TodaSolve => {
            for seed in seeds(cfg) {
                match cfg.kind {
                    TodaType::A => {
                        let (c, phi) = certs::toda_a(seed, d, cfg.n, cfg.degree, o)?;
                        certs.extend(c);
                        bundle_header(&mut dump, cfg, "A", cfg.n, seed);
                        bundle_body(&mut dump, &phi);
                    }
                    kind => {
                        let (c, phi) = certs::toda_sym(kind, seed, d, cfg.k, cfg.degree, o)?;
                        certs.extend(c);
                        let name = if kind == TodaType::B { "B" } else { "C" };
                        bundle_header(&mut dump, cfg, name, phi.len(), seed);
                        bundle_body(&mut dump, &phi);
                    }
                }
            }
        }
        Job::TodaRank => {
            for seed in seeds(cfg) {
                certs.extend(certs::kernel_rank(seed, d, cfg.n, cfg.degree, o)?);
            }
        }
        Job::TodaFlow => {
            for seed in seeds(cfg) {
                certs.extend(certs::flow_form(seed, d, cfg.n, o)?);
            }
        }
        Job::Liouville => {
            for seed in seeds(cfg) {
                let (c, phi) = certs::liouville(seed, d, cfg.degree, o)?;
                certs.extend(c);
                bundle_header(&mut dump, cfg, "C", 1, seed);
                bundle_body(&mut dump, std::slice::from_ref(&phi));
            }
            certs.push(certs::liouville_unit(o)?);
        }
        Job::Vieta => {
            for seed in seeds(cfg) {
                certs.extend(certs::vieta(seed, d, cfg.n, o.0)?);
            }
        }
        Job::Factorize => {
            for seed in seeds(cfg) {
                certs.extend(certs::factorization(seed, d, cfg.n, o.0)?);
                certs.extend(certs::kernel_normalization(seed, d, cfg.n, o.0)?);
            }
        }
        Job::KpCheck => {
            for seed in seeds(cfg) {
                certs.extend(certs::psdo_calculus(seed, d, o.0, cfg.depth)?);
            }
        }
        Job::KdvSoliton => {
            let mut first = None;
            for seed in seeds(cfg) {
                let (c, u) = certs::kdv_soliton(seed, d, cfg.solitons, o, cfg.floor)?;
                certs.extend(c);
                let _ = writeln!(dump, "u seed={seed} N={} d={d}", cfg.solitons);
                dump.push_str(&u.to_dump());
                first.get_or_insert(u);
            }
            if let (Some(path), Some(u)) = (&cfg.csv, first) {
                artifacts.push((path.clone(), soliton::sample_csv(&u, &grid(cfg))?));
            }
        }
        Job::TauCheck => {
            for seed in seeds(cfg) {
                for count in 1..=cfg.solitons {
                    let spec = quasitoda::instances::kdv_spec(seed, 1, count, o);
                    certs.push(certs::tau(&spec, &format!("seed {seed}, N = {count}"))?);
                }
            }
        }
        Job::SechCheck => {
            let one = |r: &quasitoda::Rational| AlgebraElement::scalar(1, r.clone());
            let spec = SolitonSpec::kdv(1, vec![one(&cfg.alpha)], vec![one(&cfg.a)], o)?;
            certs.extend(certs::sech(&spec, &grid(cfg), cfg.tolerance)?);
            if cfg.csv.is_some() || cfg.dump.is_some() {
                let u = soliton::kdv_u(&spec)?.u;
                if let Some(path) = &cfg.csv {
                    artifacts.push((path.clone(), soliton::sample_csv(&u, &grid(cfg))?));
                }
                dump.push_str(&u.to_dump());
            }
        }
    }
    if let Some(path) = &cfg.dump {
        artifacts.push((path.clone(), dump));
    }
    let report = Report::new(cfg.job.name(), cfg.seed, certs);
    if let Some(path) = &cfg.report {
        artifacts.push((path.clone(), report.to_json()));
    }
    Ok(Outcome { report, artifacts })
}

/// Write `contents` to `path` through a temporary file in the same
/// directory and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), JobError> {
    use std::io::Write;
    let io = |source| JobError::Io { path: path.to_owned(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn write_artifacts(outcome: &Outcome) -> Result<(), JobError> {
    for (path, contents) in &outcome.artifacts {
        write_atomic(path, contents)?;
    }
    Ok(())
}
