//! Driver for the `quasitoda` command: resolves a job configuration, runs
//! the seeded certificates and writes the report and artifacts.

pub mod certs;
pub mod config;
pub mod jobs;
pub mod report;

use clap::Parser;

use config::{Cli, JobConfig};
use jobs::JobError;

/// Run the command line `args` (program name first) and return the exit
/// code: 0 all certificates pass, 1 a certificate fails, 2 degenerate
/// instance, 3 configuration error.
pub fn main_with(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 3 } else { 0 };
        }
    };
    let (job, flags) = cli.command.split();
    let result = JobConfig::resolve(job, flags).map_err(JobError::from).and_then(|cfg| {
        let outcome = jobs::run(&cfg)?;
        jobs::write_artifacts(&outcome)?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            print!("{}", outcome.report.to_json());
            if outcome.report.passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            e.exit_code()
        }
    }
}
