//! File formats, reports and the command-line front end.
//!
//! Every command is also callable as a library function so tests can check
//! file output against in-memory results.

use std::path::PathBuf;

use thiserror::Error;

pub mod args;
pub mod config;
pub mod fit;
pub mod ingest;
pub mod output;
pub mod regress;
pub mod simulate;
pub mod svg;

pub use args::{Cli, Command};


#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("{path}: malformed rows at lines {}", format_lines(.lines))]
    Malformed { path: PathBuf, lines: Vec<u64> },

    #[error("{0}")]
    Input(String),

    #[error("misaligned periods: {0}")]
    Misaligned(String),

    #[error(transparent)]
    Core(#[from] curvetrend::Error),

    #[error("{failed} of {total} replications failed")]
    TooManyFailures { failed: usize, total: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// 2 for anything wrong with the inputs, 1 for failed runs and I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::TooManyFailures { .. } | CliError::Io(_) | CliError::Pool(_) => 1,
            CliError::Csv(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => 1,
            _ => 2,
        }
    }
}

fn format_lines(lines: &[u64]) -> String {
    const SHOWN: usize = 20;
    let mut s: Vec<String> = lines.iter().take(SHOWN).map(|l| l.to_string()).collect();
    if lines.len() > SHOWN {
        s.push(format!("and {} more", lines.len() - SHOWN));
    }
    s.join(", ")
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Runs a parsed command line; warnings go to stderr.
pub fn run(cli: &Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build()?;
    pool.install(|| match &cli.command {
        Command::Simulate { config } => {
            let plan = config::SimPlan::from_file(config, cli.seed)?;
            let outcome = simulate::run_plan(&plan);
            simulate::write_outputs(&plan, &outcome, &cli.out_dir)?;
            outcome.check()
        }
        Command::Fit(a) => {
            let outcome = fit::cmd_fit(a, &cli.out_dir)?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            Ok(())
        }
        Command::Regress(a) => {
            let warnings = regress::cmd_regress(a, &cli.out_dir)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            Ok(())
        }
    })
}
