//! `todashape`: batch front end over `todashape-core`.
//!
//! Exit codes: 0 ok, 1 failed checks or I/O, 2 configuration, 3 numeric
//! overflow, 4 admissibility, 5 non-convergence.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use todashape_core::Error;

use crate::commands::Target;
use crate::config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric overflow: {0}")]
    Overflow(String),
    #[error("admissibility violated: {0}")]
    Admissibility(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Overflow(_) => 3,
            CliError::Admissibility(_) => 4,
            CliError::NonConvergence(_) => 5,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidParameter(_) | Error::InvalidContour(_) | Error::OnCut { .. } => CliError::Config(msg),
            Error::Overflow { .. } => CliError::Overflow(msg),
            Error::Admissibility { .. } | Error::InvalidCut { .. } => CliError::Admissibility(msg),
            Error::NonConvergence { .. } | Error::SingularJacobian | Error::WindowViolation { .. } => {
                CliError::NonConvergence(msg)
            }
        }
    }
}

#[derive(Parser)]
#[command(name = "todashape", version, about = "Deformed random partitions, limit shapes and dToda checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file (written atomically); stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Truncated partition function as JSON.
    Partfun(Common),
    /// Limit-shape density as CSV `u,rho`.
    Limitshape(Common),
    /// Residual checks as JSON; exit 0 iff all pass.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subset of rh, gse, lax, prepotential.
        #[arg(long, default_value = "rh,gse,lax,prepotential")]
        targets: String,
        /// Shift β of the solved curve before the rh check (sensitivity probe).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        perturb_beta: f64,
    },
    /// Plancherel sampler batch as CSV, distance summary on stderr.
    Sample(Common),
    /// Critical energy and its coupling derivatives as JSON.
    Prepotential(Common),
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("TODASHAPE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("TODASHAPE_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    init_threads()?;
    match cli.command {
        Command::Partfun(c) => commands::partfun(&RunConfig::load(&c.config)?, c.out.as_deref()).map(|_| true),
        Command::Limitshape(c) => commands::limitshape(&RunConfig::load(&c.config)?, c.out.as_deref()).map(|_| true),
        Command::Verify { common, targets, perturb_beta } => {
            let targets = Target::parse_list(&targets)?;
            let cfg = RunConfig::load(&common.config)?;
            commands::verify(&cfg, &targets, perturb_beta, common.out.as_deref())
        }
        Command::Sample(c) => commands::sample(&RunConfig::load(&c.config)?, c.out.as_deref()).map(|_| true),
        Command::Prepotential(c) => commands::prepotential(&RunConfig::load(&c.config)?, c.out.as_deref()).map(|_| true),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("some checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("todashape: {e}");
            ExitCode::from(e.code())
        }
    }
}
