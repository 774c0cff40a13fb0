//! `bcm`: bounds, verification runs and application reports for overlap counts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod app;
mod bound;
mod config;
mod export;
mod output;
mod parse;
mod verify;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Params, RunConfig};
use output::Table;

#[derive(Debug, Parser)]
#[command(
    name = "bcm",
    version,
    about = "Moment and tail bounds for overlap counts, with Monte Carlo checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a bound over a parameter grid
    Bound {
        /// Formula id, e.g. thm2.7; an unknown id prints the valid ones
        #[arg(long)]
        formula: Option<String>,
        #[command(flatten)]
        params: Params,
    },
    /// Check a bound against simulation or an exact oracle
    Verify {
        #[arg(long)]
        formula: Option<String>,
        #[command(flatten)]
        params: Params,
    },
    /// Run an application: gc | slln | cramer | sanov | lil | segments | sde
    App {
        app: Option<String>,
        #[command(flatten)]
        params: Params,
    },
    /// Export simulated overlap counts, one record per replication
    Export {
        #[command(flatten)]
        params: Params,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Lib(bc_moments::Error),
}

impl From<bc_moments::Error> for CliError {
    fn from(e: bc_moments::Error) -> Self {
        Self::Lib(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Io(m) => write!(f, "i/o error: {m}"),
            Self::Lib(e) => write!(f, "{e}"),
        }
    }
}

pub const EXIT_IO: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_VERIFY_FAILED: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::Lib(bc_moments::Error::Input(_)) => EXIT_USAGE,
            Self::Io(_) => EXIT_IO,
            Self::Lib(_) => EXIT_DOMAIN,
        }
    }
}

/// A finished run: the report and whether every check passed.
pub struct Outcome {
    pub table: Table,
    pub passed: bool,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Self { table, passed: true }
    }
}

fn run(command: Command) -> Result<bool, CliError> {
    let (cfg, params) = match command {
        Command::Bound { formula, params } => (
            RunConfig::resolve("bound", Some(("formula", formula)), &params)?,
            params,
        ),
        Command::Verify { formula, params } => (
            RunConfig::resolve("verify", Some(("formula", formula)), &params)?,
            params,
        ),
        Command::App { app, params } => (RunConfig::resolve("app", Some(("app", app)), &params)?, params),
        Command::Export { params } => (RunConfig::resolve("export", None, &params)?, params),
    };
    let threads = params.threads.unwrap_or(0);
    let outcome = bc_moments::mc::with_threads(threads, || match cfg.command.as_str() {
        "bound" => bound::run(&cfg).map(Outcome::from),
        "verify" => verify::run(&cfg),
        "app" => app::run(&cfg),
        _ => export::run(&cfg).map(Outcome::from),
    })??;
    output::write(&cfg, &outcome.table, params.output.as_deref())?;
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed: at least one check exceeded its bound by more than 4 standard errors");
            ExitCode::from(EXIT_VERIFY_FAILED)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
