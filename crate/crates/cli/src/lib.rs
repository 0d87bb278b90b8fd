//! Command-line front end: JSON problem specs in, saddle-point records, sweep
//! CSVs and verification reports out.
//!
//! Exit codes: 0 success, 1 parse error, 2 infeasible or empty problem,
//! 3 saddle-point verification (or solver) failure, 4 suite failure.

pub mod commands;
pub mod problem;
pub mod record;
pub mod spec;
pub mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::problem::EXIT_PARSE;
use crate::spec::GridSpec;
use crate::suites::Suite;

#[derive(Debug, Parser)]
#[command(
    name = "maxent",
    version,
    about = "Generalized maximum entropy and robust Bayes acts"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Problem spec (JSON).
    pub spec: PathBuf,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for every random draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print loss values in bits instead of nats.
    #[arg(long)]
    pub bits: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the game at one tau and print the saddle point as JSON.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Target moments, comma separated; defaults to the spec's tau.
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        /// Convergence tolerance of the iterative solver.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Trace the family over a tau grid and print CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// FROM:TO:STEPS, overriding the spec's grid.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run a verification suite and print a JSON report.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// FROM:TO:STEPS grid of natural parameters for the conjugacy suite.
        #[arg(long, allow_hyphen_values = true)]
        beta_grid: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Solve the derived game of the spec's statistical model.
    Capacity {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = commands::CAPACITY_TOL)]
        tol: f64,
    },
}

fn grid_arg(s: &Option<String>) -> anyhow::Result<Option<GridSpec>> {
    s.as_deref().map(GridSpec::parse).transpose()
}

/// Parses the process arguments, runs the command and maps the outcome to
/// an exit code.
pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_PARSE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Solve { common, tau, tol } => commands::solve(common, tau.as_deref(), *tol),
        Command::Sweep { common, grid, tol } => commands::sweep(common, grid, *tol),
        Command::Verify {
            common,
            suite,
            grid,
            beta_grid,
            tol,
        } => commands::verify(common, *suite, grid, beta_grid, *tol),
        Command::Capacity { common, tol } => commands::capacity(common, *tol),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
