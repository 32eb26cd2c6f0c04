//! `dynphase` — classify, simulate, plot-data and verification front end.
//!
//! Exit codes: 0 ok, 1 configuration error, 2 budget exceeded,
//! 3 verification failure.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Budget(String),
    /// Verification ran and at least one check failed.
    Verify,
}

impl From<dynphase::Error> for CliError {
    fn from(e: dynphase::Error) -> Self {
        match e {
            dynphase::Error::BudgetExceeded(m) => CliError::Budget(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Budget(_) => 2,
            CliError::Verify => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "dynphase",
    version,
    about = "Two-species competition on time scales"
)]
pub struct Cli {
    /// Model parameters: `r=..,s=..,alpha=..,beta=..,K=..,L=..`, inline JSON or a JSON file.
    #[arg(long, global = true)]
    pub params: Option<String>,
    /// Time scale: reals | integers | point_interval | lattice:h=..,origin=.. |
    /// quantum:q=..,start=.. | inline JSON | JSON file.
    #[arg(long, global = true)]
    pub timescale: Option<String>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every random choice. Defaults to 0 (for `verify`: the
    /// suite's seed, itself 0 when absent).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// ODE tolerance (absolute and relative).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Maximum number of step-map applications.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Regime, equilibria and their feasibility as JSON.
    Classify,
    /// Trajectory CSV plus a convergence report.
    Simulate(commands::SimulateArgs),
    /// Nullcline and root-curve CSV for plotting.
    Phaseplane(commands::PhaseplaneArgs),
    /// Run a verification suite.
    Verify(commands::VerifyArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors are configuration errors; exit 2 is reserved
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Classify => commands::classify(&cli),
        Command::Simulate(a) => commands::simulate(&cli, a),
        Command::Phaseplane(a) => commands::phaseplane(&cli, a),
        Command::Verify(a) => commands::verify(&cli, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Config(m) => eprintln!("error: {m}"),
                CliError::Budget(m) => eprintln!("budget exceeded: {m}"),
                CliError::Verify => eprintln!("verification failed"),
            }
            ExitCode::from(e.code())
        }
    }
}
