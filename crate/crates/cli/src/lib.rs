//! Front end for the finite-population inverse-sampling laws, their
//! infinite-population limit, the local log-ratio expansion and the
//! distance-bound machinery.
//!
//! Exit codes: 0 all checks passed, 1 a verification check failed, 2
//! invalid input.

pub mod commands;
pub mod config;
pub mod descriptor;
pub mod formats;
pub mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "mih",
    version,
    about = "Finite-population inverse-sampling laws: evaluation, sweeps and distance-bound reports"
)]
pub struct Cli {
    /// Seed recorded in every report and used by all samplers; falls back
    /// to the config file's seed, then to zero.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for sweep execution; output order is independent of
    /// this setting.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write output to this path instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Declarative sweep configuration (TOML); flags override file values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
pub enum Command {
    /// Evaluate a log-mass or enumerate a full law.
    Pmf(commands::pmf::PmfArgs),
    /// Draw from a sampler, optionally with an empirical moment summary.
    Sample(commands::sample::SampleArgs),
    /// Distance between two laws or between a law and a normal family.
    Distance(commands::distance::DistanceArgs),
    /// Residual-rate sweep for the local log-ratio expansion.
    ExpansionCheck(commands::expansion::ExpansionArgs),
    /// Consolidated distance/deficiency bound report with pass/fail checks.
    BoundsReport(commands::bounds::BoundsArgs),
    /// Generic distance sweep over a parameter grid.
    Sweep(commands::sweep::SweepArgs),
}

/// Failures that map onto the documented exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2: bad input, naming the violated invariant.
    Invalid(String),
    /// Exit 1: a verification check failed.
    CheckFailed(String),
}

impl From<mih_core::Error> for CliError {
    fn from(e: mih_core::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Invalid(format!("io error: {e}"))
    }
}

pub type CliResult = Result<(), CliError>;

impl Cli {
    /// Flags override file values; absent both, the seed is zero and the
    /// sweep runs single-threaded.
    pub fn resolved_seed(&self, file: &config::FileConfig) -> u64 {
        self.seed.or(file.seed).unwrap_or(0)
    }

    pub fn resolved_jobs(&self, file: &config::FileConfig) -> usize {
        self.jobs.or(file.jobs).unwrap_or(1).max(1)
    }
}

/// Parses arguments and dispatches; the binary's whole entry point.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Pmf(args) => commands::pmf::run(&cli, args),
        Command::Sample(args) => commands::sample::run(&cli, args),
        Command::Distance(args) => commands::distance::run(&cli, args),
        Command::ExpansionCheck(args) => commands::expansion::run(&cli, args),
        Command::BoundsReport(args) => commands::bounds::run(&cli, args),
        Command::Sweep(args) => commands::sweep::run(&cli, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::CheckFailed(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
