//! Library side of the `piv` command: argument model, commands, output
//! writers and the mapping from errors to exit codes.

mod commands;
pub mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use piv_core::Error;

#[derive(Debug, Parser)]
#[command(name = "piv", version, about = "Complex Painleve IV solutions from SUSY partners of the oscillator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample g(x) and write it as CSV or JSON.
    Generate(RunConfig),
    /// Run the residual suite and print a JSON report.
    Verify(RunConfig),
    /// Build and verify the ladder structure of H_k.
    Spectrum(RunConfig),
    /// Sample the three extremal states.
    Extremal(RunConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixtureArg {
    /// g = -2x with (a, b) = (0, -2)
    Linear,
    /// g = -2x/3 with (a, b) = (0, -2/9)
    TwoThirds,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Transformation order.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Factorization energy of the first seed.
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub eps1: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub kappa: f64,
    /// Which extremal state defines g (1, 2 or 3).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub family: u8,
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub xmin: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub xmax: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 2001, value_parser = clap::value_parser!(u64).range(101..))]
    pub n: u64,
    /// Ladder depth for `spectrum`.
    #[arg(long = "N", default_value_t = 10)]
    pub depth: usize,
    /// Output file. Defaults to stdout for reports and `g.csv` / `extremal.csv` for data.
    #[arg(long)]
    pub out_path: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Use a rational PIV solution instead of a SUSY construction.
    #[arg(long, value_enum)]
    pub fixture: Option<FixtureArg>,
    /// Override the PIV parameter a used for reporting and residuals.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Override the PIV parameter b.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Accept real seeds with eps1 >= 1/2.
    #[arg(long)]
    pub allow_risky: bool,
}

/// Failures of a command, each with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Output(String),
    #[error("verification failed: {0}")]
    Unverified(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => core_exit_code(e),
            CliError::Io { .. } | CliError::Output(_) => 1,
            CliError::Unverified(_) => 4,
        }
    }
}

/// Exit code for a library error: 1 for bad input, 2 for singular
/// transformations, 3 for degenerate seeds, 4 for failed numerics.
pub fn core_exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidKummerParameter(_)
        | Error::KummerOutOfRange(_)
        | Error::OscillatorIndex(_)
        | Error::OutOfRange(_)
        | Error::InvalidSeed(_)
        | Error::RiskySeed { .. }
        | Error::InvalidFamily(_)
        | Error::LadderDepth(_)
        | Error::InvalidGrid(_)
        | Error::GridTooCoarse { .. }
        | Error::MissingJets { .. }
        | Error::GridMismatch => 1,
        Error::SingularWronskian { .. } | Error::SingularSolution { .. } => 2,
        Error::DegenerateChain { .. }
        | Error::UnsupportedDegenerate { .. }
        | Error::AnnihilatedState
        | Error::ExtremalStateZero { .. }
        | Error::DegenerateSolution => 3,
        Error::KummerNonConvergence { .. } | Error::TooFewAdmissiblePoints { .. } => 4,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Generate(c) => commands::generate(c),
        Command::Verify(c) => commands::verify(c),
        Command::Spectrum(c) => commands::spectrum(c),
        Command::Extremal(c) => commands::extremal(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
