//! `arclen` — certified arc-length uniform sampling on polynomial
//! curves.
//!
//! The workflow mirrors the offline/online split of the sampler:
//! `preprocess` builds a plan file once, `sample` draws from it cheaply
//! and reproducibly, `validate` re-checks the plan against an
//! independent quadrature oracle, and `experiment` emits the benchmark
//! grids as plot-ready CSV.

mod commands;
mod experiment;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit codes: 2 parse error, 3 vanishing speed, 4 positivity failure,
/// 5 certificate failure, 1 anything else.
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }
}

impl From<arclen::Error> for CliError {
    fn from(e: arclen::Error) -> Self {
        let code = match e {
            arclen::Error::VanishingSpeed { .. } | arclen::Error::RootOnInterval { .. } => 3,
            arclen::Error::PositivityFailure { .. } => 4,
            arclen::Error::InvalidPlan(_) => 2,
            _ => 1,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(1, e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "arclen",
    version,
    about = "Random points on polynomial curves, uniform in arc-length, with a certified error budget"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the offline sampler plan for a curve file.
    Preprocess(PreprocessArgs),
    /// Draw samples from a plan file.
    Sample(SampleArgs),
    /// Estimate the empirical error of a plan and re-check its
    /// certificates.
    Validate(ValidateArgs),
    /// Run the benchmark grids and emit plot-ready CSV.
    #[command(alias = "bench")]
    Experiment(ExperimentArgs),
}

#[derive(Args)]
pub struct PreprocessArgs {
    /// Curve JSON: { "domain": [a, b], "components": [[c0, c1, ...], ...] }
    #[arg(long)]
    pub curve: PathBuf,
    /// Error exponent: the sample law is within 2^-ell of exact in
    /// total variation.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=40))]
    pub ell: u32,
    /// Error budget as a real in (0, 1); converted to ell = ceil(log2(1/eps)).
    #[arg(long, conflicts_with = "ell")]
    pub epsilon: Option<f64>,
    /// 0 keeps one piece; k >= 1 splits at squared-speed root real
    /// parts plus k-1 uniform interior points.
    #[arg(long, default_value_t = 0)]
    pub splits: u32,
    /// Output plan file (JSON).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SampleArgs {
    /// Plan file produced by `preprocess`.
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..=1_000_000_000))]
    pub count: u64,
    /// RNG seed; 0 draws a fresh seed from the operating system.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub plan: PathBuf,
    /// Curve the plan was built from.
    #[arg(long)]
    pub curve: PathBuf,
    /// Samples drawn for the empirical estimates.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..=1_000_000_000))]
    pub count: u64,
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u64).range(2..=1_000_000))]
    pub bins: u64,
    /// RNG seed; 0 draws a fresh seed from the operating system.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output report file (JSON).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Random Gaussian curves over a (degree, dimension, ell) grid.
    Table1,
    /// Split versus unsplit interpolant degree over an ell sweep.
    Split,
    /// The fixed 3D curve family with growing degree.
    Degree,
}

#[derive(Args)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Trials per grid cell (table1 mode).
    #[arg(long, default_value_t = 10)]
    pub trials: u32,
    /// Curve degrees for table1 mode.
    #[arg(long, value_delimiter = ',', default_values_t = vec![5, 10, 15, 20])]
    pub degrees: Vec<usize>,
    /// Ambient dimensions for table1 mode.
    #[arg(long, value_delimiter = ',', default_values_t = vec![20])]
    pub dims: Vec<usize>,
    /// Error budgets for table1 mode.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.01])]
    pub epsilons: Vec<f64>,
    /// Largest ell for split mode.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..=40))]
    pub max_ell: u32,
    /// Largest curve degree for degree mode.
    #[arg(long, default_value_t = 40)]
    pub max_degree: usize,
}

/// Convert an epsilon in (0, 1) to the error exponent.
pub fn epsilon_to_ell(epsilon: f64) -> Result<u32, CliError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(CliError::new(2, format!("epsilon {epsilon} outside (0, 1)")));
    }
    Ok(((1.0 / epsilon).log2().ceil() as u32).clamp(1, 40))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Preprocess(args) => commands::preprocess(args),
        Command::Sample(args) => commands::sample(args),
        Command::Validate(args) => commands::validate(args),
        Command::Experiment(args) => experiment::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
