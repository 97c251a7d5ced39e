//! Command-line front end for the L1-PCA solvers and experiment
//! harnesses.
//!
//! Subcommands: `l1pca` (solve for components of a matrix CSV), `oracle`
//! (brute-force reference objectives), `exp-dr` and `exp-doa` (seeded
//! Monte-Carlo studies). Reports are single JSON documents; spectra and
//! per-trial tables are CSV artifacts written atomically under `--out`.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 parse/config error,
//! 3 search cap exceeded.

mod commands;
mod io;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    /// Malformed input or configuration (exit 2).
    Parse(String),
    /// A solver cap was exceeded (exit 3).
    Cap(String),
    /// File-system failure (exit 1).
    Io(String),
    /// Solver runtime failure (exit 1).
    Solver(String),
}

impl From<l1pca::Error> for CliError {
    fn from(e: l1pca::Error) -> Self {
        match e {
            l1pca::Error::CapExceeded { .. } => CliError::Cap(e.to_string()),
            other => CliError::Solver(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Exact solver (single component or joint K components).
    Optimal,
    /// Greedy deflation with the exact single-component solver per stage.
    Greedy,
    /// Best-of-restarts fixed-point sign iteration (k = 1).
    Fixedpoint,
    /// Plain least-squares subspace.
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, clap::Args)]
pub struct L1pcaArgs {
    /// Matrix CSV: one sample per row, optional header.
    pub input: PathBuf,
    /// Number of components.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Method::Optimal)]
    pub method: Method,
    /// Seed for randomized methods.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory; prints the report to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `csv` additionally writes the components as components.csv.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Cap on N for exhaustive sign searches.
    #[arg(long, default_value_t = l1pca::DEFAULT_EXHAUSTIVE_CAP)]
    pub exhaustive_cap: usize,
    /// Cap on (N-1)*K for the joint sign-matrix search.
    #[arg(long, default_value_t = l1pca::DEFAULT_MULTI_CAP)]
    pub multi_cap: usize,
    /// Relative singular-value cutoff; defaults to 1e-9 * max(D, N).
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Random restarts for the fixed-point method.
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    /// Iteration limit for the fixed-point method.
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
}

#[derive(Debug, clap::Args)]
pub struct OracleArgs {
    /// Matrix CSV: one sample per row, optional header.
    pub input: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = l1pca::DEFAULT_EXHAUSTIVE_CAP)]
    pub exhaustive_cap: usize,
    #[arg(long, default_value_t = l1pca::DEFAULT_MULTI_CAP)]
    pub multi_cap: usize,
}

#[derive(Debug, clap::Args)]
pub struct ExpArgs {
    /// JSON config file; defaults match the published study setup.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; prints the report to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Parser)]
#[command(name = "l1pca", version, about = "Exact L1-norm principal component analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute principal components of a matrix CSV.
    L1pca(L1pcaArgs),
    /// Brute-force reference objectives for cross-checking solvers.
    Oracle(OracleArgs),
    /// Outlier-robust dimensionality reduction study.
    ExpDr(ExpArgs),
    /// MUSIC direction-of-arrival study.
    ExpDoa(ExpArgs),
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::L1pca(args) => commands::cmd_l1pca(args),
        Command::Oracle(args) => commands::cmd_oracle(args),
        Command::ExpDr(args) => commands::cmd_exp_dr(args),
        Command::ExpDoa(args) => commands::cmd_exp_doa(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Io(msg)) | Err(CliError::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
