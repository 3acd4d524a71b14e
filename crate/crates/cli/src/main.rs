//! `markov2`: validate, diagnose, solve and generate second-order transition tensors.
//!
//! Exit codes: 0 success, 1 usage or I/O, 2 parse, 3 validation,
//! 4 non-convergence, 5 a required hypothesis does not hold.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable naming the default directory for written files.
pub const OUT_DIR_VAR: &str = "MARKOV2_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "markov2",
    version,
    about = "Stationary distributions of second-order Markov chains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check shape, entry range and fiber sums of a tensor file.
    Validate(ValidateArgs),
    /// Report the sufficient conditions for a unique stationary vector.
    Diagnose(DiagnoseArgs),
    /// Compute the stationary vector.
    Solve(SolveArgs),
    /// Write a random positive tensor with a prescribed minimum entry.
    Generate(GenerateArgs),
    /// Write the data behind the convergence figures as CSV.
    Figure(FigureArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub path: PathBuf,
    /// Fiber-sum tolerance; defaults to the one declared in the file.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Print only the summary line.
    #[arg(long, short)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    pub path: PathBuf,
    /// Fiber-sum tolerance; defaults to the one declared in the file.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Random interior points for the eigenvalue check (the barycenter and
    /// near-vertex points are always added).
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print the report as JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Exit with code 5 unless the min-entry condition holds.
    #[arg(long)]
    pub require_delta: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Power,
    Markov,
    Quadratic,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub path: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Power)]
    pub method: MethodArg,
    /// Stop when ||x^(k) - x^(k-1)||_1 falls below this.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Fiber-sum tolerance; defaults to the one declared in the file.
    #[arg(long)]
    pub file_tol: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Seed of run 0; run r uses seed + r.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Start x^(0): `random`, `uniform` or a JSON file holding an array.
    #[arg(long, default_value = "random")]
    pub x0: String,
    /// Markov only. Start x^(1): `map` (P x0 x0), `random`, `uniform` or a JSON file.
    #[arg(long, default_value = "map")]
    pub x1: String,
    /// Number of independent seeded runs; prints the mean iteration count.
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Write the iteration trace here (`_run{r}` is inserted when runs > 1).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Fill the error columns against a reference solution run to 1e-13.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    /// Lower bound on every entry; defaults to 13/(20n).
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; defaults to `random_n{n}_seed{seed}.json`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// Tensor file for figures 1 and 2; the embedded dna_i tensor when omitted.
    pub path: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub which: u8,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Figure 3 only: dimension of the random tensors.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Figure 3 only: number of random tensors.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Output file; defaults to `figure{which}.csv`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(output::EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
