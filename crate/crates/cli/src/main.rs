//! `spectre`: assemble transfer matrices, compute and check spectra, and emit
//! figure data.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 numerical non-convergence.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Figure;
use config::{Format, RunConfig, QUAD_MAX_ENV};
use error::CliError;

#[derive(Parser)]
#[command(name = "spectre", version, about = "Transfer-operator spectra of Blaschke-type circle maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// λ as real and imaginary part.
    #[arg(long, global = true, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
    lambda: Option<Vec<f64>>,
    /// λ as modulus and phase.
    #[arg(long, global = true, num_args = 2, value_names = ["MOD", "PHASE"], allow_negative_numbers = true)]
    lambda_polar: Option<Vec<f64>>,
    /// Fourier window: indices −N..=N.
    #[arg(long = "n", global = true, default_value_t = 12)]
    n: usize,
    /// Collocation nodes.
    #[arg(long = "m", global = true, default_value_t = spectre_core::interval::DEFAULT_NODES)]
    m: usize,
    /// Pass/fail tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Fourier-basis transfer matrix.
    Matrix,
    /// Eigenvalues of the transfer matrix matched against the exact spectrum.
    Spectrum,
    /// Collocation spectrum of the interval transfer operator.
    Interval,
    /// All property checks for one λ.
    Verify,
    /// Plot-ready data.
    FigureData {
        #[arg(long, value_enum)]
        figure: Figure,
    },
}

fn pair(v: Option<Vec<f64>>) -> Option<(f64, f64)> {
    v.map(|v| (v[0], v[1]))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let o = cli.opts;
    let cfg = RunConfig::new(
        pair(o.lambda),
        pair(o.lambda_polar),
        o.n,
        o.m,
        o.tol,
        o.out,
        o.format,
        std::env::var(QUAD_MAX_ENV).ok(),
    )?;
    match cli.command {
        Command::Matrix => commands::matrix(&cfg),
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Interval => commands::interval(&cfg),
        Command::Verify => commands::verify(&cfg),
        Command::FigureData { figure } => commands::figure_data(&cfg, figure),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spectre: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
