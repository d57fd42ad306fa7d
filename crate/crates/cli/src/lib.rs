//! Command-line front end for `riccati-core`.
//!
//! Exit codes: 0 success, 1 input error, 2 hypothesis failure, 3 no certificate.

mod commands;
pub mod problem;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::{execute, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_NO_CERTIFICATE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Parser)]
#[command(name = "riccati", version, about = "Spectral analysis and Riccati solutions for block operator matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check Hermiticity and cyclicity of Ran V for A0
    Check(CommonArgs),
    /// Classify the eigenvalues of B and list the atoms of the trace measure
    Classify(CommonArgs),
    /// Scan trace Im M(lambda + i eps) over a grid and flag singular points
    Scan(ScanArgs),
    /// Look for a bounded solution of the Riccati equation
    Solve(SolveArgs),
    /// Recompute the residuals recorded in a report
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Problem file (JSON)
    pub input: PathBuf,
    /// Absolute eigenvalue clustering tolerance
    #[arg(long = "tol-eig")]
    pub tol_eig: Option<f64>,
    /// Relative rank tolerance
    #[arg(long = "tol-rank")]
    pub tol_rank: Option<f64>,
    /// Relative residual tolerance
    #[arg(long = "tol-residual")]
    pub tol_residual: Option<f64>,
    /// Report path; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Uniform grid as min:max:points
    #[arg(long)]
    pub grid: Option<String>,
    /// Geometric eps ladder as hi:lo:ratio
    #[arg(long = "eps-ladder")]
    pub eps_ladder: Option<String>,
    /// Plot data path; defaults to the report path with a .tsv extension
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also enumerate all graph solutions by brute force (d0 + n <= 14)
    #[arg(long = "all-oracle")]
    pub all_oracle: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Problem file the report was produced from
    pub input: PathBuf,
    /// Report written by `solve`
    pub report: PathBuf,
}

/// Parses `args` (including the program name), runs the command and returns the exit
/// code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(outcome) => {
            if let Err(e) = emit(&outcome) {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn emit(outcome: &Outcome) -> Result<(), CliError> {
    if let Some((path, text)) = &outcome.plot {
        write_file(path, text)?;
    }
    match &outcome.out {
        Some(path) => write_file(path, &outcome.text),
        None => std::io::stdout()
            .write_all(outcome.text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}
