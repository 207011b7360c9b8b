mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;
use crate::output::Format;

/// Solitary waves, corrector solutions and residual studies for the
/// extended Boussinesq model.
#[derive(Debug, Parser)]
#[command(name = "xbouss", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solitary-wave profile of the traveling-wave ODE.
    Solitary(SolitaryArgs),
    /// Rescaled profiles of the numeric, GN, KdV and Boussinesq waves.
    Compare(CompareArgs),
    /// Background wave and its second-order corrector at one time.
    Corrector(CorrectorArgs),
    /// Residue norms over a list of eps, with fitted slopes.
    Residuals(ResidualsArgs),
    /// Round-trip, symmetry and bound probes of the elliptic operator.
    Opcheck(OpcheckArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolitaryArgs {
    /// Wave speed, must exceed 1.
    #[arg(long)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    /// Relative tolerance of the ODE integrator.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Number of samples (odd).
    #[arg(long, default_value_t = 4001)]
    pub grid_n: usize,
    /// Half extent of the profile; chosen from the tail decay when absent.
    #[arg(long)]
    pub grid_half_width: Option<f64>,
    /// Solve the Green-Naghdi reduction instead.
    #[arg(long)]
    pub gn_mode: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Comma-separated wave speeds.
    #[arg(long, value_delimiter = ',', default_value = "1.025,1.01,1.002")]
    pub c: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Samples of the rescaled axis X.
    #[arg(long, default_value_t = 601)]
    pub grid_n: usize,
    /// Half extent of the rescaled axis X.
    #[arg(long, default_value_t = 6.0)]
    pub grid_half_width: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CorrectorArgs {
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 1001)]
    pub grid_n: usize,
    #[arg(long, default_value_t = 50.0)]
    pub grid_half_width: f64,
    /// Quadrature tolerance for the characteristic integrals.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ResidualsArgs {
    /// Comma-separated, strictly decreasing.
    #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-2,1e-3,1e-4,1e-5")]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Points of the periodic grid.
    #[arg(long, default_value_t = 4096)]
    pub grid_n: usize,
    #[arg(long, default_value_t = 50.0)]
    pub grid_half_width: f64,
    /// Step of the centred time differences.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Quadrature tolerance for the corrector.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OpcheckArgs {
    /// Comma-separated eps values.
    #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-2,1e-3,1e-4")]
    pub eps: Vec<f64>,
    /// Sobolev index of the bound probe.
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long, default_value_t = 256)]
    pub grid_n: usize,
    #[arg(long, default_value_t = 20.0)]
    pub grid_half_width: f64,
    /// Relative residual requested from the inverse.
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    /// Random inputs per eps.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let workers = commands::workers()?;
    match cli.command {
        Command::Solitary(a) => commands::solitary(&a),
        Command::Compare(a) => commands::compare(&a, workers),
        Command::Corrector(a) => commands::corrector(&a, workers),
        Command::Residuals(a) => commands::residuals(&a, workers),
        Command::Opcheck(a) => commands::opcheck(&a, workers),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("xbouss: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
