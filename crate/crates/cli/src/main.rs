//! `qec-energy`: gate catalog, analytic oracles, Monte Carlo sweeps and
//! crossover analysis from the command line.

mod commands;
mod display;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use qec_energy::Error;

#[derive(Parser)]
#[command(
    name = "qec-energy",
    version,
    about = "Energy/error trade-off of noisy quantum error correction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Show a gate's coefficient multiset, energy bound and ideal matrix.
    Gates(GatesArgs),
    /// Closed-form failure rate of a repetition code under X flips.
    Oracle(OracleArgs),
    /// Run a Monte Carlo sweep and write CSV files plus a manifest.
    Sweep(SweepArgs),
    /// Find where each code overtakes the next cheaper one in a sweep CSV.
    Crossover(CrossoverArgs),
    /// Energy cost of fault-tolerant syndrome extraction.
    FtCompare(FtCompareArgs),
}

#[derive(Args)]
pub struct GatesArgs {
    /// Gate name (X, Y, Z, CX, CY, CZ, H, Q, S); omit to list them all.
    #[arg(long)]
    pub gate: Option<String>,
    /// Coefficient noise strength ε.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
}

#[derive(Args)]
pub struct OracleArgs {
    /// Repetition code, e.g. rep5.
    #[arg(long)]
    pub code: String,
    /// Bit-flip channel probability.
    #[arg(long)]
    pub px: f64,
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["preset", "config", "manifest"])))]
pub struct SweepArgs {
    /// Built-in sweep (fig1, fig3, fig4, fig5, fig6, fig7_8, fig9).
    #[arg(long)]
    pub preset: Option<String>,
    /// TOML sweep configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Rerun the configuration recorded in a manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Comma-separated code ids, replacing the configured ones.
    #[arg(long, value_delimiter = ',')]
    pub codes: Option<Vec<String>>,
    /// Energy grid in ħω₀: `from:to:points` (log spaced) or a comma list.
    #[arg(long, conflicts_with = "epsilon")]
    pub energy: Option<String>,
    /// ε grid: `from:to:points` (log spaced) or a comma list.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Comma-separated channel probabilities.
    #[arg(long, value_delimiter = ',')]
    pub px: Option<Vec<f64>>,
    #[arg(long)]
    pub shots: Option<u64>,
    /// Master seed; beats QEC_SEED, which beats the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads [default: available parallelism].
    #[arg(long)]
    pub workers: Option<usize>,
    /// Combined CSV path [default: <out-dir>/<name>_<timestamp>.csv].
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct CrossoverArgs {
    /// Sweep CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Only analyse rows with this channel probability.
    #[arg(long)]
    pub px: Option<f64>,
    /// Report the first crossing instead of the persistent one.
    #[arg(long)]
    pub first: bool,
}

#[derive(Args)]
pub struct FtCompareArgs {
    /// Validation rounds per cat state.
    #[arg(long, default_value_t = 1)]
    pub v: u32,
    /// Repetition sizes for the energy table.
    #[arg(long, value_delimiter = ',', default_value = "3,5,7,9")]
    pub sizes: Vec<usize>,
    /// Also simulate FT and plain rep3 curves with this many shots per point.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, default_value_t = 0.02)]
    pub px: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Write the simulated curves to this CSV.
    #[arg(long, requires = "shots")]
    pub out: Option<PathBuf>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } | Error::Internal(_) => 1,
        Error::InvalidArgument(_) | Error::ContractViolation(_) | Error::DivergentBound => 2,
        Error::Schema(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gates(a) => commands::gates(&a),
        Command::Oracle(a) => commands::oracle(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Crossover(a) => commands::crossover(&a),
        Command::FtCompare(a) => commands::ft_compare(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
