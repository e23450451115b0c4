//! `qsim` command-line interface.
//!
//! Exit codes: 0 success, 2 input or parse error, 3 configuration error,
//! 4 internal error. Machine-readable output goes only to `--out`.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qsim", version, about = "Noise-aware quantum circuit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate an OpenQASM 2.0 file and write counts or probabilities.
    Run(RunArgs),
    /// Transverse-field Ising magnetization sweep.
    Tfim(TfimArgs),
    /// Variational ground-state search for the transverse-field Ising chain.
    Vqe(VqeArgs),
    /// Time simulation of a directory of QASM files or a GHZ ladder.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Sv,
    Dm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Open,
    Periodic,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// OpenQASM 2.0 input file.
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "sv")]
    pub engine: EngineArg,
    /// Number of samples; 0 writes the full probability vector.
    #[arg(long, default_value_t = 1024)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Device calibration JSON (requires `--engine dm`).
    #[arg(long)]
    pub noise: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TfimArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Ising coupling J.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub coupling: f64,
    /// Transverse field h.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub field: f64,
    #[arg(long, default_value_t = 3.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    #[arg(long, default_value_t = 100)]
    pub steps_per_unit: usize,
    #[arg(long, value_enum, default_value = "open")]
    pub boundary: BoundaryArg,
    /// Device calibration JSON; fills the `noisy` column.
    #[arg(long)]
    pub noise: Option<PathBuf>,
    /// Estimate the noisy column from this many samples per time point.
    #[arg(long, requires = "noise")]
    pub shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VqeArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub coupling: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub field: f64,
    #[arg(long, default_value_t = 3)]
    pub layers: usize,
    #[arg(long, default_value_t = 500)]
    pub max_evals: usize,
    /// Simplex restarts from the best point; the budget is shared.
    #[arg(long, default_value_t = 2)]
    pub restarts: usize,
    /// Initial simplex edge length, radians.
    #[arg(long, default_value_t = 0.8)]
    pub step: f64,
    #[arg(long, value_enum, default_value = "open")]
    pub boundary: BoundaryArg,
    /// Estimate energies from this many samples per measurement basis.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Device calibration JSON; runs on the density-matrix engine.
    #[arg(long)]
    pub noise: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory of `.qasm` files.
    #[arg(long, required_unless_present = "ghz", conflicts_with = "ghz")]
    pub dir: Option<PathBuf>,
    /// GHZ ladder over an inclusive qubit range, e.g. `18-24`.
    #[arg(long)]
    pub ghz: Option<String>,
    #[arg(long, value_enum, default_value = "sv")]
    pub engine: EngineArg,
    #[arg(long, default_value_t = 5)]
    pub repeat: usize,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => commands::run(a),
        Command::Tfim(a) => commands::tfim(a),
        Command::Vqe(a) => commands::vqe(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qsim: error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
