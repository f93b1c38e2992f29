//! Command-line front end: `sweep`, `compare` and `plot`.
//!
//! Exit status is 0 on success, 1 for configuration errors and 2 for
//! failures while running or writing output.

pub mod config;
pub mod plot;
pub mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::experiment::{
    run_disparity_sweep, run_strategy_comparison, with_workers, ExperimentError, SimConfig,
};
pub use config::{parse_config, to_toml, ConfigError};
pub use plot::{emit_plots, PlotError};
pub use report::{emit_csv, CsvError};

pub const SWEEP_FILE: &str = "sweep.csv";
pub const COMPARISON_FILE: &str = "comparison.csv";
pub const RESOLVED_CONFIG_FILE: &str = "config.resolved.toml";

#[derive(Debug, Parser)]
#[command(
    name = "noma-sim",
    version,
    about = "Downlink NOMA channel-disparity simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep channel disparity for each QoS threshold with controlled placement.
    Sweep(RunArgs),
    /// Compare the configured clustering strategies.
    Compare(RunArgs),
    /// Draw rate, power and success charts from a sweep CSV.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Override the number of trials per grid point.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=u64::from(u32::MAX)))]
    pub trials: Option<u64>,
    /// Override the master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=1024))]
    pub workers: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Sweep CSV produced by `sweep`.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Power budget used by the run; powers are plotted as fractions of it.
    #[arg(long, default_value_t = 1.0)]
    pub budget: f64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error(transparent)]
    Plot(#[from] PlotError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Experiment(ExperimentError::InvalidConfig { .. }) => 1,
            _ => 2,
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn prepare_run(args: &RunArgs) -> Result<SimConfig, CliError> {
    let mut config = parse_config(&args.config)?;
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    std::fs::create_dir_all(&args.out).map_err(io_error(&args.out))?;
    let resolved = args.out.join(RESOLVED_CONFIG_FILE);
    std::fs::write(&resolved, to_toml(&config)).map_err(io_error(&resolved))?;
    Ok(config)
}

/// Runs one command and returns the files it wrote.
pub fn execute(command: &Command) -> Result<Vec<PathBuf>, CliError> {
    match command {
        Command::Sweep(args) => {
            let config = prepare_run(args)?;
            let workers = args.workers.map(|w| w as usize);
            let result = with_workers(workers, || run_disparity_sweep(&config))??;
            let path = args.out.join(SWEEP_FILE);
            emit_csv(&result, &path)?;
            Ok(vec![path])
        }
        Command::Compare(args) => {
            let config = prepare_run(args)?;
            let workers = args.workers.map(|w| w as usize);
            let rows = with_workers(workers, || run_strategy_comparison(&config))??;
            let path = args.out.join(COMPARISON_FILE);
            report::emit_comparison_csv(&rows, &path)?;
            Ok(vec![path])
        }
        Command::Plot(args) => {
            std::fs::create_dir_all(&args.out).map_err(io_error(&args.out))?;
            Ok(plot::emit_plots_with_budget(
                &args.input,
                &args.out,
                args.budget,
            )?)
        }
    }
}

/// Parses `std::env::args`, runs the command and maps errors to exit codes.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(paths) => {
            for path in paths {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
