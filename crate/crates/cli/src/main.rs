//! `bancoex` — configuration-driven coexistence experiments.
//!
//! Subcommands: `synth` writes synthetic channel traces for every link a
//! scenario requires; `run` replays the TDMA schedule over the traces and
//! emits per-scheme SINR series and packet logs; `stats` turns series into
//! outage/LCR/AOD curves, distribution fits, and independence summaries;
//! `report` bundles the per-variant results into plot-ready tables.
//!
//! Exit codes: 0 success, 1 configuration error, 2 data error.

mod commands;
mod config;
mod jobs;
mod layout;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bancoex", version, about = "WBAN coexistence simulator and statistics toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize channel trace CSVs for every required link.
    Synth(CommonArgs),
    /// Run the experiments and emit SINR series and packet logs.
    Run(CommonArgs),
    /// Compute outage/LCR/AOD curves, fits, and summaries from a run.
    Stats(CommonArgs),
    /// Aggregate per-figure CSV bundles from computed statistics.
    Report(CommonArgs),
}

#[derive(Args, Clone)]
pub struct CommonArgs {
    /// Experiment configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (created if absent).
    #[arg(long)]
    pub out: PathBuf,
    /// Master seed; overrides the configured one.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Analysis sets processed concurrently.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

/// CLI error split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments: exit code 1.
    Config(String),
    /// Bad or missing data: exit code 2.
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Data(m) => m,
        }
    }

    pub fn data(err: impl std::fmt::Display) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let benign = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return if benign { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    let result = match &cli.command {
        Command::Synth(args) => commands::synth::run(args),
        Command::Run(args) => commands::run::run(args),
        Command::Stats(args) => commands::stats::run(args),
        Command::Report(args) => commands::report::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
