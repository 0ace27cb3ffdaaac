//! `spinrg`: runs original-versus-renormalized comparisons and writes CSV/JSON artifacts.

mod config;
mod error;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::ArtifactWriter;
use crate::run::{Command, Runner};

#[derive(Parser)]
#[command(name = "spinrg", version, about = "Block renormalization experiments on spin chains")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Paired time series and χ² for each N.
    Compare(RunArgs),
    /// χ² for each N plus exponential fits in N.
    Convergence(RunArgs),
    /// Normalized discrepancy ε(ΔH) for each N plus its fit.
    Epsilon(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment description.
    #[arg(long)]
    config: PathBuf,
    /// Permit chains longer than 20 spins.
    #[arg(long)]
    allow_large: bool,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execute(cmd: Command, args: RunArgs) -> Result<(), CliError> {
    let cfg = ExperimentConfig::from_path(&args.config)?;
    let dir = args
        .out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("spinrg-out"));
    let runner = Runner {
        cfg: &cfg,
        writer: ArtifactWriter::new(&dir)?,
        allow_large: args.allow_large,
    };
    runner.run(cmd)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, args) = match cli.command {
        Sub::Compare(a) => (Command::Compare, a),
        Sub::Convergence(a) => (Command::Convergence, a),
        Sub::Epsilon(a) => (Command::Epsilon, a),
    };
    match execute(cmd, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
