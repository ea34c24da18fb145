//! Command-line runner for the curved-beam dynamics laboratory.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.
//! Failures print a machine-readable JSON object to stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bresse_cli::config::{self, parse_config, ExperimentKind};
use bresse_cli::run::{execute, RunContext, RunError};

#[derive(Parser)]
#[command(name = "bresse", version, about = "Curved-beam dynamics laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides output.dir from the config.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads for ensemble and sweep runs.
    #[arg(long)]
    workers: Option<usize>,
    /// Seed override for all configured randomness.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the configured system and export the energy ledger.
    Simulate(Common),
    /// Enumerate stationary states and check the stationary-set bound.
    Equilibria(Common),
    /// Integrate, then fit the total-energy decay.
    DecayFit(Common),
    /// Compare curved runs against the flat system as curvature shrinks.
    SingularLimit(Common),
    /// Semidistance table of projected attractor samples vs the flat one.
    Semicontinuity(Common),
    /// Fit the two-trajectory stabilizability inequality.
    Quasistability(Common),
    /// Screen the structural hypotheses and the discretization.
    Verify(Common),
}

impl Command {
    fn split(&self) -> (ExperimentKind, &Common) {
        match self {
            Command::Simulate(c) => (ExperimentKind::Simulate, c),
            Command::Equilibria(c) => (ExperimentKind::Equilibria, c),
            Command::DecayFit(c) => (ExperimentKind::DecayFit, c),
            Command::SingularLimit(c) => (ExperimentKind::SingularLimit, c),
            Command::Semicontinuity(c) => (ExperimentKind::Semicontinuity, c),
            Command::Quasistability(c) => (ExperimentKind::Quasistability, c),
            Command::Verify(c) => (ExperimentKind::Verify, c),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = cli.command.split();
    match try_run(kind, common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn try_run(kind: ExperimentKind, common: &Common) -> Result<(), RunError> {
    let text = std::fs::read_to_string(&common.config).map_err(|e| {
        RunError::Config(vec![config::ConfigIssue {
            path: common.config.display().to_string(),
            message: format!("cannot read config: {e}"),
        }])
    })?;
    let mut cfg = parse_config(&text).map_err(RunError::Config)?;
    if let Some(seed) = common.seed {
        cfg.experiment.seed = seed;
    }
    let out_dir = common.output.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));

    if let Some(workers) = common.workers {
        // ignore failure when a pool is already installed (tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }

    execute(kind, &cfg, &RunContext { out_dir, workers: common.workers })
}
