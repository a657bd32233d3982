//! `rae`: dataset generation, estimation, sweeps and schedule planning.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ExperimentConfig, Overrides};
use error::CliError;

#[derive(Parser)]
#[command(name = "rae", version, about = "Robust amplitude estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one parity dataset per Hamiltonian term.
    Generate(Common),
    /// Estimate expectations from dataset files, with bootstrap errors and verdicts.
    Estimate {
        #[command(flatten)]
        common: Common,
        /// Dataset files written by `generate`.
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Accept datasets produced under different configurations.
        #[arg(long)]
        force: bool,
    },
    /// Per-term RMSE, Cramér-Rao bound and verdict for each sweep index.
    Sweep(Common),
    /// Energy RMSE against the direct-sampling baseline for each sweep index.
    Energy(Common),
    /// Fit the noise rate per depth; simulates curves when no files are given.
    FitLambda {
        #[command(flatten)]
        common: Common,
        files: Vec<PathBuf>,
    },
    /// Print a layer schedule, its query cost and its CRB curve.
    Schedule(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// one_qubit, two_qubit or a Hamiltonian JSON file.
    #[arg(long)]
    hamiltonian: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// lis, eis, poly(d) or nris(c).
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    i_max: Option<u32>,
    /// Shots per circuit.
    #[arg(long)]
    shots: Option<u64>,
    /// Bootstrap replicates.
    #[arg(long)]
    bootstrap: Option<usize>,
    /// Master seed; falls back to RAE_SEED.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid_pi: Option<usize>,
    #[arg(long)]
    grid_lambda: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    lambda_max: Option<f64>,
    /// Noise-robust schedule hyperparameter.
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    /// Prior expectation value (schedule planning).
    #[arg(long, allow_negative_numbers = true)]
    pi: Option<f64>,
    /// Polish grid maxima with a local search.
    #[arg(long)]
    refine: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record the wall-clock time in JSON outputs (makes them non-reproducible).
    #[arg(long)]
    timestamp: bool,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let flags = Overrides {
            hamiltonian: self.hamiltonian.clone(),
            theta: self.theta,
            lambda: self.lambda,
            schedule: self.schedule.clone(),
            i_max: self.i_max,
            n_shots: self.shots,
            m_bootstrap: self.bootstrap,
            seed: self.seed,
            grid_pi: self.grid_pi,
            grid_lambda: self.grid_lambda,
            lambda_max: self.lambda_max,
            refine: self.refine,
            c: self.c,
            pi: self.pi,
            out: self.out.clone(),
        };
        ExperimentConfig::resolve(self.config.as_deref(), flags, std::env::var("RAE_SEED").ok())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(c) => commands::generate(&c.resolve()?, c.timestamp),
        Command::Estimate { common, files, force } => {
            commands::estimate(&common.resolve()?, &files, force, common.timestamp)
        }
        Command::Sweep(c) => commands::sweep(&c.resolve()?, c.timestamp),
        Command::Energy(c) => commands::energy(&c.resolve()?, c.timestamp),
        Command::FitLambda { common, files } => commands::fit_lambda(&common.resolve()?, &files, common.timestamp),
        Command::Schedule(c) => commands::schedule(&c.resolve()?, c.timestamp),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
