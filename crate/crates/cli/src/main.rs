//! `rotating-euler <subcommand> [--config cfg.json] [--out out.csv]`
//!
//! Exit codes: 0 success, 1 a pass/fail gate failed (`optimal-decay`,
//! `selftest`), 2 invalid input, 3 numerical failure.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

use commands::{CliError, CliResult, Outcome};
use config::*;

#[derive(Parser, Debug)]
#[command(name = "rotating-euler", version, about = "Dispersion, decay and lifespan labs for the rotating compressible Euler system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config; every key has a default.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// CSV output path; stdout if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads. Changes speed only, never results.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the config seed for randomized data.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Σ, Ω and the Hessian determinants over a frequency lattice.
    DispersionTable,
    /// Isometry and round trip of the mode transform on random fields.
    TransformCheck,
    /// Fitted sup-norm decay exponents.
    Decay,
    /// Mixed space-time norms against the Strichartz bound.
    Strichartz,
    /// Localized kernel by quadrature.
    Kernel,
    /// The explicit decay example and its lower bound; exits 1 if any value falls below.
    OptimalDecay,
    /// One nonlinear run, one row per step.
    Simulate,
    /// Lifespans over a decreasing list of eps.
    LifespanSweep,
    /// Fast invariant checks; exits 1 on failure.
    Selftest,
}

fn load<T: DeserializeOwned + Default>(path: &Option<PathBuf>) -> CliResult<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<Outcome> {
    let c = &cli.config;
    match cli.command {
        Command::DispersionTable => commands::dispersion_table(&load(c)?),
        Command::TransformCheck => {
            let mut cfg: TransformCheck = load(c)?;
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            commands::transform_check(&cfg)
        }
        Command::Decay => commands::decay(&load(c)?),
        Command::Strichartz => commands::strichartz(&load(c)?),
        Command::Kernel => commands::kernel(&load(c)?),
        Command::OptimalDecay => commands::optimal(&load(c)?),
        Command::Simulate => {
            let mut cfg: Simulate = load(c)?;
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            commands::run_simulation(&cfg)
        }
        Command::LifespanSweep => {
            let mut cfg: LifespanSweep = load(c)?;
            cfg.run.seed = cli.seed.unwrap_or(cfg.run.seed);
            commands::lifespan(&cfg)
        }
        Command::Selftest => {
            let mut cfg: Selftest = load(c)?;
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            commands::selftest(&cfg)
        }
    }
}

fn run(cli: &Cli) -> CliResult<bool> {
    let out = dispatch(cli)?;
    out.report
        .write(cli.out.as_deref())
        .map_err(|e| CliError::Validation(format!("cannot write output: {e}")))?;
    Ok(out.gate)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("gate failed; see the report");
            ExitCode::from(1)
        }
        Err(CliError::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}
