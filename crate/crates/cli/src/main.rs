//! `cbleak`: runs dataset generation, evaluation, attack campaigns, leakage
//! estimation and parameter sweeps from a JSON experiment file.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Setup;
use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "cbleak", version, about = "Cancelable-biometrics attack and leakage experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the dataset and both keys.
    Gen(Common),
    /// Normal evaluation of the target system: θ, EER, FMR@ET.
    Eval(Common),
    /// Pre-image attack campaign: SAR and ΔFMR, per-identity CSV, traces.
    Attack(Common),
    /// Transition matrix and maximum leakage of the target system.
    Leakage(Common),
    /// Re-run eval (and optionally attack/leakage) over parameter values.
    Sweep(Common),
}

#[derive(clap::Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads; defaults to one per core.
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Replace every seed in the config with one derived from this value.
    #[arg(long, value_name = "INT")]
    seed_override: Option<u64>,
}

fn run(command: &Command) -> Result<(), CliError> {
    let (Command::Gen(common)
    | Command::Eval(common)
    | Command::Attack(common)
    | Command::Leakage(common)
    | Command::Sweep(common)) = command;

    if let Some(n) = common.workers {
        if n == 0 {
            return Err(CliError::config("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::runtime(e.to_string()))?;
    }

    let mut config = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed_override {
        config = config.with_seed_override(seed);
    }
    let out: PathBuf = match (&common.out, &config.output) {
        (Some(dir), _) => dir.clone(),
        (None, Some(dir)) => dir.clone(),
        (None, None) => return Err(CliError::config("no output directory: pass --out or set `output`")),
    };

    if let Command::Sweep(_) = command {
        let dataset = config.dataset.generate().map_err(CliError::from_setup)?;
        // Fail on a bad sweep section before anything is written.
        if config.sweep.as_ref().is_some_and(|s| s.values.is_empty()) {
            return Err(CliError::config("sweep.values must not be empty"));
        }
        commands::write_config(&out, &config)?;
        let rows = commands::cmd_sweep(&config, dataset, &out)?;
        return emit(&serde_json::to_string(&rows)?);
    }

    let setup = Setup::build(&config)?;
    if matches!(command, Command::Attack(_)) {
        config.ga_config()?;
    }
    commands::write_config(&out, &config)?;
    let summary = match command {
        Command::Gen(_) => {
            commands::cmd_gen(&setup, &out)?;
            serde_json::json!({ "samples": setup.dataset.len(), "out": out })
        }
        Command::Eval(_) => serde_json::to_value(commands::cmd_eval(&setup, &out)?)?,
        Command::Attack(_) => serde_json::to_value(commands::cmd_attack(&setup, &out)?)?,
        Command::Leakage(_) => {
            // The full input distribution is in leakage.json.
            let r = commands::cmd_leakage(&setup, &out)?;
            serde_json::json!({
                "lambda_max": r.lambda_max,
                "iterations": r.iterations,
                "converged": r.converged,
                "out": out,
            })
        }
        Command::Sweep(_) => unreachable!("handled above"),
    };
    emit(&summary.to_string())
}

/// Prints the summary line; a closed stdout (`| head`) is not an error.
fn emit(line: &str) -> Result<(), CliError> {
    match writeln!(std::io::stdout().lock(), "{line}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
