use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use covert_sim::scenario::config::{validate_config, ConfigError};
use covert_sim::scenario::{load_config, run_scenario_with_threads, ScenarioKind};
use covert_sim::Error;

/// Deterministic Monte-Carlo runner for covert-communication scenarios.
#[derive(Parser)]
#[command(name = "covert-sim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write its CSV tables
    Run {
        /// TOML scenario config
        config: PathBuf,
        /// Directory for the CSV tables (created if missing)
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the config's root seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's trial count
        #[arg(long)]
        trials: Option<u32>,
        /// Worker threads (default: one per core)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Parse and validate a config without running it
    Validate {
        /// TOML scenario config
        config: PathBuf,
    },
    /// List the available scenario kinds
    ListScenarios,
}

// Exit codes: 0 success, 2 validation failure, 3 I/O failure. Clap's own
// usage errors also exit with 2.
const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 3;

fn config_error_code(e: &ConfigError) -> u8 {
    match e {
        ConfigError::Io { .. } => EXIT_IO,
        _ => EXIT_VALIDATION,
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Config(c) => config_error_code(c),
        _ => EXIT_VALIDATION,
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), (u8, String)> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            trials,
            threads,
        } => run(&config, &out, seed, trials, threads),
        Command::Validate { config } => validate(&config),
        Command::ListScenarios => {
            for kind in ScenarioKind::ALL {
                println!("{:<16} {}", kind.name(), kind.description());
            }
            Ok(())
        }
    }
}

fn run(
    config_path: &Path,
    out_dir: &Path,
    seed: Option<u64>,
    trials: Option<u32>,
    threads: Option<usize>,
) -> Result<(), (u8, String)> {
    let mut cfg =
        load_config(config_path).map_err(|e| (config_error_code(&e), e.to_string()))?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(trials) = trials {
        cfg.trials = trials;
    }
    validate_config(&cfg).map_err(|e| (config_error_code(&e), e.to_string()))?;

    let outcome = run_scenario_with_threads(&cfg, threads)
        .map_err(|e| (error_code(&e), e.to_string()))?;

    std::fs::create_dir_all(out_dir).map_err(|e| {
        (
            EXIT_IO,
            format!("cannot create output directory {}: {e}", out_dir.display()),
        )
    })?;
    let mut written = Vec::new();
    for (name, contents) in std::iter::once((&outcome.primary_name, &outcome.primary_csv))
        .chain(outcome.aux.iter().map(|(n, c)| (n, c)))
    {
        let path = out_dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| (EXIT_IO, format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }

    println!("{}", outcome.summary);
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn validate(config_path: &Path) -> Result<(), (u8, String)> {
    let cfg = load_config(config_path).map_err(|e| (config_error_code(&e), e.to_string()))?;
    println!(
        "ok: scenario {} (seed {}, trials {})",
        cfg.scenario.name(),
        cfg.seed,
        cfg.trials
    );
    Ok(())
}
