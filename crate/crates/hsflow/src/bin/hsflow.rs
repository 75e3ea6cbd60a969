//! Command-line front end: `hsflow --config scenario.json --out results/`.

use clap::Parser;
use hsflow::cli::{self, CliError, ScenarioConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Closed-form Hunter-Saxton solver and transport-metric scenarios.
#[derive(Debug, Parser)]
#[command(name = "hsflow", version)]
struct Args {
    /// Path to the JSON scenario config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's out_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed recorded in the report; outputs are deterministic regardless.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(text) => text,
        Err(err) => {
            eprintln!("error: cannot read {}: {err}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let config = match ScenarioConfig::from_json(&text) {
        Ok(config) => config,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };
    let out_dir = match args.out.or_else(|| config.out_dir.as_ref().map(PathBuf::from)) {
        Some(dir) => dir,
        None => {
            eprintln!("error: no output directory (use --out or out_dir in the config)");
            return ExitCode::from(2);
        }
    };
    match cli::run(&config, &out_dir, args.seed) {
        Ok(report) if report.passed => ExitCode::SUCCESS,
        Ok(report) => {
            let failed: Vec<&str> = report
                .flags
                .iter()
                .filter(|(_, ok)| !**ok)
                .map(|(name, _)| name.as_str())
                .collect();
            eprintln!("contract failure: {}", failed.join(", "));
            ExitCode::from(1)
        }
        Err(CliError::ConfigInvalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
