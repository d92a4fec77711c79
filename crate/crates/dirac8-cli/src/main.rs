//! `dirac8` — reproducible, config-driven runs of the eight-component
//! Dirac-type toolkit.
//!
//! One config file carries the whole run; flags exist only for the output
//! directory, the command, and point overrides.  Exit codes: 0 success,
//! 1 check failure, 2 configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use dirac8_cli::config::{Command, RunConfig};
use dirac8_cli::error::EXIT_CONFIG_ERROR;

#[derive(Parser)]
#[command(
    name = "dirac8",
    about = "Eight-component Dirac-type equation toolkit",
    long_about = "Verification, spectral classification, exact time evolution, and \
                  discrete-symmetry search for the eight-component Dirac-type equation.\n\
                  All run parameters live in a TOML config (see docs/config.md); the \
                  resolved config is echoed beside the outputs and reproduces the run \
                  byte-identically."
)]
struct Cli {
    /// Run mode; overrides the `command` field of the config.
    #[arg(value_enum)]
    command: Option<Command>,
    /// Path to the TOML run configuration (defaults apply when omitted).
    #[arg(long, short = 'c')]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.directory` (default "dirac8-out").
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
    /// Point override `key=value` with dotted keys (e.g. `--set mass=2.0`,
    /// `--set grid.n=64`, `--set tolerances.poincare.h_squared=1e-20`).
    /// May be repeated; applied in order after the config file is read.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn parse_overrides(raw: &[String]) -> Result<Vec<(String, String)>, String> {
    raw.iter()
        .map(|item| {
            item.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| format!("--set expects KEY=VALUE (got {item:?})"))
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = match parse_overrides(&cli.set) {
        Ok(o) => o,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(EXIT_CONFIG_ERROR as u8);
        }
    };
    let loaded = match &cli.config {
        Some(path) => RunConfig::load(path, &overrides),
        None => RunConfig::from_toml("", &overrides),
    };
    let mut cfg = match loaded {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    if let Some(command) = cli.command {
        cfg.command = command;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output.directory.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("dirac8-out"));
    match dirac8_cli::run::execute(&cfg, &out) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
