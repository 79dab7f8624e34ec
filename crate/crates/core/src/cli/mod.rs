//! Command-line front end: `constants | verify | sweep | search | oracle-check`.

mod commands;
mod config;
mod oracle;
mod output;

pub use commands::{
    cmd_constants, cmd_oracle_check, cmd_search, cmd_sweep, cmd_verify, exit_code, run_experiments,
    EXIT_BUDGET, EXIT_CONFIG, EXIT_GUARD, EXIT_OK, EXIT_VIOLATION,
};
pub use config::{
    CharacterizationRequest, ClassRequest, OracleCase, OracleConfig, RunConfig, SearchConfig,
    SweepConfig, WeightRequest,
};
pub use oracle::{run_oracle, OracleResult};
pub use output::{Envelope, SCHEMA_VERSION};

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "fracmax",
    version,
    about = "Mixed weak-type inequalities for multilinear fractional operators, checked on grids"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default: the config's "output", else ./out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Lift the fractional-integral work guard.
    #[arg(long, global = true)]
    pub override_guards: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Muckenhoupt-class constants with refinement verdicts.
    Constants,
    /// Theorem instances: reports, summary table, violation exit code.
    Verify,
    /// Full-factorial parameter sweep.
    Sweep,
    /// Seeded coordinate hill climb.
    Search,
    /// Fast paths against direct oracles.
    OracleCheck,
}

fn default_oracle_config() -> RunConfig {
    RunConfig::from_json(r#"{"grid": {"dim": 1, "half_width": 1.0, "cells": [64]}}"#)
        .expect("built-in config is valid")
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut config = match (&cli.config, cli.command) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Command::OracleCheck) => default_oracle_config(),
        (None, _) => return Err(Error::Config("--config <path> is required".into())),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn output_dir(cli: &Cli, config: &RunConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| config.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| Path::new("out").to_path_buf())
}

/// Run a parsed command line; returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let result = load(cli).and_then(|config| {
        let out = output_dir(cli, &config);
        match cli.command {
            Command::Constants => cmd_constants(&config, &out),
            Command::Verify => cmd_verify(&config, &out, cli.override_guards),
            Command::Sweep => cmd_sweep(&config, &out, cli.override_guards),
            Command::Search => cmd_search(&config, &out, cli.override_guards),
            Command::OracleCheck => cmd_oracle_check(&config, &out),
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Parse arguments and run.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
