//! `jjsim` command-line front end.
//!
//! Every subcommand reads one TOML file, applies `--set key=value`
//! overrides, computes, and writes its tables, plot data and a
//! `manifest.json` into the output directory. Exit codes: 0 success, 2 bad
//! input, 3 solver or I/O failure.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use error::CliError;

pub const OUTPUT_DIR_ENV: &str = "JJSIM_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    /// Frequencies in model units (ω_p for array modes).
    Model,
    /// Frequencies in rad/s where a physical scale exists.
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HolsteinVerb {
    Ground,
    Ramp,
    Scan,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Normal modes of a junction chain or complete network.
    Modes { config: PathBuf },
    /// Qubit/cavity Rabi trajectory and dressed-level spectroscopy.
    Qed { config: PathBuf },
    /// Holstein chain: sector ground states, adiabatic ramp or phase scan.
    Holstein {
        #[arg(value_enum)]
        verb: HolsteinVerb,
        config: PathBuf,
    },
}

#[derive(Debug, Parser)]
#[command(name = "jjsim", version, about = "Josephson-junction-array quantum simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Directory receiving all outputs.
    #[arg(long, global = true, env = OUTPUT_DIR_ENV, default_value = "jjsim-out")]
    pub output_dir: PathBuf,
    /// Seed for every stochastic choice (junction disorder).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Table format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true, value_enum, default_value_t = UnitSystem::Model)]
    pub units: UnitSystem,
    /// Worker threads for sweeps; 0 picks the machine default.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Overwrite existing outputs.
    #[arg(long, global = true)]
    pub force: bool,
    /// Override a config key, e.g. `--set ramp.steps=400`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub format: Format,
    pub unit_system: UnitSystem,
    pub worker_count: usize,
    pub force: bool,
    pub overrides: Vec<String>,
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        Self {
            command: c.command,
            output_dir: c.output_dir,
            seed: c.seed,
            format: c.format,
            unit_system: c.units,
            worker_count: c.workers,
            force: c.force,
            overrides: c.overrides,
        }
    }
}

impl RunConfig {
    pub fn input_path(&self) -> &PathBuf {
        match &self.command {
            Command::Modes { config } | Command::Qed { config } | Command::Holstein { config, .. } => config,
        }
    }
}

/// Paths written by a successful run, manifest last.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    commands::dispatch(config)
}

/// Parses arguments, runs, reports on stdout/stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli.into()) {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            for p in &report.written {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
