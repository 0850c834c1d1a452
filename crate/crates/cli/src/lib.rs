//! Command-line harness around `superlab-core`: threshold sweeps, pulse runs
//! and probe spectra driven by flat `key = value` configuration files.

use std::collections::BTreeMap;
use std::path::PathBuf;

pub mod config;
pub mod plot;
pub mod run;

pub use config::{Config, ConfigError};
pub use run::{run_pulse, run_spectrum, run_sweep, validate_config, Mode, ModelKind, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Threshold,
    Pulse,
    Spectrum,
    Validate,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Threshold => "threshold",
            Command::Pulse => "pulse",
            Command::Spectrum => "spectrum",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] superlab_core::Error),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub plot: bool,
    /// Worker threads; `None` uses every core.
    pub jobs: Option<usize>,
}

/// Files written by a run and how many of its points failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub total_points: usize,
    pub failed_points: usize,
    pub summary: BTreeMap<String, f64>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.failed_points > 0 {
            4
        } else {
            0
        }
    }
}

/// Runs `command` on the configuration at `path`.
pub fn execute(command: Command, path: &std::path::Path, opts: &RunOptions) -> Result<Outcome, CliError> {
    if command == Command::Validate {
        validate_config(path)?;
        return Ok(Outcome { outputs: Vec::new(), total_points: 0, failed_points: 0, summary: BTreeMap::new() });
    }
    let cfg = Config::from_file(path)?;
    match command {
        Command::Threshold => run_sweep(&cfg, path, opts),
        Command::Pulse => run::run_pulse(&cfg, path, opts),
        Command::Spectrum => run::run_spectrum(&cfg, path, opts),
        Command::Validate => unreachable!(),
    }
}
