// SPDX-License-Identifier: Apache-2.0

//! `qbm`: run quantum Brownian motion experiments from TOML configs.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical failure.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<qbm_core::Error> for CliError {
    fn from(e: qbm_core::Error) -> Self {
        use qbm_core::Error::*;
        match e {
            InvalidParameter { .. }
            | DimensionMismatch { .. }
            | WrongKind { .. }
            | SuperoperatorTooLarge { .. }
            | StabilityBound { .. }
            | ExponentRange { .. } => CliError::Config(e.to_string()),
            NonFinite(_)
            | InvalidState(_)
            | Quadrature { .. }
            | StepSizeUnderflow { .. }
            | DegenerateNullSpace { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "qbm", version, about = "Quantum Brownian motion experiments: propagation, coefficients, structure factor, Fokker-Planck")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a density matrix; writes evolve.csv and prints the positivity breach time.
    Evolve {
        /// TOML config with [hilbert], [generator], [integrator] and optional [state].
        config: PathBuf,
    },
    /// Microphysical diffusion and friction coefficients; writes coeffs.csv.
    Coeffs {
        /// TOML config with [gas], [tmatrix] and optional [hilbert] (mass, hbar).
        config: PathBuf,
    },
    /// Tabulate the ideal-gas dynamic structure factor; writes dsf.csv and sum-rule summaries.
    Dsf {
        /// TOML config with [gas] and [dsf].
        config: PathBuf,
    },
    /// Solve the classical velocity Fokker-Planck equation; writes fp.csv.
    Fp {
        /// TOML config with [fp].
        config: PathBuf,
    },
    /// Compare quantum and classical momentum-variance relaxation; writes compare.csv.
    Compare {
        /// TOML config with [hilbert] and [compare].
        config: PathBuf,
    },
}

fn run(command: Command) -> Result<(), CliError> {
    let (path, run): (PathBuf, fn(&config::RunConfig, &Path) -> Result<(), CliError>) = match command {
        Command::Evolve { config } => (config, commands::evolve),
        Command::Coeffs { config } => (config, commands::coeffs),
        Command::Dsf { config } => (config, commands::dsf),
        Command::Fp { config } => (config, commands::fp),
        Command::Compare { config } => (config, commands::compare),
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let cfg = config::RunConfig::parse(&text)?;
    run(&cfg, &path)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qbm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
