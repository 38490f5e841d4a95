//! Command-line front end for the tamed Euler experiments.

pub mod config;
pub mod run;

use clap::{Args, Parser, Subcommand};

use config::CommonArgs;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] tamed_euler::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 for bad input, 2 for a numerical anomaly during the run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_runtime_anomaly() => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tamed-euler",
    version,
    about = "Tamed Euler experiments for SDEs with singular drift"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Strong error per level against a fine tamed reference, with a log-log rate fit.
    Convergence(RunArgs),
    /// Inverse moments of the distance to the singular set along tamed paths.
    Moments(RunArgs),
    /// Fraction of tamed paths that reach the taming threshold.
    Stopping(RunArgs),
    /// Plain versus tamed Euler: paths leaving the domain or going non-finite.
    Diverge(RunArgs),
    /// Sample the structural assumptions on the drift.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Moment order of the estimator.
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Repulsive Lennard-Jones exponent.
    #[arg(long)]
    pub p: Option<f64>,

    /// Attractive Lennard-Jones exponent.
    #[arg(long)]
    pub q: Option<f64>,

    /// Sampled pairs per assumption.
    #[arg(long)]
    pub pairs: Option<usize>,
}
