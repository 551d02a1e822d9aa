//! Experiment runner for the `freecap` estimators.
//!
//! A run resolves its [`ExperimentConfig`], executes the named pipeline on a
//! rayon pool of the requested size, and writes
//! `<outdir>/<command>-<hash>/manifest.json` plus `data/*.csv`. Stochastic
//! outputs are functions of the resolved config alone, so the CSV files are
//! byte-identical across reruns and worker counts.

pub mod config;
mod error;
pub mod manifest;
pub mod run;

pub use config::{Command, ExperimentConfig};
pub use error::{CliError, Result};
pub use manifest::{execute, Manifest, OutputFile};

/// Environment variable holding the default output directory.
pub const OUTDIR_ENV: &str = "FREECAP_OUTDIR";
