//! Config-driven experiment runner behind the `online-fw` binary.

mod args;
mod config;
mod runner;

pub use args::{default_output, resolve, Cli, Command, FileConfig, RunArgs};
pub use config::{AlgorithmKind, Experiment, Pattern, RunConfig};
pub use runner::{
    build_stream, run, run_on_stream, run_seeds, seed_output_path, validate_csv, RunReport,
};
