//! Configuration, dispatch and file output for the `cmjtree` binary.

mod args;
mod config;
mod error;
mod run;
mod tables;

pub use args::Cli;
pub use config::{parse_spec, Command, ExperimentConfig, GrowthModel};
pub use error::{ConfigError, RunError};
pub use run::{run, RunOutput};

/// Crate version plus `git describe` of the build.
pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (", env!("CMJTREE_GIT_DESCRIBE"), ")");

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CMJTREE_OUT_DIR";
