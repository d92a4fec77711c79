//! Library surface of the `dirac8` command-line tool: config parsing,
//! artifact writers, and the four command runners.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::{Command, RunConfig};
pub use error::{CliError, EXIT_CHECK_FAILURE, EXIT_CONFIG_ERROR, EXIT_OK};
pub use run::execute;
