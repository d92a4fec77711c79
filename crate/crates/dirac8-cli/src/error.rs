//! CLI error type and the stable exit-code contract.

use thiserror::Error;

/// Exit code for a fully successful run.
pub const EXIT_OK: i32 = 0;
/// Exit code when the run completed but a check failed (verify failures,
/// unrealized symmetry arrows).
pub const EXIT_CHECK_FAILURE: i32 = 1;
/// Exit code for configuration or environment errors.
pub const EXIT_CONFIG_ERROR: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Toolkit(#[from] dirac8::Dirac8Error),
}

impl CliError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Every `CliError` is a configuration/environment problem; check
    /// failures are reported through `Ok(EXIT_CHECK_FAILURE)` instead.
    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG_ERROR
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
