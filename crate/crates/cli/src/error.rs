//! CLI error type mapping every failure onto the two documented exit
//! codes: 2 for configuration problems, 3 for numerical failures.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config file, unreadable inputs, invalid parameter
    /// combinations. Exit code 2.
    Config(String),
    /// The pipeline ran but a numerical stage failed: solver breakdown,
    /// accuracy not reached, band coverage, aliasing. Exit code 3.
    Numerical(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<revival_core::Error> for CliError {
    fn from(e: revival_core::Error) -> Self {
        use revival_core::Error::*;
        match e {
            InvalidArgument(_) | InconsistentInput(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("io: {e}"))
    }
}
