//! Library surface of the command-line front end: the experiment config
//! format and the command implementations, kept separate from the binary
//! so tests and fuzz targets can drive them directly.

pub mod commands;
pub mod config;

/// Exit codes are a stable contract for scripting: 0 success, 1 usage
/// error, 2 input-data error.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message())
    }
}

impl std::error::Error for CliError {}
