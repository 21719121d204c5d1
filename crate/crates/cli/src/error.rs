use std::fmt;
use std::path::Path;

use osccomp_core::Error as CoreError;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    /// Unparsable or invalid input, missing files, empty argument lists.
    pub const USAGE: u8 = 2;
    /// An iterate left the guard box; the manifest is still written.
    pub const DIVERGED: u8 = 3;
    /// The oracle produced a non-finite value.
    pub const NUMERIC: u8 = 4;
    /// A diagnostic needs every iterate but the trajectory is thinned.
    pub const THINNED: u8 = 5;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(exit::USAGE, message)
    }

    pub fn io(path: &Path, e: impl fmt::Display) -> Self {
        Self::usage(format!("{}: {e}", path.display()))
    }

    /// Prefixes the message, keeping the exit code.
    pub fn context(mut self, what: impl fmt::Display) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::NonFinite { .. } => exit::NUMERIC,
            CoreError::Thinned { .. } => exit::THINNED,
            _ => exit::USAGE,
        };
        Self::new(code, e.to_string())
    }
}
