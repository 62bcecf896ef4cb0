use std::process::ExitCode;

use serde_json::{json, Value};

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit 1: the input was well-formed but a check failed.
    Verification { message: String, detail: Value },
    /// Exit 2: bad flags, unreadable or malformed input.
    Usage(String),
    /// Exit 3: a library invariant broke.
    Internal(String),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn verification(message: impl Into<String>, detail: Value) -> Self {
        CliError::Verification {
            message: message.into(),
            detail,
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError::Internal(message.into())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Verification { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    /// Writes the JSON diagnostic to stderr and returns the exit code.
    pub fn report(&self) -> ExitCode {
        let body = match self {
            CliError::Verification { message, detail } => json!({
                "error": {"kind": "verification", "message": message, "detail": detail}
            }),
            CliError::Usage(message) => json!({
                "error": {"kind": "usage", "message": message}
            }),
            CliError::Internal(message) => json!({
                "error": {"kind": "internal", "message": message}
            }),
        };
        eprintln!("{body}");
        ExitCode::from(self.code())
    }
}
