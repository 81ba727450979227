use std::fmt;

use qutrit_core::Error as CoreError;

/// Errors surfaced by the harness. `exit_code` maps them onto the
/// binary's exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Exit status class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitClass {
    /// No solution, unsolvable input or bad arguments.
    Unsolvable = 1,
    /// A checked invariant failed.
    InvariantBreach = 2,
}

impl CliError {
    pub fn input(msg: impl fmt::Display) -> Self {
        CliError::Input(msg.to_string())
    }

    pub fn exit_class(&self) -> ExitClass {
        match self {
            CliError::Core(CoreError::InvariantBreach(_))
            | CliError::Core(CoreError::NoReduction { .. }) => ExitClass::InvariantBreach,
            _ => ExitClass::Unsolvable,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.exit_class() as i32
    }
}
