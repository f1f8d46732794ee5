use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CdError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: u32, right: u32 },

    #[error("basis index e{index} does not exist at level {level}")]
    IndexOutOfRange { index: usize, level: u32 },

    #[error("{op} requires level >= {min}, got {level}")]
    LevelTooLow { op: &'static str, min: u32, level: u32 },

    #[error("{0} requires a pure element")]
    NotPure(&'static str),

    #[error("{0} requires a doubly pure element")]
    NotDoublyPure(&'static str),

    #[error("{0} requires a nonzero element")]
    ZeroElement(&'static str),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CdError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            CdError::Parse(_) => 2,
            CdError::LevelMismatch { .. } | CdError::IndexOutOfRange { .. } => 3,
            CdError::LevelTooLow { .. }
            | CdError::NotPure(_)
            | CdError::NotDoublyPure(_)
            | CdError::ZeroElement(_)
            | CdError::Precondition(_) => 4,
            CdError::Numerical(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, CdError>;
