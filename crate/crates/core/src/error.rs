//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Inputs violate a structural precondition (dimension mismatch, empty
    /// keep set, invalid basis index, ...).
    #[error("structural error: {0}")]
    Structure(String),

    /// A measurement outcome sent a state to the zero vector, so the
    /// transformation is not deterministic for the whole set.
    #[error("state {state} annihilated by outcome {outcome}")]
    AnnihilatedState { state: String, outcome: String },

    /// A grouped-party projection produced a vector that is no longer a
    /// product across the group.
    #[error("outcome {outcome} breaks the product structure of state {state}")]
    NonProductResult { state: String, outcome: String },

    /// A protocol tree violates its invariants (incomplete measurement,
    /// missing outcome branch, unknown party).
    #[error("malformed protocol tree: {0}")]
    MalformedTree(String),

    /// An assignment enumeration would exceed the configured guard.
    #[error("enumeration of {assignments} assignments exceeds the guard of {guard}")]
    EnumerationTooLarge { assignments: u128, guard: u128 },

    /// A text-format input could not be parsed.
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
