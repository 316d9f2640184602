//! Error taxonomy shared across the crate.
//!
//! The variants map onto the CLI exit codes: configuration problems exit
//! with 2, numerical blow-up with 3, acceptance failures with 4.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates a documented constraint. `key` names the
    /// offending configuration key or argument.
    #[error("configuration error: {key}: {constraint}")]
    Config { key: String, constraint: String },

    /// An operation was called outside its contract (mismatched grids,
    /// asymmetric stress input, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// The time integration produced a non-finite or out-of-range state.
    #[error("numerical blow-up at t = {t}: {what}\n{diagnostic}")]
    BlowUp {
        t: f64,
        what: String,
        diagnostic: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed file: {0}")]
    Format(String),
}

impl Error {
    pub fn config(key: &str, constraint: impl Into<String>) -> Self {
        Error::Config {
            key: key.to_string(),
            constraint: constraint.into(),
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
