use thiserror::Error;

/// Errors produced by the generators, solvers and experiments.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its legal range.
    #[error("invalid parameter `{field}`: {reason}")]
    Parameter { field: &'static str, reason: String },

    /// An input violated an operation's precondition, or a checked
    /// inequality that must hold unconditionally did not.
    #[error("contract violation: {0}")]
    Contract(String),

    /// An index was outside `0..len`.
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    /// The QL iteration did not converge. Carries the unreduced
    /// tridiagonal block `(diagonal, off-diagonal)` it was working on.
    #[error("eigensolver did not converge after {sweeps} sweeps on block {start}..{end}")]
    NonConvergence {
        sweeps: usize,
        start: usize,
        end: usize,
        diagonal: Vec<f64>,
        off_diagonal: Vec<f64>,
    },

    /// Malformed text input.
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
