use thiserror::Error;

/// Errors raised by the certification library.
///
/// Outcomes that are legitimate answers (a point outside a set, an
/// inconsistent linear system, a failing constraint qualification) are
/// returned as values, never as errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },

    #[error("variable x{index} is out of range for a problem with {n} variables")]
    VariableOutOfRange { index: usize, n: usize },

    #[error("point is not contained in the set")]
    NotInSet,

    #[error("point is infeasible for the problem")]
    Infeasible,

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} exceeds the configured cap ({requested} > {cap})")]
    ResourceCap {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
