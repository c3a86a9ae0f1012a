use std::fmt;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid weight sequence: {0}")]
    InvalidWeights(String),

    #[error("weights must be strictly positive (p_{index} = {value})")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error(transparent)]
    Syntax(#[from] SyntaxError),

    #[error("evaluation error at (m, n) = ({m}, {n}): {kind}")]
    Evaluation { m: usize, n: usize, kind: EvalFailure },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degenerate window at (m, n) = ({m}, {n}), lambda = {lambda}")]
    DegenerateWindow { m: usize, n: usize, lambda: f64 },

    #[error("flat weights on window at (m, n) = ({m}, {n}), lambda = {lambda}")]
    FlatWeights { m: usize, n: usize, lambda: f64 },

    #[error("index ({m}, {n}) outside table horizon ({max_m}, {max_n})")]
    OutOfRange { m: usize, n: usize, max_m: usize, max_n: usize },

    #[error("unknown theorem: {0}")]
    UnknownTheorem(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalFailure {
    DivisionByZero,
    NonFinite,
}

impl fmt::Display for EvalFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalFailure::DivisionByZero => f.write_str("division by zero"),
            EvalFailure::NonFinite => f.write_str("non-finite value"),
        }
    }
}

/// Parse failure in the sequence expression language.
///
/// `column` is 1-based; end of input reports `len + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at column {column}: {message} (expected {})", .expected.join(" | "))]
pub struct SyntaxError {
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}
