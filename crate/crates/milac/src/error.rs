//! Error type shared across the library.

use thiserror::Error;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by the simulator and its numerical kernel.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Operand shapes are incompatible for the requested operation.
    #[error("shape mismatch in {op}: left is {lhs_rows}x{lhs_cols}, right is {rhs_rows}x{rhs_cols}")]
    Shape {
        op: &'static str,
        lhs_rows: usize,
        lhs_cols: usize,
        rhs_rows: usize,
        rhs_cols: usize,
    },

    /// A matrix is singular to working precision. `pivot_index` is the
    /// elimination column whose pivot fell below the tolerance, and `what`
    /// names the matrix or expression being factorized.
    #[error("singular matrix in {what}: pivot {pivot_index} below tolerance")]
    Singular { what: String, pivot_index: usize },

    /// A matrix required to be Hermitian positive definite is not.
    #[error("{what} is not Hermitian positive definite")]
    NotHermitianPd { what: String },

    /// A computation produced non-finite values.
    #[error("non-finite values produced by {op}")]
    NonFinite { op: &'static str },

    /// A scalar or structural parameter is out of its valid range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An experiment or file configuration is invalid.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A serialized network file could not be parsed.
    #[error("network format error: {0}")]
    NetworkFormat(String),

    /// Too many Monte-Carlo redraws were needed for a single trial.
    #[error("trial exceeded redraw limit ({0} redraws); channel ensemble looks numerically ill-posed")]
    RedrawLimit(usize),
}

impl Error {
    /// Re-label a singularity error with the name of the enclosing
    /// expression, leaving other errors untouched.
    pub(crate) fn named(self, what: &str) -> Error {
        match self {
            Error::Singular { pivot_index, .. } => Error::Singular {
                what: what.to_string(),
                pivot_index,
            },
            other => other,
        }
    }
}
