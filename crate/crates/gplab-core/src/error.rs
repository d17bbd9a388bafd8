//! Error type shared by every module in the crate.
//!
//! Precision-related failures (`IndeterminateFloor`, `IndeterminateComparison`)
//! are ordinary error values, never silent roundings: the caller decides
//! whether to retry with a larger bit budget.

use thiserror::Error;

/// Crate-wide error enumeration.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// An enclosure still straddles an integer at the maximal precision.
    #[error("floor undecided at {max_bits} bits{}", path_suffix(.path))]
    IndeterminateFloor {
        max_bits: u32,
        /// Path of child indices into the offending subexpression, if known.
        path: Option<String>,
    },

    /// Two values could not be separated at the maximal precision.
    #[error("comparison undecided at {max_bits} bits")]
    IndeterminateComparison { max_bits: u32 },

    #[error("syntax error at byte {offset}: {message}")]
    SyntaxError { offset: usize, message: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    /// No sup-bound certificate could be produced for an expansion coefficient.
    #[error("unbounded coefficient in polynomial expansion")]
    UnboundedCoefficient,

    #[error("no degree assigned to leaf {0}")]
    MissingGrade(u32),

    #[error("index set is not downward closed: missing {0}")]
    NotDownwardClosed(String),

    /// Matrix reconstruction from an (x, T_k(x)) pair produced a non-integer.
    #[error("inconsistent point pair: reconstructed entry is not an integer")]
    InconsistentPair,

    #[error("matrix is not strictly lower triangular")]
    NotStrictlyLower,

    #[error("matrix is not unipotent")]
    NotUnipotent,

    #[error("matrix scale is 1; use the unipotent routines")]
    ScaleIsOne,

    #[error("diagonal entries are not consistent powers of a single scale")]
    InconsistentDiagonal,

    /// Degrees along a descending chain must be pairwise distinct.
    #[error("repeated degree on a chain")]
    RepeatedDegreeOnChain,

    #[error("composed polynomial degree {got} exceeds cap {cap}")]
    DegreeOverflow { got: usize, cap: usize },

    #[error("normalized coefficient sequence does not converge to the stated limit")]
    NonConvergentCoefficients,

    #[error("tail start {0} leaves no points")]
    EmptyTail(usize),

    /// An experiment premise failed on the requested window.
    #[error("premise violated at n = {0}")]
    PremiseViolated(u64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("{0}")]
    InvalidInput(String),
}

fn path_suffix(path: &Option<String>) -> String {
    match path {
        Some(p) => format!(" (subexpression {p})"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Attach a subexpression path to an indeterminate-floor error.
    pub fn with_path(self, p: String) -> Self {
        match self {
            Error::IndeterminateFloor { max_bits, .. } => Error::IndeterminateFloor {
                max_bits,
                path: Some(p),
            },
            other => other,
        }
    }
}
