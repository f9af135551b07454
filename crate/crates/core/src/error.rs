use thiserror::Error;

use crate::condition::ConditionId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A user-supplied parameter is outside its documented range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The argument sits on a pole of the q-gamma function.
    #[error("q-gamma pole: argument `{name}` = {value} is a non-positive integer")]
    Pole { name: &'static str, value: f64 },

    /// Two operands were built from different parameters.
    #[error("mismatched parameter `{name}`: {left} vs {right}")]
    MismatchedParameter {
        name: &'static str,
        left: f64,
        right: f64,
    },

    #[error("index `{name}` = {index} is out of range (must be < {bound})")]
    Index {
        name: &'static str,
        index: usize,
        bound: usize,
    },

    /// Exhaustive subset enumeration was asked for more rows than the cap allows.
    #[error("`row_limit` = {requested} exceeds the exhaustive enumeration cap of {cap}")]
    Limit { requested: usize, cap: usize },

    /// A series over matrix rows cannot be truncated at the window edge.
    #[error(
        "row {row} of the matrix does not decay inside the window (tail mass {tail:e} > allowed {allowed:e}); \
         raise `tail_rtol` or supply a finitely supported matrix"
    )]
    Tail { row: usize, tail: f64, allowed: f64 },

    #[error("condition {condition} is not available here: {reason}")]
    InvalidCondition {
        condition: ConditionId,
        reason: String,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
