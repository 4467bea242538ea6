use thiserror::Error;

/// Errors raised by constructors and operations across the crate.
///
/// Mathematical outcomes (a rule failing a conservation check, an empty
/// coefficient range, a verification witness) are *values*, not errors;
/// this type covers contract violations only.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    InvalidDimension,
    #[error("grid side {0} is too small; every side must be at least 5")]
    InvalidSide(usize),
    #[error("cell coordinates are outside the grid")]
    InvalidCell,
    #[error("{{{0}, {1}}} is not a valid overlap pair")]
    InvalidPair(String, String),
    #[error("state {0} is not a member of the state set")]
    InvalidState(i64),
    #[error("invalid state set: {0}")]
    InvalidStateSet(String),
    #[error("neighborhood configuration does not match dimension {expected_len} or the state set")]
    InvalidConfig { expected_len: usize },
    #[error("lookup table has {got} entries, expected {expected}")]
    TableLength { got: usize, expected: usize },
    #[error(
        "local function is not a rule: value {value} at table index {index} leaves the state set"
    )]
    NotARule { index: usize, value: i64 },
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("{needed} configurations exceed the verification budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
}
