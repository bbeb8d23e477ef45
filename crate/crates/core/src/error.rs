use thiserror::Error;

/// Errors raised by the algebraic operations in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("variable index {index} out of range for d = {d}")]
    IndexOutOfRange { index: usize, d: usize },

    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    #[error("truncation exceeded: degree {needed} requested, state known to degree {available}")]
    TruncationExceeded { needed: usize, available: usize },

    #[error("series has zero constant term and cannot be inverted")]
    ZeroConstantTerm,

    #[error("size {n} out of range {min}..={max}")]
    SizeOutOfRange { n: usize, min: usize, max: usize },

    #[error("partition has a crossing")]
    Crossing,

    #[error("selected class set contains an inner class")]
    InnerClassSelected,

    #[error("functional is not positive: {0}")]
    NotPositive(String),

    #[error("moments are not reversal-symmetric at word {0}")]
    NotSelfAdjoint(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Fock truncation overflow: creation beyond depth {0}")]
    FockOverflow(usize),

    #[error("coefficient budget exceeded: {count} coefficients > limit {limit}")]
    TooManyCoefficients { count: u128, limit: u128 },

    #[error("state recursion violates MOPS three-term structure: {0}")]
    ThreeTermViolation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
