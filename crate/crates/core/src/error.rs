use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("proportion {0} is outside [0, 1]")]
    InvalidProportion(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{n} sets exceeds the Venn profile limit of {max}")]
    TooManySets { n: usize, max: usize },
    #[error("malformed targets: {0}")]
    MalformedTargets(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid discrepancy bound {bound}: found a collection with discrepancy {found}")]
    InvalidBound { bound: u64, found: u64 },
    #[error("not a solution: {0}")]
    NotASolution(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
