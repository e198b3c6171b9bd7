use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("multi-index of degree {degree} exceeds cap {cap}")]
    DegreeAboveCap { degree: u32, cap: u32 },
    #[error("substituted series {0} has a nonzero constant term")]
    ConstantTerm(usize),
    #[error("operation requires an exact polynomial")]
    NotExact,
    #[error("cannot extend the cap of a truncated series from {from} to {to}")]
    CannotExtend { from: u32, to: u32 },
    #[error("negative radius exponent {0}")]
    NegativeRadius(String),
    #[error("invalid rational literal {0:?}")]
    BadRational(String),
    #[error("point coordinate {0} is not a p-adic integer")]
    NotIntegral(String),
    #[error("insufficient cap: need {needed}, have {have}")]
    InsufficientCap { needed: u32, have: u32 },
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("invalid group: {}", .0.join("; "))]
    InvalidGroup(Vec<String>),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
