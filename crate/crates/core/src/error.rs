use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("modulus {0:?} is reducible over GF({1})")]
    Reducible(Vec<u32>, u32),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("field of order {0} exceeds the supported maximum of 65536")]
    FieldTooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element {0} is not in the field")]
    InvalidElement(u32),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("basis elements are linearly dependent over the subfield")]
    DependentBasis,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("the zero code is not a valid operand here")]
    ZeroCode,
    #[error("rank condition violated: {0}")]
    RankCondition(String),
    #[error("matrix is rank deficient over the rational function field")]
    RankDeficient,
    #[error("{what}: {needed} exceeds guard {limit}")]
    GuardExceeded { what: &'static str, needed: String, limit: u64 },
    #[error("generator matrix is not {0}")]
    Uncertified(&'static str),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal consistency fault: {0}")]
    Internal(String),
    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn guard(what: &'static str, needed: impl std::fmt::Display, limit: u64) -> Self {
        Error::GuardExceeded { what, needed: needed.to_string(), limit }
    }
}
