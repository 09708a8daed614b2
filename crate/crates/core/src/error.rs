use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("modulus {0} is not a monic irreducible polynomial")]
    BadModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("{0} is not an element of {1}")]
    NotInField(String, String),
    #[error("operation not available over the rationals: {0}")]
    RationalUnsupported(&'static str),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("index ({0}, {1}) out of range for size {2}")]
    IndexOutOfRange(usize, usize, usize),
    #[error("not an affine element: {0}")]
    NotAffine(String),
    #[error("not a quadratic form: {0}")]
    NotQuadraticForm(String),
    #[error("vectors are linearly dependent over the prime field")]
    DependentBasis,
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("search budget exhausted after {0} nodes")]
    BudgetExhausted(u64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
