use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus must be prime, got {0}")]
    NotPrime(u64),

    #[error("dimension must be between 2 and 4, got {0}")]
    Dimension(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("enumeration budget exceeded: {needed} > {budget}")]
    Budget { needed: u128, budget: u128 },

    #[error("sets live in different groups: {0} vs {1}")]
    ContextMismatch(String, String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),
}
