use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus {0} is not a prime")]
    NonPrimeModulus(u32),
    #[error("modules live over different algebras")]
    AlgebraMismatch,
    #[error("modules live over different fields")]
    FieldMismatch,
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("matrix does not intertwine the actions")]
    NotIntertwining,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("linear system has no solution")]
    NoSolution,
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("d^2 != 0 at degree {degree}")]
    SquareNonzero { degree: i64 },
    #[error("not a chain map at degree {degree}")]
    NotChainMap { degree: i64 },
    #[error("infinitely many nonzero pairs in degree {degree}; truncate an operand first")]
    InfiniteRank { degree: i64 },
    #[error("a window is required: {0}")]
    WindowRequired(String),
    #[error("truncated tail needs window-interior mode")]
    RegimeUnsupported,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("degree {degree} outside the validity range")]
    OutOfValidityRange { degree: i64 },
    #[error("commutation of the idempotents could not be verified")]
    CommutationUnverified,
    #[error("no solution on the window")]
    NoSolutionOnWindow,
    #[error("solution not unique on the window")]
    NonUniqueOnWindow,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
