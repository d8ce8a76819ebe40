use thiserror::Error;

/// Errors produced by the library and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    NvarsMismatch { left: usize, right: usize },

    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("zero polynomial where a nonzero one is required: {0}")]
    ZeroPolynomial(&'static str),

    #[error("polynomial is constant")]
    ConstantPolynomial,

    #[error("monomial basis would have {size} elements, cap is {cap}")]
    BasisCap { size: usize, cap: usize },

    #[error("degree bound violated: {0}")]
    BoundViolation(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("block A22 is singular at the evaluation point")]
    SingularBlock,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("ambiguity at multi-index {beta:?} admits no lift with symmetric lower coefficients")]
    NotLiftable { beta: Vec<u32> },

    #[error("basis cannot represent monomial {monomial:?} of the target")]
    BasisInsufficient { monomial: Vec<u32> },

    #[error("certificate does not match: {0}")]
    CertificateMismatch(String),

    #[error("matrix is not positive semidefinite: {0}")]
    NotPsd(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("invalid artifact: {0}")]
    Artifact(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
