use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("all inputs are numerically zero")]
    EmptySpan,

    #[error("subspace is not closed under adjoint")]
    NotAdjointClosed,

    #[error("generated algebra did not stabilise within {0} passes")]
    ClosureStall(usize),

    #[error("subspace is not a unital *-algebra: {0}")]
    NotAnAlgebra(String),

    #[error("algebra is not commutative")]
    NotCommutative,

    #[error("spectral sampling failed to separate atoms after retries")]
    DegenerateSampling,

    #[error("projector refinement stalled: {0}")]
    RefinementStall(String),

    #[error("map is not a *-homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("matrix is not an isometry (defect {0:.3e})")]
    NotIsometry(f64),

    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),

    #[error("splitting map is not balanced")]
    NotBalanced,

    #[error("splitting map is not lean")]
    NotLean,

    #[error("strictly local algebra is not a factor")]
    NotFactor,

    #[error("first algebra is not contained in the second")]
    NotNested,

    #[error("splitting map does not represent the given algebra")]
    AlgebraMismatch,

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("channel is not trace preserving (defect {0:.3e})")]
    NotTracePreserving(f64),

    #[error("channel is not completely positive (smallest Choi eigenvalue {0:.3e})")]
    NotCompletelyPositive(f64),

    #[error("dilations do not describe the same channel (deviation {0:.3e})")]
    NotSameChannel(f64),

    #[error("first dilation has the larger environment")]
    DimensionOrder,

    #[error("channel is not semi-causal for the given maps")]
    NotSemiCausal,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn mismatch(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
