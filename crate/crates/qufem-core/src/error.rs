use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coefficient count {coeffs} does not match {terms} terms")]
    CoefficientCount { coeffs: usize, terms: usize },
    #[error("coefficient vector has zero 1-norm")]
    ZeroNorm,
    #[error("index map is not a bijection")]
    NotBijective,
    #[error("input state is not normalized (norm {0})")]
    Unnormalized(f64),
    #[error("invalid mesh parameters: {0}")]
    InvalidMesh(String),
    #[error("connectivity row {0} is not injective")]
    NonInjective(usize),
    #[error("operator is not diagonal")]
    NotDiagonal,
    #[error("polynomial has wrong parity for degree {0}")]
    WrongParity(usize),
    #[error("phase optimization residual {0:e} exceeds tolerance")]
    PhaseResidual(f64),
    #[error("system too large: dimension {0}")]
    TooLarge(usize),
    #[error("singular system")]
    Singular,
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;
