use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum XsepError {
    #[error("number of qubits {n} is outside the supported range 1..={max}")]
    QubitCount { n: usize, max: usize },

    #[error("length mismatch: expected {expected} entries, got {got}")]
    Length { expected: usize, got: usize },

    #[error("qubit counts differ: {0} vs {1}")]
    MixedQubits(usize, usize),

    #[error("monomial undefined: component {0} is zero")]
    ZeroComponent(usize),

    #[error("negative entry {value} at index {index}")]
    Negative { index: String, value: f64 },

    #[error("entry at index {index} violates the conjugate pairing by {defect:e}")]
    NotPaired { index: String, defect: f64 },

    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("phase undefined: entry at index {0} is zero")]
    ZeroEntry(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cost guard: estimated search size {estimate:e} exceeds the bound {bound:e}")]
    CostGuard { estimate: f64, bound: f64 },

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, XsepError>;
