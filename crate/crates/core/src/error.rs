use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is even; only odd inputs are supported")]
    EvenInput(u64),
    #[error("{0} is too small; inputs must be at least 9")]
    TooSmall(u64),
    #[error("widths ({wp}, {wq}) do not fit a {bits}-bit product")]
    WidthMismatch { wp: u32, wq: u32, bits: u32 },
    #[error("width split admits no factorization: {0}")]
    Infeasible(String),
    #[error("no product term available for order reduction")]
    NotApplicable,
    #[error("system has no free variables")]
    EmptySystem,
    #[error("variable {0} is not mapped to a qubit")]
    UnmappedVariable(String),
    #[error("{qubits} qubits exceeds the cap of {cap}")]
    DimensionTooLarge { qubits: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("inconsistent qubit map: {0}")]
    InconsistentMap(String),
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("{vars} variables exceeds the brute-force limit of {limit}")]
    TooManyVariables { vars: usize, limit: usize },
    #[error("{0} could not be factored under any width split")]
    NotFactorable(u64),
    #[error("parse error: {0}")]
    Parse(String),
}
