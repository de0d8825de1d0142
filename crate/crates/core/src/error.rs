use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),

    #[error("qubit count must be positive, got {0}")]
    InvalidQubitCount(i64),

    #[error("empty term list")]
    EmptyTerms,

    #[error("duplicate qubit index {0} within a term")]
    DuplicateQubit(usize),

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("dense term body is not Hermitian (max deviation {0:.3e})")]
    NonHermitian(f64),

    #[error("oracle scale exceeded: {n} qubits requested, cap is {cap}")]
    ScaleExceeded { n: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("circuit acts on {circuit} qubits but the Hamiltonian has {hamiltonian}")]
    CircuitMismatch { circuit: usize, hamiltonian: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("eigenvectors were not retained by the diagonalization")]
    MissingEigenvectors,

    #[error("delta {delta} is below the admissible floor {floor}")]
    DeltaBelowFloor { delta: f64, floor: f64 },

    #[error("degenerate instance: all local energy contributions vanish (L = 0)")]
    DegenerateInstance,

    #[error("no admissible grid point: delta floor {floor} exceeds the grid maximum {max}")]
    NoAdmissiblePoint { floor: f64, max: f64 },

    #[error("empty low-energy subspace overlap")]
    EmptyOverlap,

    #[error("entropy argument {0} lies outside [0, 1/2]")]
    EntropyArgument(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
