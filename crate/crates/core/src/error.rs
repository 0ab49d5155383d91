use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid Pauli character {ch:?} at position {position}")]
    InvalidPauli { position: usize, ch: char },

    #[error("empty Pauli string")]
    EmptyPauliString,

    #[error("empty operator list")]
    EmptyOperatorList,

    #[error("matrix of size {rows}x{cols} is not a {n_qubits}-qubit operator")]
    NotQubitOperator {
        n_qubits: usize,
        rows: usize,
        cols: usize,
    },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitIndexOutOfRange { index: usize, n_qubits: usize },

    #[error("no qubits selected to keep")]
    EmptyKeepSet,

    #[error("operator is not Hermitian (max |h - h^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("rate `{name}` must be non-negative, got {value}")]
    NegativeRate { name: String, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("system dimension {dim} exceeds the superoperator guard (d^2 <= {limit})")]
    DimensionGuard { dim: usize, limit: usize },

    #[error(
        "integration diverged at t = {time}: trace drift {trace_drift:.3e}, \
         min eigenvalue {min_eigenvalue:.3e}; retry with a smaller step"
    )]
    IntegrationDiverged {
        time: f64,
        trace_drift: f64,
        min_eigenvalue: f64,
    },

    #[error("syndrome is undefined: state is not a +/-1 eigenstate of {0}")]
    AmbiguousSyndrome(String),

    #[error("survival probability underflow ({survival:.3e}) at cycle {cycle}")]
    SurvivalUnderflow { cycle: usize, survival: f64 },

    #[error("empty sweep")]
    EmptySweep,

    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}
