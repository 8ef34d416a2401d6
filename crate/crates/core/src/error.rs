use thiserror::Error;

/// Errors produced by the witness library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("entries length {len} does not match dimension {dim} (expected {expected})")]
    EntryCount {
        dim: usize,
        len: usize,
        expected: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("cannot swap qubit {0} with itself")]
    SameQubit(usize),

    #[error("unsupported number of copies: {0} (expected 1..=4)")]
    UnsupportedCopies(usize),

    #[error("matrix is not Hermitian (max entry deviation {0:e})")]
    NotHermitian(f64),

    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid density matrix: {0}")]
    InvalidState(#[from] crate::states::Violations),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("unknown named state '{0}'")]
    UnknownState(String),

    #[error("unsupported operator {kind:?} for {n_copies} copies")]
    UnsupportedOperator {
        kind: crate::collective::OperatorKind,
        n_copies: usize,
    },

    #[error("shot record for {n_copies} copies has zero shots")]
    ZeroShots { n_copies: usize },

    #[error("missing shot record for {0} copies")]
    MissingRecord(usize),

    #[error("malformed state file: {0}")]
    StateFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
