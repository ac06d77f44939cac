use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate targets must be distinct: {0:?}")]
    DuplicateTargets(Vec<usize>),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("occupation {occupation} of mode {mode} exceeds n_max = {max}")]
    OccupationOutOfRange {
        mode: usize,
        occupation: usize,
        max: usize,
    },

    #[error("index {index} out of range ({len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error(
        "displacement leaks {leakage:e} of the norm out of the truncated space; \
         try n_max >= {suggested_n_max}"
    )]
    TruncationLeakage { leakage: f64, suggested_n_max: usize },

    #[error("density-matrix simulation of {n_qubits} qubits exceeds the cap of {cap}; use trajectory sampling")]
    DensityMatrixCap { n_qubits: usize, cap: usize },

    #[error("confusion matrix for qubit {qubit} is singular")]
    SingularConfusion { qubit: usize },

    #[error("no shots survived postselection")]
    NoRetainedShots,

    #[error("relative error undefined: reference energy {0:e} is too close to zero")]
    UndefinedMetric(f64),

    #[error("objective returned a non-finite value at trial {trial}")]
    NonFiniteObjective { trial: usize },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
