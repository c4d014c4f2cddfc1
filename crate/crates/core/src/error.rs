use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state not normalized: squared norm {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("qubit count {0} outside supported range 1..=4")]
    BadQubitCount(usize),

    #[error("bad qubit index list {indices:?} for a {num_qubits}-qubit state")]
    BadIndex {
        indices: Vec<usize>,
        num_qubits: usize,
    },

    #[error("matrix not Hermitian: max |m - m^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("density matrix trace {trace} differs from 1")]
    TraceNotOne { trace: f64 },

    #[error("density matrix not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("wrong dimension: expected {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("vector not unit length: norm {norm}")]
    NotUnit { norm: f64 },

    #[error("invalid party assignment: {0}")]
    BadAssignment(String),

    #[error("invalid parameter: {0}")]
    BadParameter(String),
}
