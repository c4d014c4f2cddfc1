//! Complex linear algebra and few-qubit state handling.

mod eigen;
mod matrix;
mod random;
mod state;

pub use eigen::{hermitian_eigs, HERMITIAN_TOL, MAX_SWEEPS, OFF_DIAGONAL_TOL};
pub use matrix::{tensor_product, ComplexMatrix, Pauli};
pub use random::{
    complex_gaussian, derive_seed, random_density, random_pure_state, random_unit_vector,
    rng_from_seed, SeededRng,
};
pub use state::{
    density_from_ket, partial_trace, DensityMatrix, Ket, KET_NORM_TOL, MAX_QUBITS, PSD_TOL,
    STATE_TOL,
};
