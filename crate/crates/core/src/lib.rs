//! Bilocality parameters and their violation bounds for two-source qubit
//! networks, together with the monogamy and trade-off relations satisfied by
//! the reduced networks of a four-party chain.
//!
//! Modules, bottom up:
//!
//! * [`qalg`]: dense complex matrices, kets, density matrices, partial traces,
//!   a Jacobi eigensolver and seeded random states.
//! * [`correlations`]: two-qubit correlation tensors, the Horodecki quantity
//!   and the eigenvalue bound on the bilocality parameter.
//! * [`network`]: exact behaviors of the three-party bilocal scenario and the
//!   bilocality parameter, both from probabilities and in closed form.
//! * [`monogamy`]: reduced networks of the four-party chain and the
//!   eigenvalue chain bounding `(B_B)^2 + (B_C)^2`.
//! * [`optimize`]: Nelder–Mead search over measurement directions.
//!
//! Qubit 0 is always the most significant bit of a basis index.

pub mod correlations;
pub mod error;
pub mod monogamy;
pub mod network;
pub mod optimize;
pub mod qalg;

pub use error::{Error, Result};
