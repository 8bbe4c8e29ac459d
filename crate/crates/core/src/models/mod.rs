//! Driven systems as [`PeriodicHamiltonian`](crate::floquet::PeriodicHamiltonian)
//! factories, each with closed-form quasienergies and phases to check the
//! Floquet engine against.

pub mod resonator;
pub mod rwa;
pub mod spin_j;

pub use resonator::{qubit_resonator_quasienergies, qubit_resonator_semiclassical, QubitResonatorParams};
pub use rwa::{rwa_qubit, RwaQubitParams};
pub use spin_j::{spin_j_floquet_block, spin_j_periodic, spin_matrices, SpinJParams, SpinMatrices};

use thiserror::Error;

use crate::floquet::FloquetError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("spin must be a positive half-integer, got {0}")]
    BadSpin(f64),
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error(transparent)]
    Floquet(#[from] FloquetError),
}
