//! Geometric phases, Floquet quasienergies and artificial monopole charges
//! for driven few-level quantum systems, with a classical monopole orbit
//! integrator alongside.

pub mod numerics;
pub mod parameter_space;
pub mod tolerances;
pub mod two_level;
pub mod verify;
pub mod chern;
pub mod classical_dynamics;
pub mod floquet;
pub mod models;
pub mod su3_lambda;
