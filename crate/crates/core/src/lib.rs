//! Extreme-value statistics of 2D Coulomb gases / normal random matrices
//! with radially symmetric confining potentials: exact finite-N
//! distributions of the largest and smallest eigenvalue modulus, their
//! large-N asymptotics, and a Monte-Carlo sampler for validation.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod exact_cdf;
pub mod potential;
pub mod output;
pub mod quad;
pub mod sampler;
pub mod specfun;

pub use error::{Error, Result};
