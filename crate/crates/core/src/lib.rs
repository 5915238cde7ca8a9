//! Pseudo-spectral laboratory for two-dimensional ideal incompressible MHD.
//!
//! The crate provides Littlewood-Paley blocks and Besov norms as Fourier
//! multipliers on the periodic grid, Bony paraproducts and commutators,
//! time integration of the MHD, Elsässer and Euler systems, and monitors
//! for continuation criteria and lifespan lower bounds.

pub mod cli;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod littlewood_paley;
pub mod paracalculus;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
