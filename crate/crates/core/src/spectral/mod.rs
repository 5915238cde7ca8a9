//! Periodic grid, fields, and spectral operators.

mod field;
mod grid;
pub mod ops;
pub mod random;

pub use field::{ScalarField, VectorField};
pub use grid::Grid;
pub use ops::{dealias, invert_laplacian, spectral_derivative};
