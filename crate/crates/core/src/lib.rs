//! Linear spectral analysis and reduced dynamics for three-dimensional
//! internal gravity-capillary waves between two fluid layers.
//!
//! The crate is organised bottom-up: [`params`] and [`dispersion`] locate
//! purely imaginary eigenvalues, [`regions`] classifies the parameter plane,
//! [`spectral`] builds eigenvectors and symplectic products, [`normalform`]
//! evaluates reduced Hamiltonian coefficients, [`dynamics`] solves the reduced
//! equations and [`wavefield`] turns the result into interface elevations.
//! [`sweep`] runs any of the point evaluations over a parameter grid.

pub mod dispersion;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod normalform;
mod ode;
pub mod params;
pub mod regions;
pub mod special;
pub mod spectral;
pub mod sweep;
pub mod wavefield;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use params::{BifurcationOffsets, ModelParams, WaveVector};
