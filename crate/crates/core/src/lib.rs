//! Exact and numerical certificates for gamma-ratio Toeplitz determinants,
//! positive cosine densities on the circle, gradient fields of fractional
//! kernels, energies on cubes, and the failure of strong energy reversal for
//! fractional Riesz transforms in the plane.

pub mod certificate;
pub mod densities;
pub mod energies;
pub mod error;
pub mod exact;
pub mod fields;
pub mod linalg;
pub mod quadrature;
pub mod reversal;
pub mod toeplitz;

pub use error::{Error, Result};
pub use exact::ExactRational;
