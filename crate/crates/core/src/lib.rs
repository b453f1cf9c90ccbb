//! Exact-arithmetic verification toolkit for orthogonal product-state
//! families and their transformations under local measurements.
//!
//! Everything is computed over the rationals: state amplitudes are integers,
//! projectors and reduced densities are rational matrices, and every check
//! (orthogonality, redundancy, unextendibility, irreducibility) is decided
//! exactly, never numerically.

pub mod activation;
pub mod error;
pub mod exactla;
pub mod hilbert;
pub mod measurements;
pub mod nonlocality;
pub mod protocols;
pub mod statesets;

pub use error::Error;
pub use exactla::{RMatrix, Rational};
