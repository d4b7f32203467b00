//! Cavity-polariton toolkit.
//!
//! Computes the polariton branches of two-level atoms strongly coupled to a
//! single resonator mode, their Hopfield composition and transverse effective
//! masses, and the threshold ladder of the resulting two-dimensional Bose gas
//! (degeneracy, Kosterlitz–Thouless, trapped BEC). The [`trap`] module sizes
//! the gradient-index lens that provides the harmonic confinement.
//!
//! All physics runs on [`quantities::Quantity`] values in CGS-Gaussian units.

pub mod cli;
pub mod coupling;
pub mod dispersion;
pub mod error;
pub mod quantities;
pub mod thermo;
pub mod trap;

pub use error::{Error, Result};
