//! Signal processing on graphs and simplicial complexes.
//!
//! The crate builds simplicial complexes from maximal simplices, exposes their
//! boundary operators and Hodge Laplacians, and implements spectral
//! transforms, Hodge decomposition, low-pass filtering, semi-supervised
//! interpolation, Hodge-flow dynamics and a small simplicial neural network.

pub mod classic;
pub mod cli;
pub mod complex;
pub mod dynamics;
pub mod error;
pub mod filters;
pub mod fixtures;
pub mod interpolation;
pub mod io;
pub mod snn;
pub mod spectral;

pub use complex::{SignedIncidenceMatrix, Simplex, SimplicialComplex};
pub use error::{Error, Result};
pub use spectral::{eig_sym, HodgeDecomposition, SpectralBasis};
