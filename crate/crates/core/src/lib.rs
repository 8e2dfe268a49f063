//! Spectral shape optimization toolkit for the Laplacian under Dirichlet,
//! Neumann and mixed boundary conditions.

pub mod counting_bounds;
pub mod cuboid_spectra;
pub mod error;
pub mod fem2d;
pub mod geometry;
pub mod reference_spectra;
pub mod shape_opt;
pub mod spectrum;
pub mod weyl_lab;

pub use error::{Result, SpectraError};
pub use spectrum::{BcDescriptor, BcFamily, ModeLabel, Spectrum, SpectrumSource};
