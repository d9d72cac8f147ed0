//! Solver for a compressible, resistive MHD system with a Faedo-Galerkin
//! momentum equation, coupled to a nonlinear Schroedinger field transported
//! in Lagrangian coordinates.

pub mod continuity;
pub mod coupling;
pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod galerkin;
pub mod geometry;
pub mod induction;
pub mod lagrangian;
pub mod nls;
pub mod spectral;

pub use error::{Error, Result};
pub use fields::{Bc, ComplexField, ScalarField, VectorField3};
pub use geometry::{build_basis, Domain, GalerkinState, SineBasis};
