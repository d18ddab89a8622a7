//! Legendre-Galerkin solver for the free Schrödinger equation `i u_t + Δu = 0`
//! on a rectangle, with discrete transparent boundary conditions realized
//! either by convolution quadrature (CQ) or by an effectively local Padé
//! scheme (NP).
//!
//! Spatial fields are stored as Legendre coefficients throughout.

pub mod error;
pub mod exact;
pub mod experiment;
pub mod robin;
pub mod spectral;
pub mod tbc;
pub mod weights;

pub use error::{Result, TbcError};
pub use num_complex::Complex64 as C64;
