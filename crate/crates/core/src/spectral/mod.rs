//! Legendre machinery, LGL quadrature and transforms, the boundary-adapted
//! basis and banded complex linear algebra.

pub mod banded;
pub mod basis;
pub mod legendre;
pub mod lgl;

pub use banded::{banded_lu, banded_solve, BandedLu, BandedMatrix};
pub use basis::{assemble_system_1d, build_basis, project_rhs, SpectralBasis1D, SystemMatrices1D};
pub use legendre::{
    boundary_traces, d1_legendre_coeffs, d2_legendre_coeffs, eval_legendre_series,
    legendre_eval_all, Traces,
};
pub use lgl::{lgl_grid, LegendreTransform, LglGrid};
