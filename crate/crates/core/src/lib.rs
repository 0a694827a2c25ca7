//! Numerical laboratory for biorthogonal Laguerre ensembles: finite-n
//! correlation kernels by independent methods, their hard-edge, bulk and
//! soft-edge scaling limits, the equilibrium density and the bridge to
//! products of Ginibre matrices.

// `!(x > a)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod biopoly;
pub mod checks;
pub mod equilibrium;
pub mod ginibre_bridge;
pub mod kernel_finite;
pub mod limits;
pub mod par;
pub mod params;
pub mod quad;
pub mod special;

pub use num_complex::Complex64 as C64;
pub use params::{EnsembleParams, ParamsError};
