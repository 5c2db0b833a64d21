//! Density evolution for scalar Langevin equations driven by combined
//! fractional Gaussian noise and Gaussian white noise.
//!
//! The crate builds the drift and diffusion fields of the governing
//! Fokker–Planck-type equations (including the memory coefficient produced
//! by the fractional kernel), solves them with a local discontinuous
//! Galerkin scheme and a finite-difference baseline, and cross-checks the
//! results against Monte Carlo simulation and closed-form densities.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coefficients;
pub mod density;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod fd;
pub mod ldg;
pub mod metrics;
pub mod noise;
pub mod quadrature;
pub mod sde_mc;

pub use density::{DensityField, DensityTrajectory};
pub use error::{Error, Result};
