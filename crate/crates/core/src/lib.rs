//! Numerical checks for differential inclusions `Du ∈ L` where `L` is a
//! linear space of matrices without rank-1 connections.
//!
//! The crate is split along the three computational threads of the theory:
//!
//! * [`matrix_space`]: matrix subspaces, their orthogonal projectors, the
//!   rank-1 gap `λ` and the induced strongly elliptic coefficient tensor.
//! * [`gauge_integral`]: Henstock–Kurzweil (gauge) Riemann sums in one and two
//!   dimensions, the divergence theorem on figures and boundary fluxes.
//! * [`elliptic_lab`]: grid fields, mollification, difference quotients,
//!   Caccioppoli ratios, weak Laplace residuals, the mean value property and a
//!   solver for the constant coefficient system.

pub mod bump;
pub mod elliptic_lab;
pub mod gauge_integral;
pub mod json17;
pub mod matrix_space;

pub use elliptic_lab::{GridError, GridField};
pub use gauge_integral::{GaugeError, IntegralResult};
pub use matrix_space::{EllipticTensor, MatrixSpaceError, MatrixSubspace, Rank1Certificate};
