//! Grid experiments on the regularity of solutions of `Du ∈ L`.
//!
//! Fields are sampled on uniform rectangular lattices ([`GridField`]) and
//! differentiated with second-order finite differences. The module measures
//! how mollification, difference quotients and the induced constant
//! coefficient system interact with the inclusion, and checks the weak and
//! mean-value characterizations of harmonic functions.

mod corpus;
mod energy;
mod grid;
mod mollifier;
mod rates;
mod solver;
mod stencil;
mod weak;

use thiserror::Error;

use crate::matrix_space::MatrixSpaceError;

pub use corpus::{corpus, corpus_entry, CorpusEntry, CORPUS_NAMES};
pub use energy::caccioppoli_ratio;
pub use grid::{GridField, MIN_POINTS};
pub use mollifier::{mollify, Mollifier};
pub use rates::{empirical_order, pairwise_orders};
pub use solver::{
    apply_operator, assemble_and_solve_system, operator_residual, spectral_profile, SolveReport,
    SolverOptions,
};
pub use stencil::{
    cauchy_riemann_residual, difference_quotient, finite_difference_gradient, inclusion_distance,
    inclusion_pair, InclusionPair,
};
pub use weak::{mean_value_check, weak_laplace_residual, WeakResidualReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid of {nx}×{ny} points is too small: at least {min} per direction are needed")]
    TooSmall { nx: usize, ny: usize, min: usize },
    #[error("grid spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),
    #[error("expected {expected} values, found {found}")]
    ValueCount { expected: usize, found: usize },
    #[error("field has {found} components, expected {expected}")]
    ComponentMismatch { expected: usize, found: usize },
    #[error("fields live on different lattices")]
    GridMismatch,
    #[error("mollifier radius {epsilon} is below 2h = {}", 2.0 * h)]
    UnderResolvedKernel { epsilon: f64, h: f64 },
    #[error("the eroded domain has fewer than {min} points per direction")]
    EmptyDomain { min: usize },
    #[error("ratio is undefined for a field that vanishes identically")]
    ZeroField,
    #[error("support of test function {0} is not strictly inside the grid")]
    SupportTouchesBoundary(String),
    #[error("circle of radius {radius} around {center:?} leaves the grid")]
    CircleLeavesDomain { center: [f64; 2], radius: f64 },
    #[error("tensor is not strongly elliptic: μ = {mu} ≤ {tol}")]
    NotElliptic { mu: f64, tol: f64 },
    #[error("tensor acts on {m}×{n} matrices; planar systems need n = 2")]
    NotPlanar { m: usize, n: usize },
    #[error("conjugate gradients stopped after {iterations} iterations at residual {residual:e}")]
    SolverNonConvergence { iterations: usize, residual: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("csv line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error(transparent)]
    Space(#[from] MatrixSpaceError),
}
