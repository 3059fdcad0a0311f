//! Henstock–Kurzweil (gauge) integration in one and two dimensions.
//!
//! A gauge is a positive function `δ`; a tagged partition is δ-fine when
//! every cell lies in the ball of radius `δ(tag)` around its tag. Gauge sums
//! over δ-fine partitions converge for every derivative, including
//! derivatives that are not Lebesgue integrable, provided `δ` shrinks fast
//! enough near the points where the derivative misbehaves.
//!
//! Gauges here are distance-power gauges
//! `δ(x) = min(h, c·dist(x, S)^p)` with `δ = h` on `S` itself, and
//! partitions come from recursive dyadic splitting. Cells whose closure
//! meets `S` are tagged at a point of `S`, all others at their center.

mod catalog;
mod flux;
mod geometry;
mod integrate;
mod partition;
mod quadrature;

use serde::Serialize;
use thiserror::Error;

use crate::json17;

pub use catalog::{field_2d, fields_2d, integrand_1d, integrands_1d, Field2d, Integrand1d};
pub use flux::{boundary_edges, boundary_flux, Edge};
pub use geometry::{Cell, Figure, Segment, ThinSet};
pub use integrate::{
    divergence_integral_2d, gauge_sum_1d, gauge_sum_2d, hk_integrate_1d, verify_vanishing, Scheme,
};
pub use partition::{
    partition_1d, partition_2d_isotropic, partition_2d_product, DistanceGauge, TaggedPartition,
};
pub use quadrature::{adaptive_gauss_kronrod, gauss_kronrod_15};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaugeError {
    #[error("gauge sums did not converge after {} levels", history.len())]
    NonConvergence { history: Vec<LevelRecord> },
    #[error("invalid cell: {0}")]
    InvalidCell(String),
    #[error("figure cells {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("invalid gauge parameters: {0}")]
    InvalidGauge(String),
    #[error("partition cannot be refined below length {0:e}")]
    Unresolvable(f64),
    #[error("support of the test function is not strictly inside the enclosing cell")]
    SupportNotInside,
    #[error("adaptive quadrature did not reach tolerance on [{lo}, {hi}]")]
    Quadrature { lo: f64, hi: f64 },
}

/// Parameters of the distance-power gauge family and of the refinement loop.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeOptions {
    pub p: f64,
    pub c: f64,
    /// Largest number of refinement levels before giving up.
    pub max_levels: usize,
    /// Levels computed before the Cauchy test is applied.
    pub min_levels: usize,
    /// Base scale at level 0. Defaults to half the longest side of the domain,
    /// so level 0 is the one-cell midpoint sum.
    pub initial_h: Option<f64>,
}

impl Default for GaugeOptions {
    fn default() -> Self {
        Self {
            p: 1.5,
            c: 0.5,
            max_levels: 30,
            min_levels: 3,
            initial_h: None,
        }
    }
}

impl GaugeOptions {
    pub fn with_power(mut self, p: f64, c: f64) -> Self {
        self.p = p;
        self.c = c;
        self
    }

    fn validate(&self) -> Result<(), GaugeError> {
        if !(self.p > 0.0 && self.p.is_finite() && self.c > 0.0 && self.c.is_finite()) {
            return Err(GaugeError::InvalidGauge(format!(
                "p = {}, c = {}",
                self.p, self.c
            )));
        }
        if let Some(h) = self.initial_h {
            if !(h > 0.0 && h.is_finite()) {
                return Err(GaugeError::InvalidGauge(format!("initial h = {h}")));
            }
        }
        Ok(())
    }
}

/// Gauge sum at one refinement level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRecord {
    #[serde(serialize_with = "json17::serialize")]
    pub h: f64,
    #[serde(serialize_with = "json17::serialize")]
    pub value: f64,
    /// `Σ |f(tag)|·|cell|`.
    #[serde(serialize_with = "json17::serialize")]
    pub absolute_sum: f64,
    pub cells: u64,
}

/// Outcome of a refinement run.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    /// Number of levels computed.
    pub refinement_levels: usize,
    /// Absolute Riemann sum at the finest level.
    pub absolute_riemann_sum: f64,
    pub converged: bool,
    pub history: Vec<LevelRecord>,
}

impl IntegralResult {
    pub fn absolute_sum_history(&self) -> Vec<f64> {
        self.history.iter().map(|r| r.absolute_sum).collect()
    }

    pub fn value_history(&self) -> Vec<f64> {
        self.history.iter().map(|r| r.value).collect()
    }

    /// Total number of cells summed over all levels.
    pub fn total_cells(&self) -> u64 {
        self.history.iter().map(|r| r.cells).sum()
    }
}

impl Serialize for IntegralResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let abs = self.absolute_sum_history();
        let mut st = s.serialize_struct("IntegralResult", 5)?;
        st.serialize_field("value", &json17::Float(self.value))?;
        st.serialize_field("levels", &self.refinement_levels)?;
        st.serialize_field("absolute_sum_history", &json17::Floats(&abs))?;
        st.serialize_field("converged", &self.converged)?;
        st.serialize_field("history", &self.history)?;
        st.end()
    }
}

fn check_tol(tol: f64) -> Result<(), GaugeError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(GaugeError::InvalidTolerance(tol))
    }
}
