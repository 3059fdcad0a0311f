use std::collections::HashMap;

use super::geometry::{Cell, Figure, ThinSet};
use super::partition::{
    distance_to_points, initial_pieces, pairwise, tree_sum_1d, tree_sum_2d, DistanceGauge, Sums,
    Term,
};
use super::{check_tol, GaugeError, GaugeOptions, IntegralResult, LevelRecord};
use crate::bump::TestFunction;

/// How planar gauge sums are organized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Rows from a gauge in `y`; inside each row tag a one-dimensional gauge
    /// integral in `x` refined to its own convergence. Cells are products
    /// `I × J`, fine for a separate radius per axis.
    #[default]
    Iterated,
    /// Quadtree cells, fine for Euclidean balls of radius `δ(tag)`.
    Isotropic,
}

/// Halves `h` from `h0` until two successive gauge sums differ by less than `tol`.
fn refine(
    tol: f64,
    opts: &GaugeOptions,
    h0: f64,
    mut level: impl FnMut(f64) -> Result<LevelRecord, GaugeError>,
) -> Result<IntegralResult, GaugeError> {
    let mut history: Vec<LevelRecord> = Vec::new();
    let mut h = h0;
    for k in 0..opts.max_levels {
        history.push(level(h)?);
        if k >= opts.min_levels.max(1) {
            let (prev, last) = (&history[k - 1], &history[k]);
            if (last.value - prev.value).abs() < tol {
                return Ok(IntegralResult {
                    value: last.value,
                    refinement_levels: history.len(),
                    absolute_riemann_sum: last.absolute_sum,
                    converged: true,
                    history,
                });
            }
        }
        h *= 0.5;
    }
    Err(GaugeError::NonConvergence { history })
}

fn record(h: f64, s: Sums) -> LevelRecord {
    LevelRecord {
        h,
        value: s.value,
        absolute_sum: s.abs,
        cells: s.cells,
    }
}

/// One gauge sum of `f` over `[a, b]` for the gauge
/// `min(h, c·dist(x, singular)^p)`.
pub fn gauge_sum_1d(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    singular: &[f64],
    gauge: &DistanceGauge,
) -> Result<LevelRecord, GaugeError> {
    Cell::new([a], [b])?;
    let dist = distance_to_points(singular);
    let mut term = |x: f64| Ok(Term::scalar(f(x)));
    let parts = initial_pieces(a, b, singular, &dist)
        .iter()
        .map(|p| tree_sum_1d(p, gauge, &dist, &mut term))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(record(gauge.h, pairwise(&parts)))
}

/// The gauge integral of `f` over `[a, b]`.
///
/// `f` must be finite everywhere, including at the `singular` points where
/// the caller supplies its defined value. The gauge shrinks like
/// `c·dist^p` towards `singular`.
pub fn hk_integrate_1d(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    singular: &[f64],
    tol: f64,
    opts: &GaugeOptions,
) -> Result<IntegralResult, GaugeError> {
    check_tol(tol)?;
    opts.validate()?;
    Cell::new([a], [b])?;
    let h0 = opts.initial_h.unwrap_or(0.5 * (b - a));
    refine(tol, opts, h0, |h| {
        gauge_sum_1d(&f, a, b, singular, &DistanceGauge::new(h, opts.p, opts.c))
    })
}

/// One isotropic gauge sum of `f` over `figure`, with `f` read as 0 on `thin`.
pub fn gauge_sum_2d(
    f: impl Fn(&[f64; 2]) -> f64,
    figure: &Figure,
    thin: &ThinSet,
    gauge: &DistanceGauge,
) -> Result<LevelRecord, GaugeError> {
    let parts = figure
        .cells()
        .iter()
        .map(|c| tree_sum_2d(c, thin, gauge, &f))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(record(gauge.h, pairwise(&parts)))
}

/// `∫ div v` over `figure`, where `div` is the pointwise divergence off `thin`.
///
/// `div` is never called on `thin`, where the integrand is taken to be 0.
pub fn divergence_integral_2d(
    div: impl Fn(&[f64; 2]) -> f64,
    figure: &Figure,
    thin: &ThinSet,
    tol: f64,
    opts: &GaugeOptions,
    scheme: Scheme,
) -> Result<IntegralResult, GaugeError> {
    check_tol(tol)?;
    opts.validate()?;
    let longest = figure
        .cells()
        .iter()
        .map(Cell::longest_side)
        .fold(0.0, f64::max);
    let h0 = opts.initial_h.unwrap_or(0.5 * longest);
    match scheme {
        Scheme::Isotropic => refine(tol, opts, h0, |h| {
            gauge_sum_2d(&div, figure, thin, &DistanceGauge::new(h, opts.p, opts.c))
        }),
        Scheme::Iterated => {
            let mut rows = RowCache::new(&div, thin, tol, opts);
            refine(tol, opts, h0, |h| {
                let gauge = DistanceGauge::new(h, opts.p, opts.c);
                let parts = figure
                    .cells()
                    .iter()
                    .map(|c| rows.outer_sum(c, &gauge))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(record(h, pairwise(&parts)))
            })
        }
    }
}

/// Converged row integrals `∫ div(x, y) dx`, reused across outer levels.
struct RowCache<'a, F> {
    div: &'a F,
    thin: &'a ThinSet,
    tol: f64,
    opts: &'a GaugeOptions,
    heights: Vec<f64>,
    rows: HashMap<(u64, u64, u64), Term>,
}

impl<'a, F: Fn(&[f64; 2]) -> f64> RowCache<'a, F> {
    fn new(div: &'a F, thin: &'a ThinSet, tol: f64, opts: &'a GaugeOptions) -> Self {
        Self {
            div,
            thin,
            tol,
            opts,
            heights: thin.critical_heights(),
            rows: HashMap::new(),
        }
    }

    fn outer_sum(&mut self, cell: &Cell<2>, gauge: &DistanceGauge) -> Result<Sums, GaugeError> {
        let (lo, hi) = (cell.lo(), cell.hi());
        let heights = std::mem::take(&mut self.heights);
        let result = {
            let ydist = distance_to_points(&heights);
            initial_pieces(lo[1], hi[1], &heights, &ydist)
                .iter()
                .map(|p| tree_sum_1d(p, gauge, &ydist, &mut |y| self.row(y, lo[0], hi[0])))
                .collect::<Result<Vec<_>, _>>()
        };
        self.heights = heights;
        Ok(pairwise(&result?))
    }

    fn row(&mut self, y: f64, x_lo: f64, x_hi: f64) -> Result<Term, GaugeError> {
        let key = (y.to_bits(), x_lo.to_bits(), x_hi.to_bits());
        if let Some(t) = self.rows.get(&key) {
            return Ok(*t);
        }
        let (thin, div) = (self.thin, self.div);
        let breaks = thin.row_crossings(y, x_lo, x_hi);
        let dist = |x: f64| thin.distance(&[x, y]);
        let f = |x: f64| {
            let p = [x, y];
            if thin.contains(&p) {
                0.0
            } else {
                div(&p)
            }
        };
        let h0 = self.opts.initial_h.unwrap_or(0.5 * (x_hi - x_lo));
        let res = refine(self.tol, self.opts, h0, |h| {
            let gauge = DistanceGauge::new(h, self.opts.p, self.opts.c);
            let mut term = |x: f64| Ok(Term::scalar(f(x)));
            let parts = initial_pieces(x_lo, x_hi, &breaks, &dist)
                .iter()
                .map(|p| tree_sum_1d(p, &gauge, &dist, &mut term))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(record(h, pairwise(&parts)))
        })?;
        let t = Term {
            value: res.value,
            abs: res.absolute_riemann_sum,
            cells: res.history.last().map_or(0, |r| r.cells),
        };
        self.rows.insert(key, t);
        Ok(t)
    }
}

/// `∫ ∂φ/∂x_axis` over `enclosing` (axis 0 is `x`, 1 is `y`), which vanishes
/// for compactly supported `φ`. Uses isotropic gauge sums with no
/// exceptional set.
pub fn verify_vanishing(
    phi: &impl TestFunction,
    axis: usize,
    enclosing: &Cell<2>,
    tol: f64,
    opts: &GaugeOptions,
) -> Result<IntegralResult, GaugeError> {
    check_tol(tol)?;
    if axis > 1 {
        return Err(GaugeError::InvalidCell(format!(
            "no coordinate axis {axis} in the plane"
        )));
    }
    let (slo, shi) = phi.support();
    let (lo, hi) = (enclosing.lo(), enclosing.hi());
    if !(0..2).all(|k| lo[k] < slo[k] && shi[k] < hi[k]) {
        return Err(GaugeError::SupportNotInside);
    }
    let figure = Figure::new(vec![*enclosing])?;
    divergence_integral_2d(
        |x| phi.gradient(x)[axis],
        &figure,
        &ThinSet::empty(),
        tol,
        opts,
        Scheme::Isotropic,
    )
}
