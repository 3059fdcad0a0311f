use super::geometry::{Cell, ThinSet, ON_SET_TOL};
use super::GaugeError;

/// `δ(x) = min(h, c·d(x)^p)` where `d` is the distance to the exceptional
/// set, and `δ = h` on the set itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceGauge {
    pub h: f64,
    pub p: f64,
    pub c: f64,
}

impl DistanceGauge {
    pub fn new(h: f64, p: f64, c: f64) -> Self {
        Self { h, p, c }
    }

    /// `δ` at a point whose distance to the exceptional set is `dist`.
    pub fn delta(&self, dist: f64) -> f64 {
        if dist <= ON_SET_TOL {
            self.h
        } else {
            self.h.min(self.c * dist.powf(self.p))
        }
    }
}

/// Cells paired with tags.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedPartition<const D: usize> {
    pub items: Vec<([f64; D], Cell<D>)>,
}

impl<const D: usize> TaggedPartition<D> {
    /// Every tag lies in its cell and every cell lies in the closed ball of
    /// radius `δ(tag)` around its tag.
    pub fn is_delta_fine(&self, delta: impl Fn(&[f64; D]) -> f64) -> bool {
        self.items
            .iter()
            .all(|(tag, cell)| cell.contains(tag) && cell.farthest_distance(tag) <= delta(tag))
    }

    /// Like [`is_delta_fine`](Self::is_delta_fine) with a separate radius per
    /// axis: the cell lies in the box `Π [tag_k − δ_k, tag_k + δ_k]`.
    pub fn is_box_fine(&self, delta: impl Fn(&[f64; D]) -> [f64; D]) -> bool {
        self.items.iter().all(|(tag, cell)| {
            let d = delta(tag);
            cell.contains(tag)
                && (0..D).all(|k| tag[k] - cell.lo()[k] <= d[k] && cell.hi()[k] - tag[k] <= d[k])
        })
    }

    pub fn total_volume(&self) -> f64 {
        self.items.iter().map(|(_, c)| c.volume()).sum()
    }

    /// Whether the cells lie in `domain`, have pairwise disjoint interiors and
    /// fill it up to `rel_tol` of its volume. Quadratic in the number of cells.
    pub fn partitions(&self, domain: &Cell<D>, rel_tol: f64) -> bool {
        let inside = self
            .items
            .iter()
            .all(|(_, c)| domain.contains(&c.lo()) && domain.contains(&c.hi()));
        let disjoint = self.items.iter().enumerate().all(|(i, (_, a))| {
            self.items[i + 1..]
                .iter()
                .all(|(_, b)| a.overlap_volume(b) <= rel_tol * domain.volume())
        });
        inside
            && disjoint
            && (self.total_volume() - domain.volume()).abs() <= rel_tol * domain.volume()
    }

    /// `Σ f(tag)·|cell|` summed in item order.
    pub fn riemann_sum(&self, f: impl Fn(&[f64; D]) -> f64) -> f64 {
        self.items.iter().map(|(t, c)| f(t) * c.volume()).sum()
    }
}

/// Partial gauge sum over a subtree of the dyadic refinement.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Sums {
    pub value: f64,
    pub abs: f64,
    pub cells: u64,
}

impl Sums {
    fn add(self, o: Sums) -> Sums {
        Sums {
            value: self.value + o.value,
            abs: self.abs + o.abs,
            cells: self.cells + o.cells,
        }
    }
}

/// Contribution of one tag per unit length or area: value, absolute value
/// and number of underlying cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Term {
    pub value: f64,
    pub abs: f64,
    pub cells: u64,
}

impl Term {
    pub fn scalar(v: f64) -> Self {
        Self {
            value: v,
            abs: v.abs(),
            cells: 1,
        }
    }
}

/// An interval `[lo, hi]` with flags marking endpoints on the exceptional set.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub lo_on_set: bool,
    pub hi_on_set: bool,
}

/// The tag of `piece` if it is δ-fine as it stands, else `None`.
///
/// Pieces touching the exceptional set are tagged at the touching endpoint
/// and are fine when their whole length is within `δ` of it; other pieces
/// are tagged at the center and need both endpoints within `δ`.
fn classify_1d(piece: &Piece, gauge: &DistanceGauge, dist: &impl Fn(f64) -> f64) -> Option<f64> {
    let len = piece.hi - piece.lo;
    if piece.lo_on_set || piece.hi_on_set {
        let tag = if piece.lo_on_set { piece.lo } else { piece.hi };
        (len <= gauge.delta(dist(tag))).then_some(tag)
    } else {
        let tag = 0.5 * (piece.lo + piece.hi);
        let reach = (tag - piece.lo).max(piece.hi - tag);
        (reach <= gauge.delta(dist(tag))).then_some(tag)
    }
}

fn halve(piece: &Piece, dist: &impl Fn(f64) -> f64) -> Result<(Piece, Piece), GaugeError> {
    let mid = 0.5 * (piece.lo + piece.hi);
    if !(piece.lo < mid && mid < piece.hi) {
        return Err(GaugeError::Unresolvable(piece.hi - piece.lo));
    }
    let mid_on = dist(mid) <= ON_SET_TOL;
    Ok((
        Piece {
            hi: mid,
            hi_on_set: mid_on,
            ..*piece
        },
        Piece {
            lo: mid,
            lo_on_set: mid_on,
            ..*piece
        },
    ))
}

/// Splits `[a, b]` at the breakpoints strictly inside it.
pub(crate) fn initial_pieces(
    a: f64,
    b: f64,
    breaks: &[f64],
    dist: &impl Fn(f64) -> f64,
) -> Vec<Piece> {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| a < x && x < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut nodes = vec![a];
    nodes.extend(cuts);
    nodes.push(b);
    nodes
        .windows(2)
        .map(|w| Piece {
            lo: w[0],
            hi: w[1],
            lo_on_set: dist(w[0]) <= ON_SET_TOL,
            hi_on_set: dist(w[1]) <= ON_SET_TOL,
        })
        .collect()
}

/// Gauge sum over the dyadic δ-fine refinement of `piece`, accumulated as a
/// binary tree that mirrors the splitting.
pub(crate) fn tree_sum_1d(
    piece: &Piece,
    gauge: &DistanceGauge,
    dist: &impl Fn(f64) -> f64,
    term: &mut impl FnMut(f64) -> Result<Term, GaugeError>,
) -> Result<Sums, GaugeError> {
    if let Some(tag) = classify_1d(piece, gauge, dist) {
        let t = term(tag)?;
        let len = piece.hi - piece.lo;
        return Ok(Sums {
            value: t.value * len,
            abs: t.abs * len,
            cells: t.cells,
        });
    }
    let (left, right) = halve(piece, dist)?;
    let l = tree_sum_1d(&left, gauge, dist, term)?;
    let r = tree_sum_1d(&right, gauge, dist, term)?;
    Ok(l.add(r))
}

/// Pairwise sum of per-piece results, in order.
pub(crate) fn pairwise(parts: &[Sums]) -> Sums {
    match parts.len() {
        0 => Sums::default(),
        1 => parts[0],
        n => pairwise(&parts[..n / 2]).add(pairwise(&parts[n / 2..])),
    }
}

fn collect_1d(
    piece: &Piece,
    gauge: &DistanceGauge,
    dist: &impl Fn(f64) -> f64,
    out: &mut Vec<(f64, Piece)>,
) -> Result<(), GaugeError> {
    if let Some(tag) = classify_1d(piece, gauge, dist) {
        out.push((tag, *piece));
        return Ok(());
    }
    let (left, right) = halve(piece, dist)?;
    collect_1d(&left, gauge, dist, out)?;
    collect_1d(&right, gauge, dist, out)
}

pub(crate) fn pieces_1d(
    a: f64,
    b: f64,
    breaks: &[f64],
    gauge: &DistanceGauge,
    dist: &impl Fn(f64) -> f64,
) -> Result<Vec<(f64, Piece)>, GaugeError> {
    let mut out = Vec::new();
    for piece in initial_pieces(a, b, breaks, dist) {
        collect_1d(&piece, gauge, dist, &mut out)?;
    }
    Ok(out)
}

pub(crate) fn distance_to_points(points: &[f64]) -> impl Fn(f64) -> f64 + '_ {
    move |x| {
        points
            .iter()
            .map(|s| (x - s).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// The δ-fine tagged partition of `[a, b]` used by the one-dimensional
/// integrator, with exceptional set `singular`.
pub fn partition_1d(
    a: f64,
    b: f64,
    singular: &[f64],
    gauge: &DistanceGauge,
) -> Result<TaggedPartition<1>, GaugeError> {
    Cell::new([a], [b])?;
    let dist = distance_to_points(singular);
    let items = pieces_1d(a, b, singular, gauge, &dist)?
        .into_iter()
        .map(|(tag, p)| Ok(([tag], Cell::new([p.lo], [p.hi])?)))
        .collect::<Result<_, GaugeError>>()?;
    Ok(TaggedPartition { items })
}

/// The tag of a planar cell if it is δ-fine as it stands.
fn classify_2d(cell: &Cell<2>, thin: &ThinSet, gauge: &DistanceGauge) -> Option<[f64; 2]> {
    let center = cell.center();
    let tag = thin.nearest_in_cell(cell, &center).unwrap_or(center);
    (cell.farthest_distance(&tag) <= gauge.delta(thin.distance(&tag))).then_some(tag)
}

/// Gauge sum over the quadtree δ-fine refinement of `cell` with Euclidean balls.
pub(crate) fn tree_sum_2d(
    cell: &Cell<2>,
    thin: &ThinSet,
    gauge: &DistanceGauge,
    f: &impl Fn(&[f64; 2]) -> f64,
) -> Result<Sums, GaugeError> {
    if let Some(tag) = classify_2d(cell, thin, gauge) {
        let v = if thin.contains(&tag) { 0.0 } else { f(&tag) };
        let area = cell.volume();
        return Ok(Sums {
            value: v * area,
            abs: v.abs() * area,
            cells: 1,
        });
    }
    if !cell.splittable() {
        return Err(GaugeError::Unresolvable(cell.longest_side()));
    }
    let kids = cell.children();
    let mut parts = [Sums::default(); 4];
    for (slot, kid) in parts.iter_mut().zip(&kids) {
        *slot = tree_sum_2d(kid, thin, gauge, f)?;
    }
    Ok(parts[0].add(parts[1]).add(parts[2].add(parts[3])))
}

fn collect_2d(
    cell: &Cell<2>,
    thin: &ThinSet,
    gauge: &DistanceGauge,
    out: &mut Vec<([f64; 2], Cell<2>)>,
) -> Result<(), GaugeError> {
    if let Some(tag) = classify_2d(cell, thin, gauge) {
        out.push((tag, *cell));
        return Ok(());
    }
    if !cell.splittable() {
        return Err(GaugeError::Unresolvable(cell.longest_side()));
    }
    for kid in cell.children() {
        collect_2d(&kid, thin, gauge, out)?;
    }
    Ok(())
}

/// The quadtree δ-fine tagged partition of `cell` for the isotropic gauge
/// `δ(x) = gauge.delta(dist(x, thin))`.
pub fn partition_2d_isotropic(
    cell: &Cell<2>,
    thin: &ThinSet,
    gauge: &DistanceGauge,
) -> Result<TaggedPartition<2>, GaugeError> {
    let mut items = Vec::new();
    collect_2d(cell, thin, gauge, &mut items)?;
    Ok(TaggedPartition { items })
}

/// A product partition at fixed levels: rows from the outer gauge in `y`
/// (exceptional set: the critical heights of `thin`), and in each row the
/// one-dimensional partition in `x` for the inner gauge with distances
/// measured to `thin` in the plane.
pub fn partition_2d_product(
    cell: &Cell<2>,
    thin: &ThinSet,
    outer: &DistanceGauge,
    inner: &DistanceGauge,
) -> Result<TaggedPartition<2>, GaugeError> {
    let (lo, hi) = (cell.lo(), cell.hi());
    let heights = thin.critical_heights();
    let ydist = distance_to_points(&heights);
    let mut items = Vec::new();
    for (y, row) in pieces_1d(lo[1], hi[1], &heights, outer, &ydist)? {
        let xdist = |x: f64| thin.distance(&[x, y]);
        let breaks = thin.row_crossings(y, lo[0], hi[0]);
        for (x, col) in pieces_1d(lo[0], hi[0], &breaks, inner, &xdist)? {
            items.push(([x, y], Cell::new([col.lo, row.lo], [col.hi, row.hi])?));
        }
    }
    Ok(TaggedPartition { items })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge_integral::Segment;

    #[test]
    fn uniform_gauge_gives_midpoint_rule() {
        let g = DistanceGauge::new(0.125, 1.5, 0.5);
        let part = partition_1d(0.0, 1.0, &[], &g).unwrap();
        let tags: Vec<f64> = part.items.iter().map(|(t, _)| t[0]).collect();
        assert_eq!(tags, vec![0.125, 0.375, 0.625, 0.875]);
        assert!(part.is_delta_fine(|_| 0.125));
        assert!(!part.is_delta_fine(|_| 0.1));
    }

    #[test]
    fn singular_endpoint_tags() {
        let g = DistanceGauge::new(0.25, 2.0, 0.5);
        let part = partition_1d(0.0, 1.0, &[0.0, 0.5], &g).unwrap();
        assert!(part.partitions(&Cell::new([0.0], [1.0]).unwrap(), 1e-12));
        let s = [0.0, 0.5];
        let dist = distance_to_points(&s);
        assert!(part.is_delta_fine(|t| g.delta(dist(t[0]))));
        // The first cell touches 0 and is tagged there.
        assert_eq!(part.items[0].0, [0.0]);
        // Cells on either side of 0.5 are tagged at 0.5.
        let at_half = part.items.iter().filter(|(t, _)| t[0] == 0.5).count();
        assert_eq!(at_half, 2);
    }

    #[test]
    fn isotropic_partition_is_fine_and_tiles() {
        let cell = Cell::new([0.0, 0.0], [1.0, 1.0]).unwrap();
        let thin = ThinSet {
            points: vec![[0.3, 0.7]],
            segments: vec![Segment::new([0.0, 0.0], [1.0, 1.0])],
        };
        let g = DistanceGauge::new(0.2, 1.5, 0.5);
        let part = partition_2d_isotropic(&cell, &thin, &g).unwrap();
        assert!(part.partitions(&cell, 1e-12));
        assert!(part.is_delta_fine(|t| g.delta(thin.distance(t))));
        assert!(part.items.iter().any(|(t, _)| thin.contains(t)));
    }

    #[test]
    fn product_partition_is_box_fine() {
        let cell = Cell::new([0.0, 0.0], [1.0, 1.0]).unwrap();
        let thin = ThinSet {
            points: vec![],
            segments: vec![Segment::new([0.0, 0.0], [0.0, 1.0])],
        };
        let outer = DistanceGauge::new(0.125, 2.0, 0.05);
        let inner = DistanceGauge::new(0.125, 2.0, 0.05);
        let part = partition_2d_product(&cell, &thin, &outer, &inner).unwrap();
        assert!(part.partitions(&cell, 1e-12));
        let heights = thin.critical_heights();
        let ydist = distance_to_points(&heights);
        assert!(part.is_box_fine(|t| [inner.delta(thin.distance(t)), outer.delta(ydist(t[1]))]));
        assert!(part.items.iter().any(|(t, _)| t[0] == 0.0));
    }
}
