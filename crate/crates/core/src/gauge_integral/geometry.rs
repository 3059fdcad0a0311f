use super::GaugeError;

/// Distance below which a point counts as lying on a thin set.
pub(crate) const ON_SET_TOL: f64 = 1e-14;

/// A closed axis-aligned box `Π [lo_k, hi_k]` with nonempty interior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell<const D: usize> {
    lo: [f64; D],
    hi: [f64; D],
}

impl<const D: usize> Cell<D> {
    pub fn new(lo: [f64; D], hi: [f64; D]) -> Result<Self, GaugeError> {
        for k in 0..D {
            if !(lo[k].is_finite() && hi[k].is_finite() && lo[k] < hi[k]) {
                return Err(GaugeError::InvalidCell(format!(
                    "side {k}: [{}, {}] has empty interior",
                    lo[k], hi[k]
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> [f64; D] {
        self.lo
    }

    pub fn hi(&self) -> [f64; D] {
        self.hi
    }

    pub fn side(&self, k: usize) -> f64 {
        self.hi[k] - self.lo[k]
    }

    pub fn longest_side(&self) -> f64 {
        (0..D).map(|k| self.side(k)).fold(0.0, f64::max)
    }

    pub fn volume(&self) -> f64 {
        (0..D).map(|k| self.side(k)).product()
    }

    pub fn center(&self) -> [f64; D] {
        std::array::from_fn(|k| 0.5 * (self.lo[k] + self.hi[k]))
    }

    /// Whether `x` lies in the closed cell.
    pub fn contains(&self, x: &[f64; D]) -> bool {
        (0..D).all(|k| self.lo[k] <= x[k] && x[k] <= self.hi[k])
    }

    /// Largest Euclidean distance from `x` to a point of the cell.
    pub fn farthest_distance(&self, x: &[f64; D]) -> f64 {
        (0..D)
            .map(|k| {
                let d = (x[k] - self.lo[k]).abs().max((self.hi[k] - x[k]).abs());
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Volume of the intersection of the two interiors.
    pub fn overlap_volume(&self, other: &Self) -> f64 {
        (0..D)
            .map(|k| (self.hi[k].min(other.hi[k]) - self.lo[k].max(other.lo[k])).max(0.0))
            .product()
    }

    /// Halves along `axis`.
    pub fn bisect(&self, axis: usize) -> (Self, Self) {
        let mid = 0.5 * (self.lo[axis] + self.hi[axis]);
        let mut left = *self;
        let mut right = *self;
        left.hi[axis] = mid;
        right.lo[axis] = mid;
        (left, right)
    }

    /// Whether halving is still representable in floating point.
    pub(crate) fn splittable(&self) -> bool {
        (0..D).all(|k| {
            let mid = 0.5 * (self.lo[k] + self.hi[k]);
            self.lo[k] < mid && mid < self.hi[k]
        })
    }

    /// The `2^D` dyadic children; the first coordinate varies slowest.
    pub fn children(&self) -> Vec<Self> {
        let mut out = vec![*self];
        for axis in 0..D {
            out = out
                .into_iter()
                .flat_map(|c| {
                    let (a, b) = c.bisect(axis);
                    [a, b]
                })
                .collect();
        }
        out
    }
}

/// A finite union of planar cells with pairwise disjoint interiors.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    cells: Vec<Cell<2>>,
}

impl Figure {
    pub fn new(cells: Vec<Cell<2>>) -> Result<Self, GaugeError> {
        let smallest = cells.iter().map(Cell::volume).fold(f64::INFINITY, f64::min);
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                if cells[i].overlap_volume(&cells[j]) >= 1e-14 * smallest {
                    return Err(GaugeError::Overlap(i, j));
                }
            }
        }
        Ok(Self { cells })
    }

    pub fn unit_square() -> Self {
        Self {
            cells: vec![Cell::new([0.0, 0.0], [1.0, 1.0]).expect("unit square")],
        }
    }

    pub fn cells(&self) -> &[Cell<2>] {
        &self.cells
    }

    pub fn area(&self) -> f64 {
        self.cells.iter().map(Cell::volume).sum()
    }
}

/// A closed planar segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Segment {
    pub fn new(a: [f64; 2], b: [f64; 2]) -> Self {
        Self { a, b }
    }

    fn point_at(&self, t: f64) -> [f64; 2] {
        [
            self.a[0] + t * (self.b[0] - self.a[0]),
            self.a[1] + t * (self.b[1] - self.a[1]),
        ]
    }

    /// Parameter of the point closest to `x`.
    fn closest_parameter(&self, x: &[f64; 2]) -> f64 {
        let d = [self.b[0] - self.a[0], self.b[1] - self.a[1]];
        let len2 = d[0] * d[0] + d[1] * d[1];
        if len2 == 0.0 {
            return 0.0;
        }
        (((x[0] - self.a[0]) * d[0] + (x[1] - self.a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    }

    pub fn distance(&self, x: &[f64; 2]) -> f64 {
        dist(&self.point_at(self.closest_parameter(x)), x)
    }

    /// Parameter range of the part inside the closed cell (Liang–Barsky clipping).
    fn clip(&self, cell: &Cell<2>) -> Option<(f64, f64)> {
        let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
        let (lo, hi) = (cell.lo(), cell.hi());
        for k in 0..2 {
            let d = self.b[k] - self.a[k];
            if d == 0.0 {
                if self.a[k] < lo[k] || self.a[k] > hi[k] {
                    return None;
                }
                continue;
            }
            let (mut ta, mut tb) = ((lo[k] - self.a[k]) / d, (hi[k] - self.a[k]) / d);
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return None;
            }
        }
        Some((t0, t1))
    }
}

fn dist(p: &[f64; 2], q: &[f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// A finite union of points and segments in the plane.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ThinSet {
    pub points: Vec<[f64; 2]>,
    pub segments: Vec<Segment>,
}

impl ThinSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.segments.is_empty()
    }

    pub fn distance(&self, x: &[f64; 2]) -> f64 {
        let p = self.points.iter().map(|p| dist(p, x));
        let s = self.segments.iter().map(|s| s.distance(x));
        p.chain(s).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[f64; 2]) -> bool {
        self.distance(x) <= ON_SET_TOL
    }

    /// The point of `T ∩ cell` nearest to `target`, if the intersection is nonempty.
    pub fn nearest_in_cell(&self, cell: &Cell<2>, target: &[f64; 2]) -> Option<[f64; 2]> {
        let mut best: Option<([f64; 2], f64)> = None;
        let mut offer = |p: [f64; 2]| {
            let d = dist(&p, target);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((p, d));
            }
        };
        for p in &self.points {
            if cell.contains(p) {
                offer(*p);
            }
        }
        for s in &self.segments {
            if let Some((t0, t1)) = s.clip(cell) {
                let t = s.closest_parameter(target).clamp(t0, t1);
                // Clipping can leave the point a rounding error outside the cell.
                let p = s.point_at(t);
                let (lo, hi) = (cell.lo(), cell.hi());
                offer([p[0].clamp(lo[0], hi[0]), p[1].clamp(lo[1], hi[1])]);
            }
        }
        best.map(|(p, _)| p)
    }

    /// The `x` coordinates in `[x_lo, x_hi]` where the horizontal line at
    /// height `y` meets `T`, sorted. Segments lying on the line contribute
    /// their endpoints.
    pub fn row_crossings(&self, y: f64, x_lo: f64, x_hi: f64) -> Vec<f64> {
        let mut xs = Vec::new();
        for p in &self.points {
            if p[1] == y {
                xs.push(p[0]);
            }
        }
        for s in &self.segments {
            let (ya, yb) = (s.a[1], s.b[1]);
            if ya == yb {
                if ya == y {
                    xs.push(s.a[0]);
                    xs.push(s.b[0]);
                }
            } else if ya.min(yb) <= y && y <= ya.max(yb) {
                let t = (y - ya) / (yb - ya);
                xs.push(if t == 0.0 {
                    s.a[0]
                } else if t == 1.0 {
                    s.b[0]
                } else {
                    s.a[0] + t * (s.b[0] - s.a[0])
                });
            }
        }
        xs.retain(|&x| x_lo <= x && x <= x_hi);
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }

    /// Heights at which a whole horizontal line can meet `T` in a way that
    /// rows cannot see: the `y` coordinates of points and of horizontal
    /// segments. Crossings of other segments move continuously with the row.
    pub fn critical_heights(&self) -> Vec<f64> {
        let mut ys: Vec<f64> = self.points.iter().map(|p| p[1]).collect();
        for s in &self.segments {
            if s.a[1] == s.b[1] {
                ys.push(s.a[1]);
            }
        }
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        ys
    }
}
