use super::geometry::Figure;
use super::quadrature::adaptive_gauss_kronrod;
use super::GaugeError;

/// An axis-parallel piece of a figure's boundary with outward normal
/// `sign·e_axis`. The edge lies on the line `x_axis = coord` and spans
/// `[lo, hi]` in the other coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub axis: usize,
    pub coord: f64,
    pub lo: f64,
    pub hi: f64,
    pub sign: f64,
}

impl Edge {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    fn point(&self, t: f64) -> [f64; 2] {
        if self.axis == 0 {
            [self.coord, t]
        } else {
            [t, self.coord]
        }
    }
}

/// Outward oriented boundary of `figure`. Faces shared by two cells carry
/// opposite orientations and cancel; what remains is merged into maximal edges.
pub fn boundary_edges(figure: &Figure) -> Vec<Edge> {
    let mut out = Vec::new();
    for axis in 0..2 {
        let other = 1 - axis;
        // (line coordinate, lo, hi, sign) for every cell face normal to `axis`.
        let mut faces: Vec<(f64, f64, f64, i32)> = Vec::new();
        for cell in figure.cells() {
            let (lo, hi) = (cell.lo(), cell.hi());
            faces.push((hi[axis], lo[other], hi[other], 1));
            faces.push((lo[axis], lo[other], hi[other], -1));
        }
        faces.sort_by(|a, b| a.0.total_cmp(&b.0));
        for group in faces.chunk_by(|a, b| a.0 == b.0) {
            let coord = group[0].0;
            let mut nodes: Vec<f64> = group.iter().flat_map(|f| [f.1, f.2]).collect();
            nodes.sort_by(f64::total_cmp);
            nodes.dedup();
            let mut current: Option<Edge> = None;
            for w in nodes.windows(2) {
                let net: i32 = group
                    .iter()
                    .filter(|f| f.1 <= w[0] && w[1] <= f.2)
                    .map(|f| f.3)
                    .sum();
                let sign = net.signum() as f64;
                match current.as_mut() {
                    Some(e) if net != 0 && e.sign == sign && e.hi == w[0] => e.hi = w[1],
                    _ => {
                        out.extend(current.take());
                        if net != 0 {
                            current = Some(Edge {
                                axis,
                                coord,
                                lo: w[0],
                                hi: w[1],
                                sign,
                            });
                        }
                    }
                }
            }
            out.extend(current);
        }
    }
    out
}

/// `∫_{∂A} v·n` over the outward boundary of `figure`, each edge integrated
/// by adaptive quadrature with a share of `quad_tol` proportional to its length.
pub fn boundary_flux(
    v: impl Fn(&[f64; 2]) -> [f64; 2],
    figure: &Figure,
    quad_tol: f64,
) -> Result<f64, GaugeError> {
    super::check_tol(quad_tol)?;
    let edges = boundary_edges(figure);
    let perimeter: f64 = edges.iter().map(Edge::length).sum();
    let mut total = 0.0;
    for e in &edges {
        let share = quad_tol * e.length() / perimeter;
        let normal = |t: f64| v(&e.point(t))[e.axis];
        total += e.sign * adaptive_gauss_kronrod(&normal, e.lo, e.hi, share)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge_integral::Cell;

    #[test]
    fn square_has_four_edges() {
        let edges = boundary_edges(&Figure::unit_square());
        assert_eq!(edges.len(), 4);
        let perimeter: f64 = edges.iter().map(Edge::length).sum();
        assert_eq!(perimeter, 4.0);
    }

    #[test]
    fn internal_faces_cancel() {
        let fig = Figure::new(vec![
            Cell::new([0.0, 0.0], [0.5, 1.0]).unwrap(),
            Cell::new([0.5, 0.0], [1.0, 0.5]).unwrap(),
            Cell::new([0.5, 0.5], [1.0, 1.0]).unwrap(),
        ])
        .unwrap();
        let edges = boundary_edges(&fig);
        // Same outline as the unit square once collinear pieces merge.
        assert_eq!(edges.len(), 4);
        assert!(edges.iter().all(|e| e.coord == 0.0 || e.coord == 1.0));
    }

    #[test]
    fn l_shape_outline() {
        let fig = Figure::new(vec![
            Cell::new([0.0, 0.0], [2.0, 1.0]).unwrap(),
            Cell::new([0.0, 1.0], [1.0, 2.0]).unwrap(),
        ])
        .unwrap();
        let edges = boundary_edges(&fig);
        assert_eq!(edges.len(), 6);
        let perimeter: f64 = edges.iter().map(Edge::length).sum();
        assert_eq!(perimeter, 8.0);
        // Flux of (x, y) is twice the area.
        let flux = boundary_flux(|p| [p[0], p[1]], &fig, 1e-12).unwrap();
        assert!((flux - 6.0).abs() < 1e-12);
    }

    #[test]
    fn constant_field_has_no_flux() {
        let flux = boundary_flux(|_| [1.0, 0.0], &Figure::unit_square(), 1e-12).unwrap();
        assert_eq!(flux, 0.0);
    }
}
