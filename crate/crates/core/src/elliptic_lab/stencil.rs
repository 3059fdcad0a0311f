//! Difference stencils: gradients, difference quotients and pointwise
//! distances to a matrix subspace.

use serde::Serialize;

use super::grid::{GridField, MIN_POINTS};
use super::GridError;
use crate::json17;
use crate::matrix_space::MatrixSubspace;

/// Second-order derivative of component `c` along `axis` at `(i, j)`:
/// centered inside, one-sided three-point at the ends of the line.
pub(crate) fn derivative(u: &GridField, i: usize, j: usize, c: usize, axis: usize) -> f64 {
    let (k, n) = if axis == 0 { (i, u.nx()) } else { (j, u.ny()) };
    let at = |k: usize| {
        if axis == 0 {
            u.get(k, j, c)
        } else {
            u.get(i, k, c)
        }
    };
    let h2 = 2.0 * u.h();
    if k == 0 {
        (-3.0 * at(0) + 4.0 * at(1) - at(2)) / h2
    } else if k == n - 1 {
        (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / h2
    } else {
        (at(k + 1) - at(k - 1)) / h2
    }
}

/// `Du` as an `m × 2` matrix field; the entry `∂u_r/∂x_c` is component `2r + c`.
pub fn finite_difference_gradient(u: &GridField) -> Result<GridField, GridError> {
    let m = u.components();
    let mut values = Vec::with_capacity(u.nx() * u.ny() * 2 * m);
    for j in 0..u.ny() {
        for i in 0..u.nx() {
            for r in 0..m {
                values.push(derivative(u, i, j, r, 0));
                values.push(derivative(u, i, j, r, 1));
            }
        }
    }
    GridField::new(u.origin(), u.h(), u.nx(), u.ny(), 2 * m, values)
}

/// Row-major flattened basis matrices of `space`, checked against a field with
/// `components` entries per point.
fn flat_basis(space: &MatrixSubspace, components: usize) -> Result<Vec<Vec<f64>>, GridError> {
    let (m, n) = (space.rows(), space.cols());
    if m * n != components {
        return Err(GridError::ComponentMismatch {
            expected: m * n,
            found: components,
        });
    }
    Ok(space
        .basis()
        .iter()
        .map(|b| {
            (0..m)
                .flat_map(|i| (0..n).map(move |a| b[(i, a)]))
                .collect()
        })
        .collect())
}

fn distance_to(basis: &[Vec<f64>], v: &[f64], residual: &mut [f64]) -> f64 {
    residual.copy_from_slice(v);
    for b in basis {
        let c: f64 = b.iter().zip(v).map(|(x, y)| x * y).sum();
        for (r, x) in residual.iter_mut().zip(b) {
            *r -= c * x;
        }
    }
    residual.iter().map(|r| r * r).sum::<f64>().sqrt()
}

fn max_distance(
    du: &GridField,
    space: &MatrixSubspace,
    i_range: std::ops::Range<usize>,
    j_range: std::ops::Range<usize>,
) -> Result<f64, GridError> {
    let basis = flat_basis(space, du.components())?;
    let mut residual = vec![0.0; du.components()];
    let mut worst: f64 = 0.0;
    for j in j_range {
        for i in i_range.clone() {
            worst = worst.max(distance_to(&basis, du.at(i, j), &mut residual));
        }
    }
    Ok(worst)
}

/// `max_x |A(Du(x))|`, the largest Frobenius distance from `Du` to `L`.
pub fn inclusion_distance(du: &GridField, space: &MatrixSubspace) -> Result<f64, GridError> {
    max_distance(du, space, 0..du.nx(), 0..du.ny())
}

/// `w(x) = (u(x + s·h·e) − u(x)) / (s·h)` on the lattice shrunk by `s = steps`
/// points along `direction` (0 for `x`, 1 for `y`).
pub fn difference_quotient(
    u: &GridField,
    direction: usize,
    steps: usize,
) -> Result<GridField, GridError> {
    if direction > 1 {
        return Err(GridError::InvalidArgument(format!(
            "direction {direction} is not 0 or 1"
        )));
    }
    if steps == 0 {
        return Err(GridError::InvalidArgument(
            "steps must be at least 1".into(),
        ));
    }
    let (mut nx, mut ny) = (u.nx(), u.ny());
    let shrunk = if direction == 0 { &mut nx } else { &mut ny };
    if *shrunk < steps + MIN_POINTS {
        return Err(GridError::TooSmall {
            nx: u.nx(),
            ny: u.ny(),
            min: steps + MIN_POINTS,
        });
    }
    *shrunk -= steps;
    let (di, dj) = if direction == 0 {
        (steps, 0)
    } else {
        (0, steps)
    };
    let scale = 1.0 / (steps as f64 * u.h());
    let m = u.components();
    let mut values = Vec::with_capacity(nx * ny * m);
    for j in 0..ny {
        for i in 0..nx {
            let (ahead, here) = (u.at(i + di, j + dj), u.at(i, j));
            values.extend(ahead.iter().zip(here).map(|(a, b)| (a - b) * scale));
        }
    }
    GridField::new(u.origin(), u.h(), nx, ny, m, values)
}

/// Distances to `L` of `Du` and of `Dw` for a difference quotient `w` of `u`.
///
/// On interior nodes `Dw` is a difference of two shifted copies of `Du`
/// divided by `s·h`, so `after ≤ bound = 2·before/(s·h)`; in particular `Dw`
/// lies in `L` whenever `Du` does.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InclusionPair {
    #[serde(serialize_with = "json17::serialize")]
    pub before: f64,
    #[serde(serialize_with = "json17::serialize")]
    pub after: f64,
    #[serde(serialize_with = "json17::serialize")]
    pub bound: f64,
}

impl InclusionPair {
    /// `after ≤ bound` up to `slack`.
    pub fn holds(&self, slack: f64) -> bool {
        self.after <= self.bound + slack
    }
}

/// Takes one difference quotient and reports the pair of distances, together
/// with the quotient itself for further levels.
pub fn inclusion_pair(
    u: &GridField,
    space: &MatrixSubspace,
    direction: usize,
    steps: usize,
) -> Result<(InclusionPair, GridField), GridError> {
    let before = inclusion_distance(&finite_difference_gradient(u)?, space)?;
    let w = difference_quotient(u, direction, steps)?;
    let dw = finite_difference_gradient(&w)?;
    let after = max_distance(&dw, space, 1..w.nx() - 1, 1..w.ny() - 1)?;
    let bound = 2.0 * before / (steps as f64 * u.h());
    Ok((
        InclusionPair {
            before,
            after,
            bound,
        },
        w,
    ))
}

/// `max |u_x − v_y| + |u_y + v_x|` over interior nodes, centered differences.
pub fn cauchy_riemann_residual(u: &GridField, v: &GridField) -> Result<f64, GridError> {
    if !u.same_lattice(v) {
        return Err(GridError::GridMismatch);
    }
    for f in [u, v] {
        if f.components() != 1 {
            return Err(GridError::ComponentMismatch {
                expected: 1,
                found: f.components(),
            });
        }
    }
    let mut worst: f64 = 0.0;
    for j in 1..u.ny() - 1 {
        for i in 1..u.nx() - 1 {
            let d = |f: &GridField, axis| derivative(f, i, j, 0, axis);
            let r = (d(u, 0) - d(v, 1)).abs() + (d(u, 1) + d(v, 0)).abs();
            worst = worst.max(r);
        }
    }
    Ok(worst)
}
