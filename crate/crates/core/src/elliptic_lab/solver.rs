//! Dirichlet problems for `Σ_α ∂_α(Σ_{j,β} A^{αβ}_{ij} ∂_β v_j) = 0` on a grid.
//!
//! Second derivatives use the centered three-point stencils for `∂_xx`,
//! `∂_yy` and the four-point cross stencil for `∂_xy`. For a tensor with
//! Legendre–Hadamard constant `μ > 0` the negated discrete operator is
//! symmetric positive definite on interior unknowns, so conjugate gradients
//! apply.

use serde::Serialize;

use super::grid::GridField;
use super::GridError;
use crate::json17;
use crate::matrix_space::EllipticTensor;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Target for the largest pointwise residual of the discrete operator.
    #[serde(serialize_with = "json17::serialize")]
    pub tol: f64,
    pub max_iterations: usize,
    /// Tensors with `μ ≤ mu_tol` are rejected.
    #[serde(serialize_with = "json17::serialize")]
    pub mu_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iterations: 50_000,
            mu_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Interior solution merged with the boundary data.
    pub field: GridField,
    pub iterations: usize,
    /// Largest pointwise residual of the discrete operator over interior nodes.
    pub residual: f64,
}

/// Per-pair stencil weights `(a11, a22, a12 + a21)` indexed `i·m + j`.
struct Coefficients {
    m: usize,
    entries: Vec<[f64; 3]>,
}

impl Coefficients {
    fn new(tensor: &EllipticTensor) -> Result<Self, GridError> {
        let (m, n) = (tensor.rows(), tensor.cols());
        if n != 2 {
            return Err(GridError::NotPlanar { m, n });
        }
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                entries.push([
                    tensor.get(i, 0, j, 0),
                    tensor.get(i, 1, j, 1),
                    tensor.get(i, 0, j, 1) + tensor.get(i, 1, j, 0),
                ]);
            }
        }
        Ok(Self { m, entries })
    }

    /// `(Lv)` at interior node `(x, y)` of a field stored with `m` components
    /// per point in a row of `nx` points.
    fn apply_at(&self, v: &[f64], nx: usize, x: usize, y: usize, h: f64, out: &mut [f64]) {
        let m = self.m;
        let at = |i: usize, j: usize, c: usize| v[(j * nx + i) * m + c];
        let (h2, h2x4) = (h * h, 4.0 * h * h);
        out.fill(0.0);
        for j in 0..m {
            let centre = at(x, y, j);
            let dxx = (at(x + 1, y, j) - 2.0 * centre + at(x - 1, y, j)) / h2;
            let dyy = (at(x, y + 1, j) - 2.0 * centre + at(x, y - 1, j)) / h2;
            let dxy = (at(x + 1, y + 1, j) - at(x + 1, y - 1, j) - at(x - 1, y + 1, j)
                + at(x - 1, y - 1, j))
                / h2x4;
            for (i, o) in out.iter_mut().enumerate() {
                let [a11, a22, a12] = self.entries[i * m + j];
                *o += a11 * dxx + a22 * dyy + a12 * dxy;
            }
        }
    }

    /// `Lv` on interior nodes, zero on the boundary ring.
    fn apply(&self, v: &[f64], nx: usize, ny: usize, h: f64, out: &mut [f64]) {
        let m = self.m;
        out.fill(0.0);
        let mut buf = vec![0.0; m];
        for y in 1..ny - 1 {
            for x in 1..nx - 1 {
                self.apply_at(v, nx, x, y, h, &mut buf);
                out[(y * nx + x) * m..(y * nx + x + 1) * m].copy_from_slice(&buf);
            }
        }
    }
}

fn check_field(tensor: &EllipticTensor, v: &GridField) -> Result<Coefficients, GridError> {
    let coeffs = Coefficients::new(tensor)?;
    if v.components() != coeffs.m {
        return Err(GridError::ComponentMismatch {
            expected: coeffs.m,
            found: v.components(),
        });
    }
    Ok(coeffs)
}

/// The discrete operator applied to `v`; boundary nodes are set to zero.
pub fn apply_operator(tensor: &EllipticTensor, v: &GridField) -> Result<GridField, GridError> {
    let coeffs = check_field(tensor, v)?;
    let mut out = vec![0.0; v.values().len()];
    coeffs.apply(v.values(), v.nx(), v.ny(), v.h(), &mut out);
    GridField::new(v.origin(), v.h(), v.nx(), v.ny(), v.components(), out)
}

/// Largest `|Lv|` over interior nodes.
pub fn operator_residual(tensor: &EllipticTensor, v: &GridField) -> Result<f64, GridError> {
    Ok(max_abs(apply_operator(tensor, v)?.values()))
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves the Dirichlet problem with data taken from the boundary ring of
/// `boundary` (interior values are ignored) by conjugate gradients on `−L`.
pub fn assemble_and_solve_system(
    tensor: &EllipticTensor,
    boundary: &GridField,
    opts: &SolverOptions,
) -> Result<SolveReport, GridError> {
    let coeffs = check_field(tensor, boundary)?;
    if tensor.mu() <= opts.mu_tol {
        return Err(GridError::NotElliptic {
            mu: tensor.mu(),
            tol: opts.mu_tol,
        });
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(GridError::InvalidArgument(format!(
            "solver tolerance {} is not positive",
            opts.tol
        )));
    }
    let (nx, ny, m, h) = (
        boundary.nx(),
        boundary.ny(),
        boundary.components(),
        boundary.h(),
    );
    let interior = |k: usize| {
        let (x, y) = ((k / m) % nx, (k / m) / nx);
        x > 0 && x + 1 < nx && y > 0 && y + 1 < ny
    };

    let mut v = boundary.values().to_vec();
    for (k, val) in v.iter_mut().enumerate() {
        if interior(k) {
            *val = 0.0;
        }
    }
    let len = v.len();
    // r = L v is the residual of −L v = 0; r and p vanish on the ring.
    let mut r = vec![0.0; len];
    coeffs.apply(&v, nx, ny, h, &mut r);
    let mut p = r.clone();
    let mut kp = vec![0.0; len];
    let mut rr = dot(&r, &r);
    let mut iterations = 0;
    let mut since_refresh = 0;
    while max_abs(&r) > opts.tol {
        if iterations >= opts.max_iterations {
            return Err(GridError::SolverNonConvergence {
                iterations,
                residual: max_abs(&r),
            });
        }
        coeffs.apply(&p, nx, ny, h, &mut kp);
        kp.iter_mut().for_each(|x| *x = -*x);
        let pkp = dot(&p, &kp);
        if pkp.is_nan() || pkp <= 0.0 {
            return Err(GridError::SolverNonConvergence {
                iterations,
                residual: max_abs(&r),
            });
        }
        let alpha = rr / pkp;
        for k in 0..len {
            v[k] += alpha * p[k];
            r[k] -= alpha * kp[k];
        }
        iterations += 1;
        since_refresh += 1;
        if since_refresh == 200 || max_abs(&r) <= opts.tol {
            coeffs.apply(&v, nx, ny, h, &mut r);
            since_refresh = 0;
        }
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        rr = rr_next;
        for k in 0..len {
            p[k] = r[k] + beta * p[k];
        }
    }
    let field = GridField::new(boundary.origin(), h, nx, ny, m, v)?;
    let residual = operator_residual(tensor, &field)?;
    Ok(SolveReport {
        field,
        iterations,
        residual,
    })
}

/// Normalized DFT magnitudes `|ĉ_k| / |ĉ_0|`, `k = 0..=N/2`, of the middle row
/// of component `c` after multiplying by a smooth window that vanishes at both
/// ends. Analytic rows give rapidly decaying profiles.
pub fn spectral_profile(u: &GridField, c: usize) -> Result<Vec<f64>, GridError> {
    if c >= u.components() {
        return Err(GridError::ComponentMismatch {
            expected: c + 1,
            found: u.components(),
        });
    }
    let n = u.nx();
    let j = u.ny() / 2;
    let row: Vec<f64> = (0..n)
        .map(|i| {
            let s = 2.0 * i as f64 / (n - 1) as f64 - 1.0;
            let window = if s.abs() < 1.0 {
                (-1.0 / (1.0 - s * s)).exp()
            } else {
                0.0
            };
            window * u.get(i, j, c)
        })
        .collect();
    let coeff = |k: usize| {
        let (mut re, mut im) = (0.0, 0.0);
        for (t, x) in row.iter().enumerate() {
            let (s, co) = (std::f64::consts::TAU * (k * t % n) as f64 / n as f64).sin_cos();
            re += x * co;
            im -= x * s;
        }
        re.hypot(im)
    };
    let c0 = coeff(0);
    if c0 == 0.0 {
        return Ok(vec![0.0; n / 2 + 1]);
    }
    Ok((0..=n / 2).map(|k| coeff(k) / c0).collect())
}
