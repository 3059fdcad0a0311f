//! The coefficient tensor `A^{αβ}_{ij}` of the projection onto `L⊥`.

use nalgebra::{DMatrix, DVector};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use super::sphere::{minimize_biquadratic, BiquadraticForm, SphereSearch};
use super::{elementary_basis, MatrixSpaceError, MatrixSubspace};
use crate::json17;

/// Four-index coefficients stored as the flattened `(mn)×(mn)` matrix with
/// row `i·n + α` and column `j·n + β`, so entry `(iα, jβ)` is `A^{αβ}_{ij}`,
/// the `(i, α)` entry of `A(e^j_β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticTensor {
    m: usize,
    n: usize,
    flat: DMatrix<f64>,
    mu: f64,
}

impl EllipticTensor {
    /// Projects every elementary matrix `e^j_β` onto `L⊥` and reads off the
    /// entries, then computes `μ` with `search`.
    pub fn from_subspace(space: &MatrixSubspace, search: &SphereSearch) -> Self {
        let (m, n) = (space.rows(), space.cols());
        let mut flat = DMatrix::zeros(m * n, m * n);
        for (col, e) in elementary_basis(m, n).iter().enumerate() {
            let image = e - space.project_unchecked(e);
            for i in 0..m {
                for alpha in 0..n {
                    flat[(i * n + alpha, col)] = image[(i, alpha)];
                }
            }
        }
        let mut tensor = Self {
            m,
            n,
            flat,
            mu: 0.0,
        };
        tensor.mu = tensor.legendre_hadamard_constant(search);
        tensor
    }

    /// Wraps an explicit flattened coefficient matrix. `μ` is computed with `search`.
    pub fn from_flat(
        m: usize,
        n: usize,
        flat: DMatrix<f64>,
        search: &SphereSearch,
    ) -> Result<Self, MatrixSpaceError> {
        if m == 0 || n == 0 {
            return Err(MatrixSpaceError::EmptyShape { m, n });
        }
        if flat.shape() != (m * n, m * n) {
            return Err(MatrixSpaceError::DimensionMismatch {
                expected: (m * n, m * n),
                found: flat.shape(),
            });
        }
        let mut tensor = Self {
            m,
            n,
            flat,
            mu: 0.0,
        };
        tensor.mu = tensor.legendre_hadamard_constant(search);
        Ok(tensor)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    /// `A^{αβ}_{ij}` with zero-based indices.
    pub fn get(&self, i: usize, alpha: usize, j: usize, beta: usize) -> f64 {
        self.flat[(i * self.n + alpha, j * self.n + beta)]
    }

    pub fn flattened(&self) -> &DMatrix<f64> {
        &self.flat
    }

    /// The ellipticity constant `μ ≥ 0`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `Σ a_i b_α a_j b_β A^{αβ}_{ij}` evaluated directly from the four indices.
    pub fn quadratic_form(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.m {
            for alpha in 0..self.n {
                for j in 0..self.m {
                    for beta in 0..self.n {
                        sum += a[i] * b[alpha] * a[j] * b[beta] * self.get(i, alpha, j, beta);
                    }
                }
            }
        }
        sum
    }

    /// Minimum of [`quadratic_form`](Self::quadratic_form) over unit `a`, `b`,
    /// clamped at zero.
    pub fn legendre_hadamard_constant(&self, search: &SphereSearch) -> f64 {
        minimize_biquadratic(self, search).value.max(0.0)
    }

    /// Whether the flattened matrix is a symmetric idempotent to `tol`.
    pub fn is_projection(&self, tol: f64) -> bool {
        let sq = &self.flat * &self.flat;
        (sq - &self.flat).amax() <= tol && (self.flat.transpose() - &self.flat).amax() <= tol
    }

    /// Nested `[i][α][j][β]` view of the coefficients.
    pub fn coeffs(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        (0..self.m)
            .map(|i| {
                (0..self.n)
                    .map(|alpha| {
                        (0..self.m)
                            .map(|j| {
                                (0..self.n)
                                    .map(|beta| self.get(i, alpha, j, beta))
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

impl BiquadraticForm for EllipticTensor {
    fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn matrix_for_b(&self, a: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |alpha, beta| {
            let mut s = 0.0;
            for i in 0..self.m {
                for j in 0..self.m {
                    s += a[i] * a[j] * self.get(i, alpha, j, beta);
                }
            }
            s
        })
    }

    fn matrix_for_a(&self, b: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.m, |i, j| {
            let mut s = 0.0;
            for alpha in 0..self.n {
                for beta in 0..self.n {
                    s += b[alpha] * b[beta] * self.get(i, alpha, j, beta);
                }
            }
            s
        })
    }
}

impl Serialize for EllipticTensor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let coeffs = self.coeffs();
        let nested: Vec<Vec<Vec<json17::Floats>>> = coeffs
            .iter()
            .map(|x| {
                x.iter()
                    .map(|y| y.iter().map(|z| json17::Floats(z)).collect())
                    .collect()
            })
            .collect();
        let mut st = s.serialize_struct("EllipticTensor", 4)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("coeffs", &nested)?;
        st.serialize_field("mu", &json17::Float(self.mu))?;
        st.end()
    }
}
