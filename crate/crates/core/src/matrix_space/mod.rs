//! Linear subspaces `L ⊂ M^{m×n}` with the Frobenius inner product.
//!
//! A subspace is stored through an orthonormal basis, which makes the
//! orthogonal projector `P_L(M) = Σ_k ⟨M, B_k⟩ B_k` and its complement
//! `A = I − P_L` (the projection onto `L⊥`) cheap to apply.
//!
//! Because `L` is linear, a rank-1 connection `A, B ∈ L` with
//! `rank(A − B) = 1` exists iff `L` itself contains a nonzero rank-1 matrix
//! (`A − B ∈ L`). Such a matrix is a multiple of `a ⊗ b` with unit `a`, `b`,
//! and lies in `L` iff `A(a ⊗ b) = 0`. The rank-1 gap
//! `λ = min_{|a|=|b|=1} |A(a ⊗ b)|` is therefore zero exactly when a
//! connection exists.

mod io;
mod sphere;
mod tensor;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

pub use io::SubspaceFile;
pub use sphere::{minimize_biquadratic, BiquadraticForm, SphereMinimum, SphereSearch};
pub use tensor::EllipticTensor;

use crate::json17;

/// Tolerance below which a Gram–Schmidt residual counts as linearly dependent.
const DEPENDENCE_TOL: f64 = 1e-10;

/// Default threshold for [`MatrixSubspace::has_rank1_connection`].
pub const DEFAULT_RANK1_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixSpaceError {
    #[error("matrix shape must be positive, got {m}×{n}")]
    EmptyShape { m: usize, n: usize },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("vector length {found} does not match dimension {expected}")]
    VectorLength { expected: usize, found: usize },
    #[error("invalid subspace description: {0}")]
    Parse(String),
}

/// Which orthogonal component a projection lands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    /// The subspace `L` itself.
    L,
    /// The orthogonal complement `L⊥`; this projection is the operator `A`.
    LPerp,
}

/// A subspace of real `m×n` matrices held through a Frobenius-orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSubspace {
    m: usize,
    n: usize,
    basis: Vec<DMatrix<f64>>,
}

impl MatrixSubspace {
    /// Builds the span of `raw` by modified Gram–Schmidt with one
    /// re-orthogonalization pass. Dependent inputs are dropped, so `dim()` can
    /// be smaller than `raw.len()`.
    pub fn orthonormalize(
        m: usize,
        n: usize,
        raw: &[DMatrix<f64>],
    ) -> Result<Self, MatrixSpaceError> {
        if m == 0 || n == 0 {
            return Err(MatrixSpaceError::EmptyShape { m, n });
        }
        let scale = raw.iter().map(|b| b.norm()).fold(0.0_f64, f64::max);
        let mut basis: Vec<DMatrix<f64>> = Vec::new();
        for mat in raw {
            if mat.shape() != (m, n) {
                return Err(MatrixSpaceError::DimensionMismatch {
                    expected: (m, n),
                    found: mat.shape(),
                });
            }
            let mut v = mat.clone();
            for _ in 0..2 {
                for q in &basis {
                    let c = q.dot(&v);
                    v -= q * c;
                }
            }
            let norm = v.norm();
            if norm > DEPENDENCE_TOL * scale.max(f64::MIN_POSITIVE) && basis.len() < m * n {
                basis.push(v / norm);
            }
        }
        Ok(Self { m, n, basis })
    }

    /// The trivial subspace `{0}`.
    pub fn zero(m: usize, n: usize) -> Result<Self, MatrixSpaceError> {
        Self::orthonormalize(m, n, &[])
    }

    /// All of `M^{m×n}`.
    pub fn full(m: usize, n: usize) -> Result<Self, MatrixSpaceError> {
        Self::orthonormalize(m, n, &elementary_basis(m, n))
    }

    /// The conformal matrices `{(a −b; b a)}`, i.e. the differentials of
    /// complex-differentiable maps of the plane.
    pub fn conformal() -> Self {
        let id = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        Self::orthonormalize(2, 2, &[id, rot]).expect("2×2 shape is valid")
    }

    /// Diagonal `n×n` matrices.
    pub fn diagonal(n: usize) -> Result<Self, MatrixSpaceError> {
        let raw: Vec<_> = (0..n)
            .map(|i| {
                let mut e = DMatrix::zeros(n, n);
                e[(i, i)] = 1.0;
                e
            })
            .collect();
        Self::orthonormalize(n, n, &raw)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    /// Dimension `k` of the subspace.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[DMatrix<f64>] {
        &self.basis
    }

    /// Gram matrix `⟨B_i, B_j⟩` of the stored basis.
    pub fn gram(&self) -> DMatrix<f64> {
        let k = self.dim();
        DMatrix::from_fn(k, k, |i, j| self.basis[i].dot(&self.basis[j]))
    }

    fn check_shape(&self, mat: &DMatrix<f64>) -> Result<(), MatrixSpaceError> {
        if mat.shape() != (self.m, self.n) {
            return Err(MatrixSpaceError::DimensionMismatch {
                expected: (self.m, self.n),
                found: mat.shape(),
            });
        }
        Ok(())
    }

    /// Orthogonal projection of `mat` onto `L` or onto `L⊥`.
    pub fn project(
        &self,
        mat: &DMatrix<f64>,
        onto: Component,
    ) -> Result<DMatrix<f64>, MatrixSpaceError> {
        self.check_shape(mat)?;
        let on_l = self.project_unchecked(mat);
        Ok(match onto {
            Component::L => on_l,
            Component::LPerp => mat - on_l,
        })
    }

    /// `A(mat)`, the projection onto `L⊥`.
    pub fn project_perp(&self, mat: &DMatrix<f64>) -> Result<DMatrix<f64>, MatrixSpaceError> {
        self.project(mat, Component::LPerp)
    }

    /// Frobenius distance from `mat` to `L`, i.e. `|A(mat)|`.
    pub fn distance(&self, mat: &DMatrix<f64>) -> Result<f64, MatrixSpaceError> {
        self.check_shape(mat)?;
        let on_l = self.project_unchecked(mat);
        Ok((mat - on_l).norm())
    }

    pub(crate) fn project_unchecked(&self, mat: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.m, self.n);
        for b in &self.basis {
            out += b * b.dot(mat);
        }
        out
    }

    /// The rank-1 gap `λ` together with a minimizing pair `(a, b)`.
    ///
    /// For fixed `a` the objective `|A(a ⊗ b)|² = |b|² − Σ_k (aᵀ B_k b)²` is
    /// a quadratic form in `b`, so each half-step of the alternating search is
    /// a smallest-eigenvector problem (and symmetrically in `a`).
    pub fn rank1_gap(&self, search: &SphereSearch) -> Rank1Certificate {
        let form = ProjectionForm { space: self };
        let best = minimize_biquadratic(&form, search);
        let outer = outer(&best.a, &best.b);
        let gap = (&outer - self.project_unchecked(&outer)).norm();
        Rank1Certificate {
            a: best.a.iter().copied().collect(),
            b: best.b.iter().copied().collect(),
            gap,
        }
    }

    /// Whether `L` admits a rank-1 connection, decided by `λ < tol`.
    ///
    /// Connections `A, B ∈ L` reduce to rank-1 elements `A − B ∈ L`, so the
    /// certificate's `a ⊗ b` is (up to scale) the connecting direction when
    /// the answer is `true`.
    pub fn has_rank1_connection(
        &self,
        tol: f64,
        search: &SphereSearch,
    ) -> (bool, Rank1Certificate) {
        let cert = self.rank1_gap(search);
        (cert.gap < tol, cert)
    }

    /// The coefficient tensor `A^{αβ}_{ij}` of the projection onto `L⊥`,
    /// with `μ` filled in by [`EllipticTensor::legendre_hadamard_constant`].
    pub fn coefficient_tensor(&self, search: &SphereSearch) -> EllipticTensor {
        EllipticTensor::from_subspace(self, search)
    }
}

/// `a ⊗ b`, the matrix with entries `a_i b_j`.
pub fn outer(a: &DVector<f64>, b: &DVector<f64>) -> DMatrix<f64> {
    a * b.transpose()
}

/// The matrices `e^i_α` with a single unit entry, in row-major order.
pub fn elementary_basis(m: usize, n: usize) -> Vec<DMatrix<f64>> {
    (0..m * n)
        .map(|idx| {
            let mut e = DMatrix::zeros(m, n);
            e[(idx / n, idx % n)] = 1.0;
            e
        })
        .collect()
}

/// A pair of unit vectors minimizing `|A(a ⊗ b)|` and the minimum value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rank1Certificate {
    #[serde(serialize_with = "json17::serialize_vec")]
    pub a: Vec<f64>,
    #[serde(serialize_with = "json17::serialize_vec")]
    pub b: Vec<f64>,
    #[serde(serialize_with = "json17::serialize")]
    pub gap: f64,
}

impl Rank1Certificate {
    /// The rank-1 matrix `a ⊗ b`.
    pub fn matrix(&self) -> DMatrix<f64> {
        outer(
            &DVector::from_column_slice(&self.a),
            &DVector::from_column_slice(&self.b),
        )
    }
}

/// `|A(a ⊗ b)|²` seen as a biquadratic form through the orthonormal basis.
struct ProjectionForm<'a> {
    space: &'a MatrixSubspace,
}

impl BiquadraticForm for ProjectionForm<'_> {
    fn dims(&self) -> (usize, usize) {
        (self.space.m, self.space.n)
    }

    fn matrix_for_b(&self, a: &DVector<f64>) -> DMatrix<f64> {
        let n = self.space.n;
        let mut k = DMatrix::identity(n, n) * a.norm_squared();
        for basis in &self.space.basis {
            let c = basis.transpose() * a;
            k -= &c * c.transpose();
        }
        k
    }

    fn matrix_for_a(&self, b: &DVector<f64>) -> DMatrix<f64> {
        let m = self.space.m;
        let mut k = DMatrix::identity(m, m) * b.norm_squared();
        for basis in &self.space.basis {
            let d = basis * b;
            k -= &d * d.transpose();
        }
        k
    }

    fn value(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        self.space
            .distance(&outer(a, b))
            .map_or(f64::NAN, |d| d * d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn m2(r: [f64; 4]) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &r)
    }

    #[test]
    fn orthogonal_inputs_are_normalized() {
        let s = MatrixSubspace::orthonormalize(
            2,
            2,
            &[m2([1.0, 0.0, 0.0, 1.0]), m2([0.0, -1.0, 1.0, 0.0])],
        )
        .unwrap();
        assert_eq!(s.dim(), 2);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.basis()[0], m2([r, 0.0, 0.0, r]), epsilon = 1e-15);
        assert_abs_diff_eq!(s.basis()[1], m2([0.0, -r, r, 0.0]), epsilon = 1e-15);
        assert_abs_diff_eq!(s.gram(), DMatrix::identity(2, 2), epsilon = 1e-12);
    }

    #[test]
    fn dependent_inputs_collapse() {
        let s = MatrixSubspace::orthonormalize(
            2,
            2,
            &[m2([1.0, 0.0, 0.0, 0.0]), m2([2.0, 0.0, 0.0, 0.0])],
        )
        .unwrap();
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn empty_input_is_the_zero_space() {
        let s = MatrixSubspace::orthonormalize(2, 3, &[]).unwrap();
        assert_eq!(s.dim(), 0);
        let mat = DMatrix::from_element(2, 3, 1.5);
        assert_eq!(s.project(&mat, Component::LPerp).unwrap(), mat);
    }

    #[test]
    fn shape_errors() {
        assert_eq!(
            MatrixSubspace::orthonormalize(0, 2, &[]),
            Err(MatrixSpaceError::EmptyShape { m: 0, n: 2 })
        );
        let err = MatrixSubspace::orthonormalize(2, 2, &[DMatrix::zeros(2, 3)]).unwrap_err();
        assert!(matches!(err, MatrixSpaceError::DimensionMismatch { .. }));
        let conf = MatrixSubspace::conformal();
        assert!(conf.project(&DMatrix::zeros(3, 2), Component::L).is_err());
    }

    #[test]
    fn conformal_projections() {
        let conf = MatrixSubspace::conformal();
        let id = m2([1.0, 0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(
            conf.project(&id, Component::L).unwrap(),
            id,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(conf.project_perp(&id).unwrap().norm(), 0.0, epsilon = 1e-15);

        let anti = m2([1.0, 0.0, 0.0, -1.0]);
        assert_abs_diff_eq!(conf.project_perp(&anti).unwrap(), anti, epsilon = 1e-15);

        // Least squares by hand: (1 0; 0 0) = s·I + t·J + rest with the rest ⊥ L
        // gives s = 1/2, t = 0.
        let e11 = m2([1.0, 0.0, 0.0, 0.0]);
        assert_abs_diff_eq!(
            conf.project(&e11, Component::L).unwrap(),
            m2([0.5, 0.0, 0.0, 0.5]),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            conf.project_perp(&e11).unwrap(),
            m2([0.5, 0.0, 0.0, -0.5]),
            epsilon = 1e-15
        );
    }

    #[test]
    fn gap_examples() {
        let search = SphereSearch::default();
        let conf = MatrixSubspace::conformal().rank1_gap(&search);
        assert_abs_diff_eq!(conf.gap, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);

        let zero = MatrixSubspace::zero(2, 2).unwrap().rank1_gap(&search);
        assert_abs_diff_eq!(zero.gap, 1.0, epsilon = 1e-12);

        let diag = MatrixSubspace::diagonal(2).unwrap().rank1_gap(&search);
        assert_abs_diff_eq!(diag.gap, 0.0, epsilon = 1e-12);
        // First grid seed in lexicographic order is a = e₁.
        assert_abs_diff_eq!(diag.a[0].abs(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(diag.b[0].abs(), 1.0, epsilon = 1e-12);

        let full = MatrixSubspace::full(2, 3).unwrap().rank1_gap(&search);
        assert_abs_diff_eq!(full.gap, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn connection_examples() {
        let search = SphereSearch::default();
        let (conn, _) = MatrixSubspace::conformal().has_rank1_connection(1e-6, &search);
        assert!(!conn);
        let (conn, cert) = MatrixSubspace::diagonal(2)
            .unwrap()
            .has_rank1_connection(1e-6, &search);
        assert!(conn);
        let mat = cert.matrix();
        assert_abs_diff_eq!(mat[(0, 0)].abs(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mat.norm(), 1.0, epsilon = 1e-12);

        let single = MatrixSubspace::orthonormalize(2, 2, &[m2([1.0, 0.0, 0.0, 0.0])]).unwrap();
        assert!(single.has_rank1_connection(1e-6, &search).0);
    }

    #[test]
    fn vectors_and_rows_always_connect() {
        // With m = 1 every nonzero matrix is rank-1.
        let row = MatrixSubspace::orthonormalize(
            1,
            3,
            &[DMatrix::from_row_slice(1, 3, &[1.0, 2.0, -1.0])],
        )
        .unwrap();
        let (conn, cert) = row.has_rank1_connection(DEFAULT_RANK1_TOL, &SphereSearch::default());
        assert!(conn, "gap {}", cert.gap);
        let zero_col = MatrixSubspace::zero(3, 1).unwrap();
        assert!(
            !zero_col
                .has_rank1_connection(DEFAULT_RANK1_TOL, &SphereSearch::default())
                .0
        );
    }
}
