#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rigidity_core::matrix_space::MatrixSubspace;

pub fn gaussian_matrix(m: usize, n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| rng.sample(StandardNormal))
}

pub fn unit_vector(dim: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

/// Span of `1..mn` Gaussian matrices, the count drawn uniformly.
pub fn random_subspace(m: usize, n: usize, rng: &mut ChaCha8Rng) -> MatrixSubspace {
    let k = rng.random_range(1..m * n);
    let raw: Vec<_> = (0..k).map(|_| gaussian_matrix(m, n, rng)).collect();
    MatrixSubspace::orthonormalize(m, n, &raw).expect("shapes agree")
}
