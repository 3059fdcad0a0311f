//! Minimization of biquadratic forms over a product of unit spheres.
//!
//! Both the rank-1 gap and the Legendre–Hadamard constant minimize a form
//! `Q(a, b)` that is quadratic in `a` for fixed `b` and quadratic in `b` for
//! fixed `a`. A coarse deterministic grid seeds the search on the sphere of
//! the smaller dimension (the other factor is solved exactly as a smallest
//! eigenvector), then alternating exact half-steps refine the best seeds.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// A form `Q(a, b) = aᵀ K(b) a = bᵀ K(a) b` on `ℝ^m × ℝ^n`.
pub trait BiquadraticForm {
    /// `(m, n)`.
    fn dims(&self) -> (usize, usize);
    /// The symmetric `n×n` matrix `K(a)` with `Q(a, b) = bᵀ K(a) b`.
    fn matrix_for_b(&self, a: &DVector<f64>) -> DMatrix<f64>;
    /// The symmetric `m×m` matrix `K(b)` with `Q(a, b) = aᵀ K(b) a`.
    fn matrix_for_a(&self, b: &DVector<f64>) -> DMatrix<f64>;

    fn value(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        (b.transpose() * self.matrix_for_b(a) * b)[(0, 0)]
    }
}

/// Settings of the product-of-spheres search.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSearch {
    /// Grid points per angular dimension when the gridded sphere has
    /// dimension at most 3.
    pub grid_points: usize,
    /// Seeded random samples used instead of a grid in higher dimensions.
    pub random_samples: usize,
    /// Number of best grid points refined by alternating minimization.
    pub refine_seeds: usize,
    pub rel_tol: f64,
    pub max_iterations: usize,
    pub rng_seed: u64,
}

impl Default for SphereSearch {
    fn default() -> Self {
        Self {
            grid_points: 64,
            random_samples: 4096,
            refine_seeds: 8,
            rel_tol: 1e-9,
            max_iterations: 500,
            rng_seed: 0,
        }
    }
}

impl SphereSearch {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereMinimum {
    pub a: DVector<f64>,
    pub b: DVector<f64>,
    pub value: f64,
    /// Alternating iterations spent on the winning seed.
    pub iterations: usize,
}

const ABS_FLOOR: f64 = 1e-30;

/// Smallest eigenpair of a symmetric matrix. Ties resolve to the lowest index.
fn smallest_eigenpair(mat: DMatrix<f64>) -> (f64, DVector<f64>) {
    let eig = SymmetricEigen::new(mat);
    let mut idx = 0;
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        if v < eig.eigenvalues[idx] {
            idx = i;
        }
    }
    let mut vec = eig.eigenvectors.column(idx).into_owned();
    let norm = vec.norm();
    vec /= norm;
    (eig.eigenvalues[idx], vec)
}

/// Points covering the unit sphere in `ℝ^dim` up to the identification `x ~ −x`.
pub fn sphere_seeds(dim: usize, search: &SphereSearch) -> Vec<DVector<f64>> {
    let g = search.grid_points.max(2);
    match dim {
        0 => Vec::new(),
        1 => vec![DVector::from_element(1, 1.0)],
        2 => (0..g)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / g as f64;
                DVector::from_column_slice(&[t.cos(), t.sin()])
            })
            .collect(),
        3 => {
            let mut out = Vec::with_capacity(g * g);
            for i in 0..g {
                let theta = std::f64::consts::FRAC_PI_2 * i as f64 / (g - 1) as f64;
                for j in 0..g {
                    let phi = 2.0 * std::f64::consts::PI * j as f64 / g as f64;
                    out.push(DVector::from_column_slice(&[
                        theta.cos(),
                        theta.sin() * phi.cos(),
                        theta.sin() * phi.sin(),
                    ]));
                }
            }
            out
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(search.rng_seed);
            let mut out = Vec::with_capacity(search.random_samples + 1);
            let mut first = DVector::zeros(dim);
            first[0] = 1.0;
            out.push(first);
            while out.len() < search.random_samples.max(1) + 1 {
                let v = DVector::from_fn(dim, |_, _| StandardNormal.sample(&mut rng));
                let norm: f64 = v.norm();
                if norm > 1e-12 {
                    out.push(v / norm);
                }
            }
            out
        }
    }
}

/// Swaps the roles of `a` and `b` so the grid always lives on the smaller sphere.
struct Transposed<'a, F: BiquadraticForm + ?Sized>(&'a F);

impl<F: BiquadraticForm + ?Sized> BiquadraticForm for Transposed<'_, F> {
    fn dims(&self) -> (usize, usize) {
        let (m, n) = self.0.dims();
        (n, m)
    }
    fn matrix_for_b(&self, a: &DVector<f64>) -> DMatrix<f64> {
        self.0.matrix_for_a(a)
    }
    fn matrix_for_a(&self, b: &DVector<f64>) -> DMatrix<f64> {
        self.0.matrix_for_b(b)
    }
}

/// Global minimum (up to the search's resolution) of `Q` over `|a| = |b| = 1`.
pub fn minimize_biquadratic<F: BiquadraticForm + ?Sized>(
    form: &F,
    search: &SphereSearch,
) -> SphereMinimum {
    let (m, n) = form.dims();
    if m <= n {
        minimize_gridding_a(form, search)
    } else {
        let t = minimize_gridding_a(&Transposed(form), search);
        SphereMinimum {
            a: t.b,
            b: t.a,
            value: t.value,
            iterations: t.iterations,
        }
    }
}

fn minimize_gridding_a<F: BiquadraticForm + ?Sized>(
    form: &F,
    search: &SphereSearch,
) -> SphereMinimum {
    let (m, _) = form.dims();
    let seeds = sphere_seeds(m, search);

    // Profile value min_b Q(a, b) at every seed.
    let mut scored: Vec<(f64, usize, DVector<f64>)> = seeds
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let (v, b) = smallest_eigenpair(form.matrix_for_b(a));
            (v, i, b)
        })
        .collect();
    scored.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    scored.truncate(search.refine_seeds.max(1));

    let mut best: Option<SphereMinimum> = None;
    for (_, idx, b0) in scored {
        let mut a = seeds[idx].clone();
        let mut b = b0;
        let mut value = form.value(&a, &b);
        let mut iterations = 0;
        while iterations < search.max_iterations {
            iterations += 1;
            let (_, a_next) = smallest_eigenpair(form.matrix_for_a(&b));
            let (_, b_next) = smallest_eigenpair(form.matrix_for_b(&a_next));
            let v_next = form.value(&a_next, &b_next);
            let change = value - v_next;
            a = a_next;
            b = b_next;
            let done = change.abs() <= search.rel_tol * value.abs() + ABS_FLOOR;
            value = v_next.min(value);
            if done {
                break;
            }
        }
        let value = form.value(&a, &b);
        if best.as_ref().is_none_or(|cur| value < cur.value) {
            best = Some(SphereMinimum {
                a,
                b,
                value,
                iterations,
            });
        }
    }
    best.expect("at least one seed is refined")
}
