use serde::Serialize;

use super::grid::{GridField, MIN_POINTS};
use super::GridError;
use crate::json17;

/// Discrete radial kernel `ρ_ε(x) ∝ exp(−1/(1 − |x|²/ε²))` on the lattice
/// offsets of spacing `h`, normalized to unit discrete mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mollifier {
    #[serde(serialize_with = "json17::serialize")]
    epsilon: f64,
    #[serde(serialize_with = "json17::serialize")]
    h: f64,
    radius: usize,
    #[serde(skip)]
    weights: Vec<f64>,
}

impl Mollifier {
    /// Requires `ε ≥ 2h` so the kernel spans at least two lattice steps.
    pub fn new(epsilon: f64, h: f64) -> Result<Self, GridError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(GridError::InvalidSpacing(h));
        }
        if !epsilon.is_finite() || epsilon < 2.0 * h {
            return Err(GridError::UnderResolvedKernel { epsilon, h });
        }
        let radius = (epsilon / h).floor() as usize;
        let side = 2 * radius + 1;
        let mut weights = vec![0.0; side * side];
        let r = radius as i64;
        for dj in -r..=r {
            for di in -r..=r {
                let s = ((di * di + dj * dj) as f64) * h * h / (epsilon * epsilon);
                if s < 1.0 {
                    weights[((dj + r) as usize) * side + (di + r) as usize] =
                        (-1.0 / (1.0 - s)).exp();
                }
            }
        }
        let mass: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= mass);
        Ok(Self {
            epsilon,
            h,
            radius,
            weights,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Stencil half-width `⌊ε/h⌋` in lattice steps.
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Weight at lattice offset `(di, dj)`; zero outside the stencil.
    pub fn weight(&self, di: i64, dj: i64) -> f64 {
        let r = self.radius as i64;
        if di.abs() > r || dj.abs() > r {
            return 0.0;
        }
        let side = 2 * self.radius + 1;
        self.weights[((dj + r) as usize) * side + (di + r) as usize]
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Whether weights agree (to `rel_tol`) on all offsets with equal `di² + dj²`.
    pub fn is_radially_symmetric(&self, rel_tol: f64) -> bool {
        let r = self.radius as i64;
        let mut by_radius: std::collections::BTreeMap<i64, (f64, f64)> = Default::default();
        for dj in -r..=r {
            for di in -r..=r {
                let w = self.weight(di, dj);
                let e = by_radius.entry(di * di + dj * dj).or_insert((w, w));
                e.0 = e.0.min(w);
                e.1 = e.1.max(w);
            }
        }
        by_radius
            .values()
            .all(|(lo, hi)| hi - lo <= rel_tol * hi.abs())
    }
}

/// Discrete convolution `u ∗ ρ_ε` on the lattice eroded by the stencil radius,
/// i.e. on the points whose kernel support stays inside the grid.
pub fn mollify(u: &GridField, rho: &Mollifier) -> Result<GridField, GridError> {
    if (u.h() - rho.h).abs() > 1e-12 * u.h() {
        return Err(GridError::InvalidArgument(format!(
            "mollifier built for h = {} applied to a grid with h = {}",
            rho.h,
            u.h()
        )));
    }
    let r = rho.radius;
    if u.nx() < 2 * r + MIN_POINTS || u.ny() < 2 * r + MIN_POINTS {
        return Err(GridError::EmptyDomain { min: MIN_POINTS });
    }
    let (nx, ny, m) = (u.nx() - 2 * r, u.ny() - 2 * r, u.components());
    let stride = u.nx() as i64 * m as i64;
    let ri = r as i64;
    let taps: Vec<(i64, f64)> = (-ri..=ri)
        .flat_map(|dj| (-ri..=ri).map(move |di| (di, dj)))
        .filter_map(|(di, dj)| {
            let w = rho.weight(di, dj);
            (w != 0.0).then_some((-(dj * stride + di * m as i64), w))
        })
        .collect();

    let src = u.values();
    let mut values = vec![0.0; nx * ny * m];
    for j in 0..ny {
        for i in 0..nx {
            let centre = (((j + r) * u.nx() + i + r) * m) as i64;
            let out = &mut values[(j * nx + i) * m..(j * nx + i + 1) * m];
            for &(offset, w) in &taps {
                let k = (centre + offset) as usize;
                for (o, s) in out.iter_mut().zip(&src[k..k + m]) {
                    *o += w * s;
                }
            }
        }
    }
    GridField::new(u.point(r, r), u.h(), nx, ny, m, values)
}
