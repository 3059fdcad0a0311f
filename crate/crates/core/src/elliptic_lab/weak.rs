//! Weak and mean-value characterizations of harmonicity on a grid.

use serde::ser::{SerializeSeq, SerializeStruct, Serializer};
use serde::Serialize;

use super::grid::GridField;
use super::GridError;
use crate::bump::TestFunction;
use crate::json17;

/// Pairings `∫ Δφ u` for a family of test functions `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakResidualReport {
    pub residuals: Vec<(String, f64)>,
    pub max_abs: f64,
    pub grid_h: f64,
}

impl Serialize for WeakResidualReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Pairs<'a>(&'a [(String, f64)]);
        impl Serialize for Pairs<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(self.0.len()))?;
                for (id, value) in self.0 {
                    seq.serialize_element(&(id, json17::Float(*value)))?;
                }
                seq.end()
            }
        }
        let mut st = s.serialize_struct("WeakResidualReport", 3)?;
        st.serialize_field("residuals", &Pairs(&self.residuals))?;
        st.serialize_field("max_abs", &json17::Float(self.max_abs))?;
        st.serialize_field("grid_h", &json17::Float(self.grid_h))?;
        st.end()
    }
}

fn scalar(u: &GridField) -> Result<(), GridError> {
    if u.components() != 1 {
        return Err(GridError::ComponentMismatch {
            expected: 1,
            found: u.components(),
        });
    }
    Ok(())
}

/// `h² Σ Δφ(x) u(x)` over the lattice for each test function, with `Δφ`
/// evaluated in closed form. Supports must lie strictly inside the grid.
pub fn weak_laplace_residual(
    u: &GridField,
    tests: &[&dyn TestFunction],
) -> Result<WeakResidualReport, GridError> {
    scalar(u)?;
    let (lo, hi) = u.extent();
    let h = u.h();
    let mut residuals = Vec::with_capacity(tests.len());
    for phi in tests {
        let (slo, shi) = phi.support();
        if (0..2).any(|k| slo[k] <= lo[k] || shi[k] >= hi[k]) {
            return Err(GridError::SupportTouchesBoundary(phi.id()));
        }
        let first = |k: usize| (((slo[k] - lo[k]) / h).floor().max(0.0)) as usize;
        let last = |k: usize, n: usize| ((((shi[k] - lo[k]) / h).ceil()) as usize).min(n - 1);
        let mut sum = 0.0;
        for j in first(1)..=last(1, u.ny()) {
            for i in first(0)..=last(0, u.nx()) {
                sum += phi.laplacian(&u.point(i, j)) * u.get(i, j, 0);
            }
        }
        residuals.push((phi.id(), h * h * sum));
    }
    let max_abs = residuals
        .iter()
        .fold(0.0, |acc: f64, (_, r)| acc.max(r.abs()));
    Ok(WeakResidualReport {
        residuals,
        max_abs,
        grid_h: h,
    })
}

/// Bilinear interpolation of a scalar field; `p` must lie in the grid rectangle.
pub(crate) fn bilinear(u: &GridField, p: [f64; 2]) -> f64 {
    let o = u.origin();
    let locate = |x: f64, x0: f64, n: usize| {
        let f = (x - x0) / u.h();
        let k = (f.floor().max(0.0) as usize).min(n - 2);
        (k, f - k as f64)
    };
    let (i, s) = locate(p[0], o[0], u.nx());
    let (j, t) = locate(p[1], o[1], u.ny());
    let v = |a, b| u.get(i + a, j + b, 0);
    (1.0 - t) * ((1.0 - s) * v(0, 0) + s * v(1, 0)) + t * ((1.0 - s) * v(0, 1) + s * v(1, 1))
}

/// `|mean of u over the circle of radius r − u(center)|` for each radius,
/// using the trapezoid rule on `64·⌈r/h⌉` equally spaced samples and bilinear
/// interpolation.
pub fn mean_value_check(
    u: &GridField,
    center: [f64; 2],
    radii: &[f64],
) -> Result<Vec<f64>, GridError> {
    scalar(u)?;
    let (lo, hi) = u.extent();
    let slack = 1e-12 * u.h();
    let inside = |p: [f64; 2]| (0..2).all(|k| p[k] >= lo[k] - slack && p[k] <= hi[k] + slack);
    if !inside(center) {
        return Err(GridError::CircleLeavesDomain {
            center,
            radius: 0.0,
        });
    }
    let at_center = bilinear(u, center);
    radii
        .iter()
        .map(|&r| {
            if !(r > 0.0 && r.is_finite()) {
                return Err(GridError::InvalidArgument(format!(
                    "radius {r} is not positive"
                )));
            }
            let reach = |s: f64| [center[0] + s * r, center[1] + s * r];
            if !inside(reach(-1.0)) || !inside(reach(1.0)) {
                return Err(GridError::CircleLeavesDomain { center, radius: r });
            }
            let samples = 64 * (r / u.h()).ceil().max(1.0) as usize;
            let step = std::f64::consts::TAU / samples as f64;
            let clamp = |x: f64, k: usize| x.clamp(lo[k], hi[k]);
            let sum: f64 = (0..samples)
                .map(|k| {
                    let (sin, cos) = (k as f64 * step).sin_cos();
                    bilinear(
                        u,
                        [clamp(center[0] + r * cos, 0), clamp(center[1] + r * sin, 1)],
                    )
                })
                .sum();
            Ok((sum / samples as f64 - at_center).abs())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::{ProductBump, RadialBump};

    fn scalar_field(n: usize, f: impl Fn(f64, f64) -> f64) -> GridField {
        GridField::square(n, 1, |p, out| out[0] = f(p[0], p[1])).unwrap()
    }

    #[test]
    fn harmonic_residuals_decay_and_affine_ones_vanish() {
        let bumps = [
            RadialBump::new([0.1, -0.2], 0.5),
            RadialBump::new([-0.25, 0.15], 0.6),
        ];
        let product = ProductBump::new([0.2, 0.1], 0.5);
        let tests: Vec<&dyn TestFunction> = vec![&bumps[0], &bumps[1], &product];
        let residual = |n: usize, f: fn(f64, f64) -> f64| {
            weak_laplace_residual(&scalar_field(n, f), &tests).unwrap()
        };
        let coarse = residual(129, |x, y| x * x - y * y);
        let fine = residual(257, |x, y| x * x - y * y);
        assert_eq!(coarse.residuals.len(), 3);
        assert_eq!(fine.grid_h, 1.0 / 128.0);
        assert!(fine.max_abs < coarse.max_abs / 16.0, "{coarse:?} {fine:?}");
        let affine = |x: f64, y: f64| 3.0 * x - y + 2.0;
        assert!(residual(257, affine).max_abs < residual(129, affine).max_abs / 16.0);
    }

    #[test]
    fn non_harmonic_control_pairs_with_twice_the_mass() {
        let phi = RadialBump::new([0.0, 0.0], 0.5);
        let u = scalar_field(129, |x, _| x * x);
        let report = weak_laplace_residual(&u, &[&phi]).unwrap();
        let ones = scalar_field(129, |_, _| 1.0);
        let mass: f64 = (0..129)
            .flat_map(|j| (0..129).map(move |i| (i, j)))
            .map(|(i, j)| phi.value(&ones.point(i, j)))
            .sum::<f64>()
            * u.h()
            * u.h();
        assert!((report.residuals[0].1 - 2.0 * mass).abs() < 5e-3 * mass);
    }

    #[test]
    fn supports_must_be_interior() {
        let u = scalar_field(33, |x, _| x);
        let phi = RadialBump::new([0.6, 0.0], 0.4);
        assert!(matches!(
            weak_laplace_residual(&u, &[&phi]),
            Err(GridError::SupportTouchesBoundary(_))
        ));
    }

    #[test]
    fn mean_values() {
        let c = scalar_field(33, |_, _| 4.0);
        let dev = mean_value_check(&c, [0.1, 0.2], &[0.25, 0.5]).unwrap();
        assert!(dev.iter().all(|d| *d < 1e-14));

        let u = scalar_field(257, |x, _| x * x);
        let dev = mean_value_check(&u, [0.0, 0.0], &[0.25]).unwrap()[0];
        assert!((dev - 0.03125).abs() < 0.02 * 0.03125, "{dev}");

        let harmonic = scalar_field(129, |x, y| x * x - y * y);
        let dev = mean_value_check(&harmonic, [0.15, -0.1], &[0.3, 0.6]).unwrap();
        let h = harmonic.h();
        assert!(dev.iter().all(|d| *d < 5.0 * h * h * 2.0), "{dev:?}");

        assert!(matches!(
            mean_value_check(&c, [0.8, 0.0], &[0.25]),
            Err(GridError::CircleLeavesDomain { .. })
        ));
    }

    #[test]
    fn bilinear_reproduces_bilinear_functions() {
        let u = scalar_field(9, |x, y| 1.0 + 2.0 * x - y + 0.5 * x * y);
        for p in [[0.13, -0.77], [1.0, 1.0], [-1.0, 0.3]] {
            let want = 1.0 + 2.0 * p[0] - p[1] + 0.5 * p[0] * p[1];
            assert!((bilinear(&u, p) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn report_serializes_pairs() {
        let r = WeakResidualReport {
            residuals: vec![("a".into(), 0.5)],
            max_abs: 0.5,
            grid_h: 0.25,
        };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"residuals":[["a",5.0000000000000000e-1]],"max_abs":5.0000000000000000e-1,"grid_h":2.5000000000000000e-1}"#
        );
    }
}
