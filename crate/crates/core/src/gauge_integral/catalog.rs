//! Named integrands and vector fields with known integrals.

use super::geometry::{Figure, Segment, ThinSet};
use super::GaugeOptions;

/// `F(x) = x² sin(1/x²)` with `F(0) = 0`.
pub fn wild_antiderivative(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x * (1.0 / (x * x)).sin()
    }
}

/// `F′(x) = 2x sin(1/x²) − (2/x) cos(1/x²)` with `F′(0) = 0`. Unbounded near
/// 0 and not Lebesgue integrable on `[0, 1]`.
pub fn wild_derivative(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        let u = 1.0 / (x * x);
        2.0 * x * u.sin() - 2.0 / x * u.cos()
    }
}

/// Gauge parameters that resolve the oscillation of [`wild_derivative`]:
/// cells at distance `d` from 0 must be short against the local period
/// `~d³`, so `δ ~ d²` with a small constant.
fn wild_options() -> GaugeOptions {
    GaugeOptions::default().with_power(2.0, 5e-4)
}

#[derive(Debug, Clone)]
pub struct Integrand1d {
    pub name: &'static str,
    pub f: fn(f64) -> f64,
    pub a: f64,
    pub b: f64,
    pub singular: Vec<f64>,
    pub exact: f64,
    pub options: GaugeOptions,
}

pub fn integrands_1d() -> Vec<Integrand1d> {
    vec![
        Integrand1d {
            name: "x2sin_inv_x2",
            f: wild_derivative,
            a: 0.0,
            b: 1.0,
            singular: vec![0.0],
            exact: 1f64.sin(),
            options: wild_options(),
        },
        Integrand1d {
            name: "one",
            f: |_| 1.0,
            a: 0.0,
            b: 1.0,
            singular: vec![],
            exact: 1.0,
            options: GaugeOptions::default(),
        },
        Integrand1d {
            name: "two_x",
            f: |x| 2.0 * x,
            a: 0.0,
            b: 1.0,
            singular: vec![],
            exact: 1.0,
            options: GaugeOptions::default(),
        },
        Integrand1d {
            name: "exp_cos",
            f: |x| x.exp() * (3.0 * x).cos(),
            a: 0.0,
            b: 2.0,
            singular: vec![],
            // ∫ e^x cos 3x = e^x (cos 3x + 3 sin 3x) / 10
            exact: (2f64.exp() * (6f64.cos() + 3.0 * 6f64.sin()) - 1.0) / 10.0,
            options: GaugeOptions::default(),
        },
    ]
}

pub fn integrand_1d(name: &str) -> Option<Integrand1d> {
    integrands_1d().into_iter().find(|i| i.name == name)
}

/// A planar vector field with its pointwise divergence off a thin set.
#[derive(Debug, Clone)]
pub struct Field2d {
    pub name: &'static str,
    pub v: fn(&[f64; 2]) -> [f64; 2],
    pub div: fn(&[f64; 2]) -> f64,
    pub figure: Figure,
    pub thin: ThinSet,
    pub exact: f64,
    pub options: GaugeOptions,
}

pub fn fields_2d() -> Vec<Field2d> {
    vec![
        Field2d {
            name: "identity",
            v: |p| [p[0], p[1]],
            div: |_| 2.0,
            figure: Figure::unit_square(),
            thin: ThinSet::empty(),
            exact: 2.0,
            options: GaugeOptions::default(),
        },
        Field2d {
            name: "rotation",
            v: |p| [-p[1], p[0]],
            div: |_| 0.0,
            figure: Figure::unit_square(),
            thin: ThinSet::empty(),
            exact: 0.0,
            options: GaugeOptions::default(),
        },
        Field2d {
            name: "x2sin_inv_x2",
            v: |p| [wild_antiderivative(p[0]), 0.0],
            div: |p| wild_derivative(p[0]),
            figure: Figure::unit_square(),
            thin: ThinSet {
                points: vec![],
                segments: vec![Segment::new([0.0, 0.0], [0.0, 1.0])],
            },
            exact: 1f64.sin(),
            options: wild_options(),
        },
    ]
}

pub fn field_2d(name: &str) -> Option<Field2d> {
    fields_2d().into_iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_matches_difference_quotient() {
        for &x in &[0.3, 0.7, 1.0, 0.45] {
            let h = 1e-6;
            let fd = (wild_antiderivative(x + h) - wild_antiderivative(x - h)) / (2.0 * h);
            assert!(
                (fd - wild_derivative(x)).abs() < 1e-5 * (1.0 + fd.abs()),
                "x = {x}"
            );
        }
    }

    #[test]
    fn lookup_by_name() {
        assert!(integrand_1d("x2sin_inv_x2").is_some());
        assert!(integrand_1d("nope").is_none());
        assert_eq!(fields_2d().len(), 3);
        assert_eq!(field_2d("rotation").unwrap().exact, 0.0);
    }
}
