//! Smooth compactly supported test functions on the plane with closed-form
//! derivatives.

use serde::Serialize;

/// A smooth function with compact support and analytic first and second derivatives.
pub trait TestFunction {
    fn value(&self, x: &[f64; 2]) -> f64;
    fn gradient(&self, x: &[f64; 2]) -> [f64; 2];
    fn laplacian(&self, x: &[f64; 2]) -> f64;
    /// Closed box `[lo, hi]` containing the support.
    fn support(&self) -> ([f64; 2], [f64; 2]);
    /// Short identifier used in reports.
    fn id(&self) -> String;
}

/// `φ(x) = exp(−1/(1 − s))` with `s = |x − center|²/radius²` for `s < 1`, and 0 outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialBump {
    pub center: [f64; 2],
    pub radius: f64,
}

impl RadialBump {
    pub fn new(center: [f64; 2], radius: f64) -> Self {
        Self { center, radius }
    }

    fn s(&self, x: &[f64; 2]) -> f64 {
        let (dx, dy) = (x[0] - self.center[0], x[1] - self.center[1]);
        (dx * dx + dy * dy) / (self.radius * self.radius)
    }
}

/// `g(s) = exp(−1/(1 − s))` and its first two derivatives, zero for `s ≥ 1`.
fn profile(s: f64) -> (f64, f64, f64) {
    if s >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let q = 1.0 - s;
    let g = (-1.0 / q).exp();
    (g, -g / (q * q), g * (2.0 * s - 1.0) / q.powi(4))
}

impl TestFunction for RadialBump {
    fn value(&self, x: &[f64; 2]) -> f64 {
        profile(self.s(x)).0
    }

    fn gradient(&self, x: &[f64; 2]) -> [f64; 2] {
        let (_, g1, _) = profile(self.s(x));
        let r2 = self.radius * self.radius;
        [
            g1 * 2.0 * (x[0] - self.center[0]) / r2,
            g1 * 2.0 * (x[1] - self.center[1]) / r2,
        ]
    }

    fn laplacian(&self, x: &[f64; 2]) -> f64 {
        let s = self.s(x);
        let (_, g1, g2) = profile(s);
        let r2 = self.radius * self.radius;
        4.0 * s * g2 / r2 + 4.0 * g1 / r2
    }

    fn support(&self) -> ([f64; 2], [f64; 2]) {
        let r = self.radius;
        (
            [self.center[0] - r, self.center[1] - r],
            [self.center[0] + r, self.center[1] + r],
        )
    }

    fn id(&self) -> String {
        format!(
            "radial({},{};{})",
            self.center[0], self.center[1], self.radius
        )
    }
}

/// `φ(x, y) = b((x − c₀)/r)·b((y − c₁)/r)` with `b(t) = exp(−1/(1 − t²))` on `|t| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductBump {
    pub center: [f64; 2],
    pub radius: f64,
}

impl ProductBump {
    pub fn new(center: [f64; 2], radius: f64) -> Self {
        Self { center, radius }
    }

    fn factors(&self, x: &[f64; 2]) -> [(f64, f64, f64); 2] {
        [0, 1].map(|k| {
            let (b, b1, b2) = bump_1d((x[k] - self.center[k]) / self.radius);
            (b, b1 / self.radius, b2 / (self.radius * self.radius))
        })
    }
}

/// `b(t) = exp(−1/(1 − t²))` and its first two derivatives, zero for `|t| ≥ 1`.
fn bump_1d(t: f64) -> (f64, f64, f64) {
    if t.abs() >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let q = 1.0 - t * t;
    let b = (-1.0 / q).exp();
    let b1 = b * (-2.0 * t / (q * q));
    let b2 = b * (4.0 * t * t / q.powi(4) - 2.0 / (q * q) - 8.0 * t * t / q.powi(3));
    (b, b1, b2)
}

impl TestFunction for ProductBump {
    fn value(&self, x: &[f64; 2]) -> f64 {
        let [fx, fy] = self.factors(x);
        fx.0 * fy.0
    }

    fn gradient(&self, x: &[f64; 2]) -> [f64; 2] {
        let [fx, fy] = self.factors(x);
        [fx.1 * fy.0, fx.0 * fy.1]
    }

    fn laplacian(&self, x: &[f64; 2]) -> f64 {
        let [fx, fy] = self.factors(x);
        fx.2 * fy.0 + fx.0 * fy.2
    }

    fn support(&self) -> ([f64; 2], [f64; 2]) {
        let r = self.radius;
        (
            [self.center[0] - r, self.center[1] - r],
            [self.center[0] + r, self.center[1] + r],
        )
    }

    fn id(&self) -> String {
        format!(
            "product({},{};{})",
            self.center[0], self.center[1], self.radius
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_derivatives(phi: &dyn TestFunction, pts: &[[f64; 2]]) {
        let h = 1e-4;
        for p in pts {
            let f = |dx: f64, dy: f64| phi.value(&[p[0] + dx, p[1] + dy]);
            let gx = (f(h, 0.0) - f(-h, 0.0)) / (2.0 * h);
            let gy = (f(0.0, h) - f(0.0, -h)) / (2.0 * h);
            let lap =
                (f(h, 0.0) + f(-h, 0.0) + f(0.0, h) + f(0.0, -h) - 4.0 * f(0.0, 0.0)) / (h * h);
            let g = phi.gradient(p);
            assert!((g[0] - gx).abs() < 1e-6, "{} d/dx at {p:?}", phi.id());
            assert!((g[1] - gy).abs() < 1e-6, "{} d/dy at {p:?}", phi.id());
            assert!(
                (phi.laplacian(p) - lap).abs() < 1e-4,
                "{} lap at {p:?}",
                phi.id()
            );
        }
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let pts = [
            [0.1, 0.2],
            [0.5, -0.3],
            [-0.6, 0.55],
            [0.0, 0.0],
            [0.9, 0.1],
        ];
        check_derivatives(&RadialBump::new([0.0, 0.0], 1.0), &pts);
        check_derivatives(&RadialBump::new([0.1, -0.1], 0.7), &pts);
        check_derivatives(&ProductBump::new([0.0, 0.0], 1.0), &pts);
        check_derivatives(&ProductBump::new([0.2, 0.1], 0.8), &pts);
    }

    #[test]
    fn compact_support() {
        let b = RadialBump::new([0.3, -0.2], 0.5);
        assert_eq!(b.value(&[0.8, -0.2]), 0.0);
        assert_eq!(b.gradient(&[1.0, 1.0]), [0.0, 0.0]);
        assert_eq!(b.support(), ([-0.2, -0.7], [0.8, 0.3]));
        assert!((b.value(&[0.3, -0.2]) - (-1.0f64).exp()).abs() < 1e-16);
    }
}
