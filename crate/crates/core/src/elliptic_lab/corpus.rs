//! Named planar fields `(u, v)`, most of them `f = u + iv` for holomorphic `f`.

use num_complex::Complex64;

use super::grid::GridField;
use super::GridError;

/// Names accepted by [`corpus_entry`] besides the family `zpow<k>`.
pub const CORPUS_NAMES: [&str; 8] = [
    "z2", "z3", "expz", "sinz", "affine", "const", "nonholo1", "nonholo2",
];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Power(u32),
    Exp,
    Sin,
    Const,
    /// `(x², 0)`
    SquareOfX,
    /// `(x, x)`
    Diagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    name: String,
    kind: Kind,
}

/// Looks up a field by name; `zpow<k>` gives `z^k` for `k ≤ 32`.
pub fn corpus_entry(name: &str) -> Option<CorpusEntry> {
    let kind = match name {
        "z2" => Kind::Power(2),
        "z3" => Kind::Power(3),
        "affine" => Kind::Power(1),
        "expz" => Kind::Exp,
        "sinz" => Kind::Sin,
        "const" => Kind::Const,
        "nonholo1" => Kind::SquareOfX,
        "nonholo2" => Kind::Diagonal,
        _ => {
            let k: u32 = name.strip_prefix("zpow")?.parse().ok()?;
            if k > 32 {
                return None;
            }
            Kind::Power(k)
        }
    };
    Some(CorpusEntry {
        name: name.to_string(),
        kind,
    })
}

/// Every named entry, in the order of [`CORPUS_NAMES`].
pub fn corpus() -> Vec<CorpusEntry> {
    CORPUS_NAMES
        .iter()
        .filter_map(|n| corpus_entry(n))
        .collect()
}

fn holomorphic(kind: Kind, z: Complex64) -> Option<[Complex64; 3]> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Some(match kind {
        Kind::Power(0) | Kind::Const => [Complex64::new(1.0, -0.5), zero, zero],
        Kind::Power(1) => [z, one, zero],
        Kind::Power(k) => {
            let k = k as i32;
            let zk2 = z.powi(k - 2);
            [zk2 * z * z, zk2 * z * k as f64, zk2 * (k * (k - 1)) as f64]
        }
        Kind::Exp => {
            let e = z.exp();
            [e, e, e]
        }
        Kind::Sin => [z.sin(), z.cos(), -z.sin()],
        Kind::SquareOfX | Kind::Diagonal => return None,
    })
}

impl CorpusEntry {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_holomorphic(&self) -> bool {
        !matches!(self.kind, Kind::SquareOfX | Kind::Diagonal)
    }

    pub fn value(&self, p: [f64; 2]) -> [f64; 2] {
        let [x, y] = p;
        match self.kind {
            Kind::SquareOfX => [x * x, 0.0],
            Kind::Diagonal => [x, x],
            kind => {
                let f = holomorphic(kind, Complex64::new(x, y)).expect("holomorphic kind")[0];
                [f.re, f.im]
            }
        }
    }

    /// Rows `[∂u/∂x, ∂u/∂y]` and `[∂v/∂x, ∂v/∂y]`.
    pub fn jacobian(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        let [x, y] = p;
        match self.kind {
            Kind::SquareOfX => [[2.0 * x, 0.0], [0.0, 0.0]],
            Kind::Diagonal => [[1.0, 0.0], [1.0, 0.0]],
            kind => {
                let d = holomorphic(kind, Complex64::new(x, y)).expect("holomorphic kind")[1];
                [[d.re, -d.im], [d.im, d.re]]
            }
        }
    }

    /// `f″(z)` for holomorphic entries. Its modulus is the operator norm of the
    /// Hessians of `u` and of `v`.
    pub fn second_derivative(&self, p: [f64; 2]) -> Option<Complex64> {
        holomorphic(self.kind, Complex64::new(p[0], p[1])).map(|f| f[2])
    }

    /// Samples `(u, v)` on the `n × n` lattice over `[−1, 1]²`.
    pub fn sample(&self, n: usize) -> Result<GridField, GridError> {
        GridField::square(n, 2, |p, out| out.copy_from_slice(&self.value(p)))
    }

    /// Largest `|f″|` over the lattice points of `grid`.
    pub fn max_second_derivative(&self, grid: &GridField) -> Option<f64> {
        let mut worst: f64 = 0.0;
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                worst = worst.max(self.second_derivative(grid.point(i, j))?.norm());
            }
        }
        Some(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        assert_eq!(corpus().len(), CORPUS_NAMES.len());
        assert!(corpus_entry("zpow5").is_some());
        assert!(corpus_entry("zpow99").is_none());
        assert!(corpus_entry("zpowx").is_none());
        assert!(corpus_entry("bogus").is_none());
        assert!(!corpus_entry("nonholo1").unwrap().is_holomorphic());
    }

    #[test]
    fn values_and_jacobians_agree() {
        for e in corpus()
            .into_iter()
            .chain((0..7).map(|k| corpus_entry(&format!("zpow{k}")).unwrap()))
        {
            for p in [[0.3, -0.4], [-0.9, 0.7], [0.0, 0.0]] {
                let jac = e.jacobian(p);
                let step = 1e-6;
                for axis in 0..2 {
                    let mut hi = p;
                    let mut lo = p;
                    hi[axis] += step;
                    lo[axis] -= step;
                    let (a, b) = (e.value(hi), e.value(lo));
                    for c in 0..2 {
                        let fd = (a[c] - b[c]) / (2.0 * step);
                        assert!((fd - jac[c][axis]).abs() < 1e-6, "{} {p:?}", e.name());
                    }
                }
            }
        }
    }

    #[test]
    fn known_values() {
        let z2 = corpus_entry("z2").unwrap();
        assert_eq!(z2.value([0.5, 0.25]), [0.1875, 0.25]);
        assert_eq!(
            z2.second_derivative([0.1, 0.2]).unwrap(),
            Complex64::new(2.0, 0.0)
        );
        let e = corpus_entry("expz").unwrap();
        let [u, v] = e.value([0.0, std::f64::consts::FRAC_PI_2]);
        assert!(u.abs() < 1e-15 && (v - 1.0).abs() < 1e-15);
        assert!(corpus_entry("nonholo2")
            .unwrap()
            .second_derivative([0.0, 0.0])
            .is_none());
    }
}
