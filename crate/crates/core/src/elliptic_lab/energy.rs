use super::grid::GridField;
use super::stencil::finite_difference_gradient;
use super::GridError;

/// Composite trapezoid weights (in units of `h`) for `n` consecutive points.
fn trapezoid(n: usize) -> impl Fn(usize) -> f64 {
    move |k| if k == 0 || k + 1 == n { 0.5 } else { 1.0 }
}

/// Index range of lattice coordinates at distance at least `margin` from both ends.
fn inner_range(n: usize, h: f64, margin: f64) -> std::ops::Range<usize> {
    let slack = 1e-9 * h;
    let last = (n - 1) as f64 * h;
    let lo = (0..n)
        .find(|&k| k as f64 * h >= margin - slack)
        .unwrap_or(n);
    let hi = (0..n)
        .rev()
        .find(|&k| last - k as f64 * h >= margin - slack)
        .map_or(0, |k| k + 1);
    lo..hi.max(lo)
}

/// `∫_U |Dv|² / ∫_Ω |v|²` with trapezoid quadrature, where `Ω` is the grid
/// rectangle and `U` the sub-rectangle of points at distance at least
/// `inner_margin` from `∂Ω`.
pub fn caccioppoli_ratio(v: &GridField, inner_margin: f64) -> Result<f64, GridError> {
    if !(inner_margin >= 0.0 && inner_margin.is_finite()) {
        return Err(GridError::InvalidArgument(format!(
            "margin {inner_margin} is not a length"
        )));
    }
    let (nx, ny, h) = (v.nx(), v.ny(), v.h());
    let (ux, uy) = (
        inner_range(nx, h, inner_margin),
        inner_range(ny, h, inner_margin),
    );
    if ux.len() < 2 || uy.len() < 2 {
        return Err(GridError::EmptyDomain { min: 2 });
    }

    let (wx, wy) = (trapezoid(nx), trapezoid(ny));
    let mut mass = 0.0;
    for j in 0..ny {
        for i in 0..nx {
            let sq: f64 = v.at(i, j).iter().map(|x| x * x).sum();
            mass += wx(i) * wy(j) * sq;
        }
    }
    if mass == 0.0 {
        return Err(GridError::ZeroField);
    }

    let dv = finite_difference_gradient(v)?;
    let (wx, wy) = (trapezoid(ux.len()), trapezoid(uy.len()));
    let mut energy = 0.0;
    for (b, j) in uy.clone().enumerate() {
        for (a, i) in ux.clone().enumerate() {
            let sq: f64 = dv.at(i, j).iter().map(|x| x * x).sum();
            energy += wx(a) * wy(b) * sq;
        }
    }
    Ok(energy / mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_ranges() {
        assert_eq!(inner_range(9, 0.25, 0.5), 2..7);
        assert_eq!(inner_range(9, 0.25, 0.6), 3..6);
        assert_eq!(inner_range(9, 0.25, 0.0), 0..9);
        assert_eq!(inner_range(9, 0.25, 1.0), 4..5);
        assert!(inner_range(9, 0.25, 1.5).is_empty());
    }

    #[test]
    fn affine_field_matches_closed_form() {
        let err = |n: usize| {
            let v = GridField::square(n, 2, |p, out| out.copy_from_slice(&p)).unwrap();
            (caccioppoli_ratio(&v, 0.5).unwrap() - 0.75).abs()
        };
        let (coarse, fine) = (err(33), err(65));
        assert!(fine < 2e-3, "{fine}");
        assert!((3.5..4.5).contains(&(coarse / fine)), "{coarse} {fine}");
    }

    #[test]
    fn constant_and_zero_fields() {
        let c = GridField::square(17, 2, |_, out| out.fill(1.5)).unwrap();
        assert_eq!(caccioppoli_ratio(&c, 0.5).unwrap(), 0.0);
        let z = GridField::square(17, 2, |_, _| {}).unwrap();
        assert_eq!(caccioppoli_ratio(&z, 0.5), Err(GridError::ZeroField));
        assert!(matches!(
            caccioppoli_ratio(&c, 1.0),
            Err(GridError::EmptyDomain { .. })
        ));
        assert!(caccioppoli_ratio(&c, -0.1).is_err());
    }
}
