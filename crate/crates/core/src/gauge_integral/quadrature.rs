//! Adaptive Gauss–Kronrod (7, 15) quadrature.

use super::GaugeError;

/// Kronrod abscissae on `[0, 1]`, the last being the midpoint; odd indices
/// are the Gauss points.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for `XGK[1], XGK[3], XGK[5]` and the midpoint.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: usize = 60;

/// The 15-point Kronrod estimate of `∫_a^b f` and `|K15 − G7|`.
pub fn gauss_kronrod_15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let pair = f(c - r * XGK[k]) + f(c + r * XGK[k]);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    (kronrod * r, ((kronrod - gauss) * r).abs())
}

/// `∫_a^b f` by recursive bisection until each piece's error estimate is
/// below its share of `tol`.
pub fn adaptive_gauss_kronrod(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, GaugeError> {
    if a == b {
        return Ok(0.0);
    }
    recurse(f, a, b, tol, 0)
}

fn recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    depth: usize,
) -> Result<f64, GaugeError> {
    let (value, err) = gauss_kronrod_15(f, a, b);
    if err <= tol {
        return Ok(value);
    }
    let mid = 0.5 * (a + b);
    if depth >= MAX_DEPTH || !(a.min(b) < mid && mid < a.max(b)) {
        return Err(GaugeError::Quadrature { lo: a, hi: b });
    }
    Ok(recurse(f, a, mid, 0.5 * tol, depth + 1)? + recurse(f, mid, b, 0.5 * tol, depth + 1)?)
}
