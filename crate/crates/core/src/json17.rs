//! JSON serialization of floats at 17 significant digits.
//!
//! `serde_json` prints the shortest round-trip representation; reports and
//! certificates instead use a fixed `d.dddddddddddddddde±x` layout so every
//! value carries exactly 17 significant digits. Non-finite values become
//! `null`.

use serde::ser::{SerializeSeq, Serializer};
use serde_json::value::RawValue;

/// Formats `x` with 17 significant digits in scientific notation.
pub fn format(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn raw(x: f64) -> Box<RawValue> {
    // `format` always yields a valid JSON number or `null`.
    RawValue::from_string(format(x)).expect("formatted float is valid JSON")
}

pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_some(&raw(*x))
}

pub fn serialize_vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for &x in xs {
        seq.serialize_element(&raw(x))?;
    }
    seq.end()
}

/// Rows of floats, e.g. a matrix stored row by row.
pub fn serialize_rows<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for row in rows {
        seq.serialize_element(&Floats(row))?;
    }
    seq.end()
}

/// A borrowed float slice that serializes through [`format`].
#[derive(Debug, Clone, Copy)]
pub struct Floats<'a>(pub &'a [f64]);

impl serde::Serialize for Floats<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_vec(self.0, s)
    }
}

/// A float that serializes through [`format`].
#[derive(Debug, Clone, Copy)]
pub struct Float(pub f64);

impl serde::Serialize for Float {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize(&self.0, s)
    }
}

pub fn serialize_option<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => serialize(v, s),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Serialize;

    #[derive(Serialize)]
    struct Probe {
        #[serde(serialize_with = "serialize")]
        x: f64,
        #[serde(serialize_with = "serialize_vec")]
        xs: Vec<f64>,
    }

    #[test]
    fn seventeen_significant_digits() {
        let s = serde_json::to_string(&Probe {
            x: std::f64::consts::FRAC_1_SQRT_2,
            xs: vec![0.5, -3.0, f64::NAN],
        })
        .unwrap();
        assert_eq!(
            s,
            r#"{"x":7.0710678118654757e-1,"xs":[5.0000000000000000e-1,-3.0000000000000000e0,null]}"#
        );
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), std::f64::consts::FRAC_1_SQRT_2);
    }
}
