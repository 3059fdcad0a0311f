use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use rigidity_core::json17::Float;

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    #[serde(rename = "[PAPER]")]
    Stated,
    #[serde(rename = "[DERIVED]")]
    Derived,
    #[serde(rename = "[TRIVIAL]")]
    Trivial,
}

/// How `measured` is compared with `expected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|measured − expected| ≤ tolerance`.
    Within,
    /// `measured ≤ expected + tolerance`.
    AtMost,
    /// `measured ≥ expected − tolerance`.
    AtLeast,
}

impl Comparison {
    pub fn holds(self, measured: f64, expected: f64, tolerance: f64) -> bool {
        match self {
            Comparison::Within => (measured - expected).abs() <= tolerance,
            Comparison::AtMost => measured <= expected + tolerance,
            Comparison::AtLeast => measured >= expected - tolerance,
        }
    }
}

/// Columns sharing one abscissa, written as CSV and plotted as polylines.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub x_label: String,
    pub x: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
    pub log_log: bool,
}

impl Series {
    pub fn log_log(x_label: &str, x: Vec<f64>) -> Self {
        Self {
            x_label: x_label.to_string(),
            x,
            columns: Vec::new(),
            log_log: true,
        }
    }

    pub fn linear(x_label: &str, x: Vec<f64>) -> Self {
        Self {
            log_log: false,
            ..Self::log_log(x_label, x)
        }
    }

    pub fn with(mut self, label: &str, ys: Vec<f64>) -> Self {
        self.columns.push((label.to_string(), ys));
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub provenance: Provenance,
    pub comparison: Comparison,
    pub tolerance: f64,
    pub pass: bool,
    pub series: Option<Series>,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        measured: f64,
        expected: f64,
        provenance: Provenance,
        comparison: Comparison,
        tolerance: f64,
    ) -> Self {
        Self {
            name: name.into(),
            measured,
            expected,
            provenance,
            comparison,
            tolerance,
            pass: comparison.holds(measured, expected, tolerance),
            series: None,
        }
    }

    pub fn within(
        name: impl Into<String>,
        measured: f64,
        expected: f64,
        p: Provenance,
        tol: f64,
    ) -> Self {
        Self::new(name, measured, expected, p, Comparison::Within, tol)
    }

    pub fn at_most(
        name: impl Into<String>,
        measured: f64,
        bound: f64,
        p: Provenance,
        tol: f64,
    ) -> Self {
        Self::new(name, measured, bound, p, Comparison::AtMost, tol)
    }

    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64, p: Provenance) -> Self {
        Self::new(name, measured, bound, p, Comparison::AtLeast, 0.0)
    }

    pub fn with_series(mut self, series: Series) -> Self {
        self.series = Some(series);
        self
    }

    /// File stem for the check's artifacts.
    pub fn slug(&self) -> String {
        self.name
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                    c
                } else {
                    '_'
                }
            })
            .collect()
    }
}

impl Serialize for Check {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Check", 8)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("measured", &Float(self.measured))?;
        st.serialize_field("expected", &Float(self.expected))?;
        st.serialize_field("provenance", &self.provenance)?;
        st.serialize_field("comparison", &self.comparison)?;
        st.serialize_field("tolerance", &Float(self.tolerance))?;
        st.serialize_field("pass", &self.pass)?;
        let artifact = self
            .series
            .as_ref()
            .map(|_| format!("checks/{}.csv", self.slug()));
        st.serialize_field("series", &artifact)?;
        st.end()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub settings: serde_json::Value,
    pub settings_hash: String,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    pub all_pass: bool,
    pub wall_time_s: Float,
}

impl Report {
    pub fn new(
        command: &str,
        settings: serde_json::Value,
        settings_hash: String,
        checks: Vec<Check>,
        wall_time_s: f64,
    ) -> Self {
        let passed = checks.iter().filter(|c| c.pass).count();
        Self {
            command: command.to_string(),
            settings,
            settings_hash,
            failed: checks.len() - passed,
            all_pass: passed == checks.len(),
            passed,
            checks,
            wall_time_s: Float(wall_time_s),
        }
    }
}
