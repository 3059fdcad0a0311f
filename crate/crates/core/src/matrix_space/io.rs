use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{MatrixSpaceError, MatrixSubspace};

/// On-disk description of a subspace: `{"m": 2, "n": 2, "basis": [[...], ...]}`
/// with each basis matrix flattened in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceFile {
    pub m: usize,
    pub n: usize,
    pub basis: Vec<Vec<f64>>,
}

impl SubspaceFile {
    /// Parses JSON text; syntax errors carry line and column.
    pub fn parse(text: &str) -> Result<Self, MatrixSpaceError> {
        serde_json::from_str(text).map_err(|e| MatrixSpaceError::Parse(e.to_string()))
    }

    /// Orthonormalizes the listed matrices.
    pub fn to_subspace(&self) -> Result<MatrixSubspace, MatrixSpaceError> {
        if self.m == 0 || self.n == 0 {
            return Err(MatrixSpaceError::EmptyShape {
                m: self.m,
                n: self.n,
            });
        }
        let mut raw = Vec::with_capacity(self.basis.len());
        for (k, flat) in self.basis.iter().enumerate() {
            if flat.len() != self.m * self.n {
                return Err(MatrixSpaceError::Parse(format!(
                    "basis matrix {k} has {} entries, expected {}",
                    flat.len(),
                    self.m * self.n
                )));
            }
            if flat.iter().any(|x| !x.is_finite()) {
                return Err(MatrixSpaceError::Parse(format!(
                    "basis matrix {k} has a non-finite entry"
                )));
            }
            raw.push(DMatrix::from_row_slice(self.m, self.n, flat));
        }
        MatrixSubspace::orthonormalize(self.m, self.n, &raw)
    }

    /// Row-major description of the orthonormal basis of `space`.
    pub fn from_subspace(space: &MatrixSubspace) -> Self {
        Self {
            m: space.rows(),
            n: space.cols(),
            basis: space
                .basis()
                .iter()
                .map(|b| b.transpose().iter().copied().collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"m": 2, "n": 2, "basis": [[1, 0, 0, 1], [0, -1, 1, 0]]}"#;
        let file = SubspaceFile::parse(text).unwrap();
        let space = file.to_subspace().unwrap();
        assert_eq!(space.dim(), 2);
        let again = SubspaceFile::from_subspace(&space).to_subspace().unwrap();
        assert_eq!(again.dim(), 2);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((SubspaceFile::from_subspace(&space).basis[1][1] + r).abs() < 1e-15);
    }

    #[test]
    fn malformed_inputs() {
        let err = SubspaceFile::parse("{\"m\": 2,\n \"n\": }").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let short = SubspaceFile {
            m: 2,
            n: 2,
            basis: vec![vec![1.0, 2.0, 3.0]],
        };
        assert!(matches!(
            short.to_subspace(),
            Err(MatrixSpaceError::Parse(_))
        ));
        let empty = SubspaceFile {
            m: 0,
            n: 2,
            basis: vec![],
        };
        assert!(matches!(
            empty.to_subspace(),
            Err(MatrixSpaceError::EmptyShape { .. })
        ));
    }
}
