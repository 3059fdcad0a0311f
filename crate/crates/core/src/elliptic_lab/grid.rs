use std::io::{Read, Write};

use super::GridError;

/// Smallest lattice extent per direction; centered differences need an interior.
pub const MIN_POINTS: usize = 3;

const CSV_HEADER: [&str; 6] = ["m", "n_x", "n_y", "h", "origin_x", "origin_y"];

/// An `m`-vector valued function sampled on the lattice
/// `origin + h·(i, j)`, `0 ≤ i < nx`, `0 ≤ j < ny`.
///
/// Values are stored point by point in row-major order (`j` slowest), with
/// the `m` components of a point contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    origin: [f64; 2],
    h: f64,
    nx: usize,
    ny: usize,
    m: usize,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(
        origin: [f64; 2],
        h: f64,
        nx: usize,
        ny: usize,
        m: usize,
        values: Vec<f64>,
    ) -> Result<Self, GridError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(GridError::InvalidSpacing(h));
        }
        if nx < MIN_POINTS || ny < MIN_POINTS {
            return Err(GridError::TooSmall {
                nx,
                ny,
                min: MIN_POINTS,
            });
        }
        if m == 0 {
            return Err(GridError::InvalidArgument(
                "a field needs at least one component".into(),
            ));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(GridError::InvalidArgument(format!(
                "origin {origin:?} is not finite"
            )));
        }
        let expected = nx * ny * m;
        if values.len() != expected {
            return Err(GridError::ValueCount {
                expected,
                found: values.len(),
            });
        }
        Ok(Self {
            origin,
            h,
            nx,
            ny,
            m,
            values,
        })
    }

    /// Samples `f` at every lattice point; `f` writes the `m` components into its slice.
    pub fn from_fn(
        origin: [f64; 2],
        h: f64,
        nx: usize,
        ny: usize,
        m: usize,
        f: impl Fn([f64; 2], &mut [f64]),
    ) -> Result<Self, GridError> {
        let mut values = vec![0.0; nx * ny * m];
        for j in 0..ny {
            for i in 0..nx {
                let p = [origin[0] + i as f64 * h, origin[1] + j as f64 * h];
                let k = (j * nx + i) * m;
                f(p, &mut values[k..k + m]);
            }
        }
        Self::new(origin, h, nx, ny, m, values)
    }

    /// `n × n` lattice covering `[−1, 1]²`, spacing `2/(n − 1)`.
    pub fn square(n: usize, m: usize, f: impl Fn([f64; 2], &mut [f64])) -> Result<Self, GridError> {
        if n < MIN_POINTS {
            return Err(GridError::TooSmall {
                nx: n,
                ny: n,
                min: MIN_POINTS,
            });
        }
        Self::from_fn([-1.0, -1.0], 2.0 / (n - 1) as f64, n, n, m, f)
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn components(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + i as f64 * self.h,
            self.origin[1] + j as f64 * self.h,
        ]
    }

    /// Lower-left and upper-right corners of the lattice.
    pub fn extent(&self) -> ([f64; 2], [f64; 2]) {
        (self.origin, self.point(self.nx - 1, self.ny - 1))
    }

    pub fn at(&self, i: usize, j: usize) -> &[f64] {
        let k = (j * self.nx + i) * self.m;
        &self.values[k..k + self.m]
    }

    pub fn get(&self, i: usize, j: usize, c: usize) -> f64 {
        self.values[(j * self.nx + i) * self.m + c]
    }

    /// Scalar field holding component `c`.
    pub fn component(&self, c: usize) -> Result<GridField, GridError> {
        if c >= self.m {
            return Err(GridError::ComponentMismatch {
                expected: c + 1,
                found: self.m,
            });
        }
        let values = self
            .values
            .iter()
            .skip(c)
            .step_by(self.m)
            .copied()
            .collect();
        Ok(Self {
            m: 1,
            values,
            ..*self
        })
    }

    /// Concatenates the components of fields on one lattice.
    pub fn join(parts: &[&GridField]) -> Result<GridField, GridError> {
        let first = parts
            .first()
            .ok_or_else(|| GridError::InvalidArgument("nothing to join".into()))?;
        if parts.iter().any(|p| !first.same_lattice(p)) {
            return Err(GridError::GridMismatch);
        }
        let m = parts.iter().map(|p| p.m).sum();
        let mut values = Vec::with_capacity(first.nx * first.ny * m);
        for k in 0..first.nx * first.ny {
            for p in parts {
                values.extend_from_slice(&p.values[k * p.m..(k + 1) * p.m]);
            }
        }
        Ok(Self {
            m,
            values,
            ..**first
        })
    }

    /// Same extent, spacing and origin, up to round-off.
    pub fn same_lattice(&self, other: &GridField) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * self.h.max(a.abs()).max(b.abs());
        self.nx == other.nx
            && self.ny == other.ny
            && close(self.h, other.h)
            && close(self.origin[0], other.origin[0])
            && close(self.origin[1], other.origin[1])
    }

    /// Largest absolute difference over all points and components.
    pub fn max_abs_diff(&self, other: &GridField) -> Result<f64, GridError> {
        if !self.same_lattice(other) {
            return Err(GridError::GridMismatch);
        }
        if self.m != other.m {
            return Err(GridError::ComponentMismatch {
                expected: self.m,
                found: other.m,
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |acc: f64, (a, b)| acc.max((a - b).abs())))
    }

    /// Restriction to the index box `[i0, i1) × [j0, j1)`.
    pub fn window(
        &self,
        i0: usize,
        i1: usize,
        j0: usize,
        j1: usize,
    ) -> Result<GridField, GridError> {
        if i1 > self.nx || j1 > self.ny || i1 < i0 + MIN_POINTS || j1 < j0 + MIN_POINTS {
            return Err(GridError::EmptyDomain { min: MIN_POINTS });
        }
        let mut values = Vec::with_capacity((i1 - i0) * (j1 - j0) * self.m);
        for j in j0..j1 {
            for i in i0..i1 {
                values.extend_from_slice(self.at(i, j));
            }
        }
        Ok(Self {
            origin: self.point(i0, j0),
            h: self.h,
            nx: i1 - i0,
            ny: j1 - j0,
            m: self.m,
            values,
        })
    }

    /// Writes the header line, the lattice description and one row per point.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), GridError> {
        let csv_err = |e: csv::Error| GridError::Csv {
            line: 0,
            message: e.to_string(),
        };
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        w.write_record([
            self.m.to_string(),
            self.nx.to_string(),
            self.ny.to_string(),
            self.h.to_string(),
            self.origin[0].to_string(),
            self.origin[1].to_string(),
        ])
        .map_err(csv_err)?;
        for chunk in self.values.chunks(self.m) {
            w.write_record(chunk.iter().map(f64::to_string))
                .map_err(csv_err)?;
        }
        w.flush().map_err(|e| GridError::Csv {
            line: 0,
            message: e.to_string(),
        })
    }

    pub fn read_csv<R: Read>(input: R) -> Result<GridField, GridError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(input);
        let mut records = reader.records();
        let mut next = |what: &str| -> Result<(u64, csv::StringRecord), GridError> {
            match records.next() {
                Some(Ok(r)) => Ok((r.position().map_or(0, |p| p.line()), r)),
                Some(Err(e)) => Err(GridError::Csv {
                    line: e.position().map_or(0, |p| p.line()),
                    message: e.to_string(),
                }),
                None => Err(GridError::Csv {
                    line: 0,
                    message: format!("missing {what}"),
                }),
            }
        };

        let (line, header) = next("header")?;
        if header.iter().ne(CSV_HEADER) {
            return Err(GridError::Csv {
                line,
                message: format!("expected header {}", CSV_HEADER.join(",")),
            });
        }
        let (line, meta) = next("lattice description")?;
        if meta.len() != CSV_HEADER.len() {
            return Err(GridError::Csv {
                line,
                message: format!("expected {} fields, found {}", CSV_HEADER.len(), meta.len()),
            });
        }
        let int = |k: usize| {
            meta[k].parse::<usize>().map_err(|e| GridError::Csv {
                line,
                message: format!("{}: {e}", CSV_HEADER[k]),
            })
        };
        let float = |k: usize| parse_float(&meta[k], line);
        let (m, nx, ny) = (int(0)?, int(1)?, int(2)?);
        let (h, ox, oy) = (float(3)?, float(4)?, float(5)?);

        let mut values = Vec::with_capacity(nx.saturating_mul(ny).saturating_mul(m).min(1 << 24));
        for _ in 0..nx * ny {
            let (line, row) = next("lattice point")?;
            if row.len() != m {
                return Err(GridError::Csv {
                    line,
                    message: format!("expected {m} values, found {}", row.len()),
                });
            }
            for field in row.iter() {
                values.push(parse_float(field, line)?);
            }
        }
        if let Some(Ok(extra)) = records.next() {
            return Err(GridError::Csv {
                line: extra.position().map_or(0, |p| p.line()),
                message: format!("more than {} lattice points", nx * ny),
            });
        }
        GridField::new([ox, oy], h, nx, ny, m, values)
    }
}

fn parse_float(s: &str, line: u64) -> Result<f64, GridError> {
    s.parse::<f64>().map_err(|e| GridError::Csv {
        line,
        message: format!("'{s}': {e}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GridField {
        GridField::from_fn([0.5, -1.0], 0.25, 4, 3, 2, |p, out| {
            out[0] = p[0] * p[1];
            out[1] = 1.0 / 3.0 + p[0];
        })
        .unwrap()
    }

    #[test]
    fn layout_and_accessors() {
        let g = sample();
        assert_eq!(g.point(3, 2), [1.25, -0.5]);
        assert_eq!(g.at(1, 2), &[0.75 * -0.5, 1.0 / 3.0 + 0.75]);
        assert_eq!(g.extent(), ([0.5, -1.0], [1.25, -0.5]));
        let c = g.component(1).unwrap();
        assert_eq!(c.components(), 1);
        assert_eq!(c.get(2, 1, 0), g.get(2, 1, 1));
        let back = GridField::join(&[&g.component(0).unwrap(), &c]).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn rejects_bad_lattices() {
        assert!(matches!(
            GridField::new([0.0; 2], 0.1, 2, 5, 1, vec![0.0; 10]),
            Err(GridError::TooSmall { .. })
        ));
        assert!(matches!(
            GridField::new([0.0; 2], 0.0, 3, 3, 1, vec![0.0; 9]),
            Err(GridError::InvalidSpacing(_))
        ));
        assert!(matches!(
            GridField::new([0.0; 2], 0.1, 3, 3, 1, vec![0.0; 8]),
            Err(GridError::ValueCount {
                expected: 9,
                found: 8
            })
        ));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let g = sample();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("m,n_x,n_y,h,origin_x,origin_y\n2,4,3,0.25,0.5,-1\n"));
        assert_eq!(text.lines().count(), 2 + 12);
        assert_eq!(GridField::read_csv(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn csv_errors_name_the_line() {
        let text = "m,n_x,n_y,h,origin_x,origin_y\n1,3,3,0.5,0,0\n1\n2\n3\n4\nfive\n6\n7\n8\n9\n";
        match GridField::read_csv(text.as_bytes()) {
            Err(GridError::Csv { line, message }) => {
                assert_eq!(line, 7);
                assert!(message.contains("five"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let short = "m,n_x,n_y,h,origin_x,origin_y\n1,3,3,0.5,0,0\n1\n";
        assert!(matches!(
            GridField::read_csv(short.as_bytes()),
            Err(GridError::Csv { .. })
        ));
        let bad_header = "m,nx,ny,h,ox,oy\n";
        assert!(matches!(
            GridField::read_csv(bad_header.as_bytes()),
            Err(GridError::Csv { line: 1, .. })
        ));
    }

    #[test]
    fn window_shifts_origin() {
        let g = sample();
        let w = g.window(1, 4, 0, 3).unwrap();
        assert_eq!(w.origin(), g.point(1, 0));
        assert_eq!(w.at(0, 2), g.at(1, 2));
        assert!(g.window(2, 4, 0, 3).is_err());
    }
}
