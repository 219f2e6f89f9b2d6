//! Plain CSV dumps for plotting.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::ScenarioError;
use crate::fieldcore::ScalarField;

/// Data accepted by [`emit_csv`].
#[derive(Debug, Clone, PartialEq)]
pub enum CsvData {
    /// `x,re,im`
    Field { x: Vec<f64>, values: Vec<Complex64> },
    /// `x,value`; `None` is written as an empty cell.
    Samples { x: Vec<f64>, values: Vec<Option<f64>> },
}

impl CsvData {
    pub fn field(field: &ScalarField) -> Self {
        CsvData::Field {
            x: field.grid().coordinates(),
            values: field.samples().to_vec(),
        }
    }

    pub fn samples(x: Vec<f64>, values: Vec<Option<f64>>) -> Self {
        CsvData::Samples { x, values }
    }

    pub fn render(&self) -> String {
        // 17 significant digits round-trip any f64
        let num = |out: &mut String, v: f64| {
            let _ = write!(out, "{v:.16e}");
        };
        let mut out = String::new();
        match self {
            CsvData::Field { x, values } => {
                out.push_str("x,re,im\n");
                for (xi, z) in x.iter().zip(values) {
                    num(&mut out, *xi);
                    out.push(',');
                    num(&mut out, z.re);
                    out.push(',');
                    num(&mut out, z.im);
                    out.push('\n');
                }
            }
            CsvData::Samples { x, values } => {
                out.push_str("x,value\n");
                for (xi, v) in x.iter().zip(values) {
                    num(&mut out, *xi);
                    out.push(',');
                    if let Some(v) = v {
                        num(&mut out, *v);
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}

pub fn emit_csv(data: &CsvData, path: &Path) -> Result<(), ScenarioError> {
    std::fs::write(path, data.render()).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldcore::Grid1D;

    #[test]
    fn constant_field_rows() {
        let g = Grid1D::new(8, 1.0).unwrap();
        let f = ScalarField::from_fn(g, 0.0, |_| Complex64::new(1.0, 0.0)).unwrap();
        let text = CsvData::field(&f).render();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "x,re,im");
        assert_eq!(lines.len(), 9);
        for line in &lines[1..] {
            let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(&cols[1..], &[1.0, 0.0]);
        }
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn masked_samples_are_empty_and_values_round_trip() {
        let v = 0.1f64 + 0.2;
        let text = CsvData::samples(vec![0.0, 1.0], vec![Some(v), None]).render();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[2], format!("{:.16e},", 1.0));
        let back: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let data = CsvData::samples(vec![0.0], vec![Some(1.0)]);
        let err = emit_csv(&data, Path::new("/nonexistent-dir/for/sure/out.csv")).unwrap_err();
        assert!(matches!(err, ScenarioError::Io { .. }));
    }
}
