//! Numeric CSV tables with a fixed, byte-stable number format.

use std::path::Path;

use crate::error::{Error, Result};

pub const FIDELITY_CURVE: [&str; 3] = ["t", "fidelity", "baseline"];
pub const SCALING_SWEEP: [&str; 4] = ["kappa", "s", "lambda", "F_T"];
pub const SURFACE: [&str; 3] = ["gamma", "kappa", "F_T"];
pub const ZENO: [&str; 4] = ["N", "tau", "survival", "deviation"];

/// Rectangular table of reals under a named header.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::DimensionMismatch {
                expected: self.header.len(),
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Values of the named column, if present.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn has_schema(&self, schema: &[&str]) -> bool {
        self.header
            .iter()
            .map(String::as_str)
            .eq(schema.iter().copied())
    }

    /// The whole table as it would be written to disk.
    pub fn to_csv_string(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_number(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Scientific notation with 9 significant digits and a signed two-digit
/// exponent, e.g. `6.83939721e-01`.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    // Avoid emitting "-0.00000000e+00".
    let x = if x == 0.0 { 0.0 } else { x };
    let s = format!("{x:.8e}");
    let (mantissa, exp) = s.split_once('e').expect("`e` formatting has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn csv_error(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_csv(table: &CsvTable, path: &Path) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    writer
        .write_record(&table.header)
        .map_err(|e| csv_error(path, e))?;
    for row in &table.rows {
        writer
            .write_record(row.iter().map(|&v| format_number(v)))
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = record
            .iter()
            .map(|cell| {
                cell.parse::<f64>().map_err(|_| {
                    Error::InvalidParameter(format!(
                        "{}: non-numeric cell `{cell}`",
                        path.display()
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(1.0), "1.00000000e+00");
        assert_eq!(format_number(0.683939720585721), "6.83939721e-01");
        assert_eq!(format_number(-250.0), "-2.50000000e+02");
        assert_eq!(format_number(1.5e-120), "1.50000000e-120");
        assert_eq!(format_number(0.0), "0.00000000e+00");
        assert_eq!(format_number(-0.0), "0.00000000e+00");
    }

    #[test]
    fn ragged_row_rejected() {
        let mut t = CsvTable::new(&FIDELITY_CURVE);
        assert!(t.push_row(vec![0.0, 1.0]).is_err());
        assert!(t.push_row(vec![0.0, 1.0, 1.0]).is_ok());
    }

    #[test]
    fn round_trip_at_nine_digits() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = CsvTable::new(&SCALING_SWEEP);
        t.push_row(vec![100.0, 2.25, 225.0, 0.996620031415])
            .unwrap();
        t.push_row(vec![25.0, 0.5, 12.5, 1.0 / 3.0]).unwrap();
        write_csv(&t, &path).unwrap();

        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, t.to_csv_string());
        assert!(!text.contains('\r'));
        assert!(text.starts_with("kappa,s,lambda,F_T\n"));

        let back = read_csv(&path).unwrap();
        assert!(back.has_schema(&SCALING_SWEEP));
        for (a, b) in back.rows().iter().flatten().zip(t.rows().iter().flatten()) {
            assert_eq!(format_number(*a), format_number(*b));
        }
        // A second write of the re-read table is byte-identical.
        let path2 = dir.path().join("t2.csv");
        write_csv(&back, &path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn unwritable_path_reports_it() {
        let t = CsvTable::new(&ZENO);
        let path = Path::new("/nonexistent-dir/zeno.csv");
        let err = write_csv(&t, path).unwrap_err();
        assert!(
            err.to_string().contains("/nonexistent-dir/zeno.csv"),
            "{err}"
        );
    }
}
