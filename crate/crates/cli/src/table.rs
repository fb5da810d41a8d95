use std::fmt::Write as _;
use std::path::Path;

use anyhow::{ensure, Context, Result};

/// Column-major numeric table rendered as CSV.
///
/// Every value is printed with 17 significant digits, so reading the file back
/// reproduces the doubles bit for bit. Lines end in `\n` on every platform.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.header.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(&mut out, *v);
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).with_context(|| format!("writing {}", path.display()))
    }

    /// Parses a file produced by [`Table::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().context("empty CSV")?;
        let mut table = Table::new(header.split(','));
        for (n, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|v| {
                    v.parse::<f64>()
                        .with_context(|| format!("row {}: bad number {v:?}", n + 1))
                })
                .collect::<Result<Vec<_>>>()?;
            ensure!(
                row.len() == table.header.len(),
                "row {} has {} fields",
                n + 1,
                row.len()
            );
            table.rows.push(row);
        }
        Ok(table)
    }
}

fn write_value(out: &mut String, v: f64) {
    if v == 0.0 {
        // Keep the sign of negative zero out of the data.
        out.push_str("0.0000000000000000e0");
    } else {
        let _ = write!(out, "{v:.16e}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mut t = Table::new(["a", "b"]);
        let vals = [0.1 + 0.2, std::f64::consts::PI, 1e-300, -6.02e23, f64::INFINITY, 0.0];
        for pair in vals.chunks(2) {
            t.push(pair.to_vec());
        }
        let text = t.to_csv();
        assert!(!text.contains('\r'));
        let back = Table::from_csv(&text).unwrap();
        for (r, s) in t.rows().iter().zip(back.rows()) {
            for (x, y) in r.iter().zip(s) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn seventeen_digits() {
        let mut t = Table::new(["x"]);
        t.push(vec![1.0 / 3.0]);
        let line = t.to_csv().lines().nth(1).unwrap().to_string();
        let mantissa = line.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17);
    }

    #[test]
    fn nan_is_written_and_read() {
        let mut t = Table::new(["x"]);
        t.push(vec![f64::NAN]);
        assert!(Table::from_csv(&t.to_csv()).unwrap().rows()[0][0].is_nan());
    }
}
