//! CSV and JSON writers shared by the exports.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Round-trip precision: 17 significant digits in scientific notation.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV table with a fixed header; rows are formatted numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn header(&self) -> &[&'static str] {
        &self.header
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Append a row of cells that are already formatted.
    pub fn push_cells(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn push(&mut self, values: &[f64]) {
        self.push_cells(values.iter().map(|&v| num(v)).collect());
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// `row,col,re,im` table of a complex matrix.
pub fn matrix_csv(m: &[Vec<Complex64>]) -> CsvTable {
    let mut t = CsvTable::new(&["row", "col", "re", "im"]);
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            t.push_cells(vec![i.to_string(), j.to_string(), num(v.re), num(v.im)]);
        }
    }
    t
}

/// Pretty JSON with struct field order, terminated by a newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::param(format!("serialization failed: {e}")))?;
    let _ = writeln!(s);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for &v in &[0.1, std::f64::consts::PI, -1.0e-300, 6.02214076e23] {
            let s = num(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn header_only_table() {
        let t = CsvTable::new(&["a", "b"]);
        assert_eq!(t.render(), "a,b\n");
    }

    #[test]
    fn matrix_rows() {
        let m = vec![vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)]];
        let s = matrix_csv(&m).render();
        assert!(s.starts_with("row,col,re,im\n0,0,1.0000000000000000e0,0.0000000000000000e0\n"));
        assert_eq!(s.lines().count(), 3);
    }
}
