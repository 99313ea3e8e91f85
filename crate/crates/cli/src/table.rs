//! Column tables written as CSV with `gt` first.

use std::io::Write;

use anyhow::Result;

use crate::scenario::Grid;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    gt: Vec<f64>,
    labels: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(grid: &Grid) -> Self {
        Self::with_abscissa(grid.points())
    }

    pub fn with_abscissa(gt: Vec<f64>) -> Self {
        Self {
            gt,
            labels: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn push(&mut self, label: &str, values: Vec<f64>) {
        assert_eq!(values.len(), self.gt.len(), "column `{label}` has the wrong length");
        self.labels.push(label.to_string());
        self.columns.push(values);
    }

    pub fn header(&self) -> Vec<&str> {
        std::iter::once("gt").chain(self.labels.iter().map(String::as_str)).collect()
    }

    pub fn gt(&self) -> &[f64] {
        &self.gt
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, label: &str) -> Option<&[f64]> {
        self.labels.iter().position(|l| l == label).map(|i| self.columns[i].as_slice())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for (i, &gt) in self.gt.iter().enumerate() {
            let row = std::iter::once(format_cell(gt)).chain(self.columns.iter().map(|c| format_cell(c[i])));
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf)?)
    }
}

/// Shortest round-trip text; `inf`/`-inf`/`nan` for non-finite values and
/// exponent form outside `[1e-4, 1e15)`.
pub fn format_cell(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
