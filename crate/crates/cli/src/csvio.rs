//! CSV emission and the minimal reader used by the plot command.
//!
//! Dialect: comma separator, '.' decimal point, one header row, LF line
//! endings. Floats are written in shortest-round-trip scientific notation,
//! so files parse back bit-exactly and byte-identical reruns hash equal.

use std::fs;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Shortest round-trip scientific representation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// A parsed numeric CSV: header names plus rows of f64 cells.
pub struct NumericCsv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl NumericCsv {
    pub fn read(path: &Path) -> CliResult<Self> {
        let body = fs::read_to_string(path)?;
        let mut lines = body.lines();
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| CliError::validation(format!("{}: empty file", path.display())))?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut row = Vec::with_capacity(header.len());
            for cell in line.split(',') {
                let value = cell.trim().parse::<f64>().map_err(|_| {
                    CliError::validation(format!(
                        "{}:{}: cell {cell:?} is not numeric",
                        path.display(),
                        lineno + 2
                    ))
                })?;
                row.push(value);
            }
            if row.len() != header.len() {
                return Err(CliError::validation(format!(
                    "{}:{}: expected {} cells, found {}",
                    path.display(),
                    lineno + 2,
                    header.len(),
                    row.len()
                )));
            }
            rows.push(row);
        }
        Ok(NumericCsv { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}
