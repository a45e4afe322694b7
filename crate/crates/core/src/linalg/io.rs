//! Matrix text formats: a JSON array of rows, or CSV with one row per line.

use std::path::Path;

use super::matrix::SquareMatrix;
use crate::error::{Error, Result};

pub fn parse_json(text: &str) -> Result<SquareMatrix> {
    let rows: Vec<Vec<f64>> =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    SquareMatrix::from_rows(&rows)
}

pub fn parse_csv(text: &str) -> Result<SquareMatrix> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|field| {
                field.trim().parse::<f64>().map_err(|e| {
                    Error::Parse(format!("CSV line {}: {:?}: {e}", lineno + 1, field.trim()))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    SquareMatrix::from_rows(&rows)
}

/// Dispatches on extension (`.csv` is CSV, anything else JSON).
pub fn parse_matrix_file(path: &Path) -> Result<SquareMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => parse_csv(&text),
        _ => parse_json(&text),
    }
}

pub fn to_json(m: &SquareMatrix) -> String {
    serde_json::to_string(&m.to_rows()).expect("finite matrix serializes")
}
