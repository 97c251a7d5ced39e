//! Matrix CSV parsing, spectrum CSV, and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::CliError;

/// Reads a samples-as-rows CSV (N rows x D columns, optional header) and
/// returns the transposed D x N matrix the solvers expect.
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(vals) => {
                if !vals.iter().all(|v| v.is_finite()) {
                    return Err(CliError::Parse(format!(
                        "{}: row {}: non-finite value",
                        path.display(),
                        lineno + 1
                    )));
                }
                match width {
                    None => width = Some(vals.len()),
                    Some(w) if w != vals.len() => {
                        return Err(CliError::Parse(format!(
                            "{}: row {}: expected {} columns, got {}",
                            path.display(),
                            lineno + 1,
                            w,
                            vals.len()
                        )));
                    }
                    _ => {}
                }
                rows.push(vals);
            }
            Err(_) => {
                // A non-numeric first row is a header; anywhere else it
                // is malformed data.
                if lineno == 0 && rows.is_empty() {
                    continue;
                }
                return Err(CliError::Parse(format!(
                    "{}: row {}: malformed numeric value",
                    path.display(),
                    lineno + 1
                )));
            }
        }
    }
    if rows.is_empty() {
        return Err(CliError::Parse(format!("{}: no data rows", path.display())));
    }
    let n = rows.len();
    let d = rows[0].len();
    Ok(DMatrix::from_fn(d, n, |i, j| rows[j][i]))
}

/// Writes `content` to `path` atomically (same-directory temp + rename).
pub fn write_atomic(path: &Path, content: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| {
                CliError::Io(format!("cannot create {}: {e}", parent.display()))
            })?;
        }
    }
    let tmp: PathBuf = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", tmp.display())))?;
        f.write_all(content)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", tmp.display())))?;
        f.sync_all().ok();
    }
    fs::rename(&tmp, path)
        .map_err(|e| CliError::Io(format!("cannot move {} into place: {e}", tmp.display())))?;
    Ok(())
}

/// Serializes a spectrum as `angle_deg,power` rows.
pub fn spectrum_csv(angles: &[f64], power: &[f64]) -> String {
    let mut out = String::from("angle_deg,power\n");
    for (a, p) in angles.iter().zip(power) {
        out.push_str(&format!("{a:.4},{p:.12e}\n"));
    }
    out
}

/// Serializes a matrix with one CSV row per column of `m` (samples as
/// rows, matching the input convention).
pub fn matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for j in 0..m.ncols() {
        let row: Vec<String> = (0..m.nrows()).map(|i| format!("{:.17e}", m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
