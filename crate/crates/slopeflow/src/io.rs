//! CSV, JSON and binary writers.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which round-trips
//! every double and makes reruns byte-identical.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Writes equally long columns under `headers`.
pub fn write_columns(path: &Path, headers: &[&str], columns: &[&[f64]]) -> Result<()> {
    debug_assert_eq!(headers.len(), columns.len());
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(headers).map_err(csv_err)?;
    let rows = columns.first().map_or(0, |c| c.len());
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| fmt_f64(c[i]))).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

/// Reads a numeric CSV written by [`write_columns`]; returns the headers and the columns.
pub fn read_columns(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let bad = |m: String| Error::Config(format!("{}: {m}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let headers: Vec<String> = r.headers().map_err(|e| bad(e.to_string()))?.iter().map(String::from).collect();
    let mut cols = vec![Vec::new(); headers.len()];
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        for (c, field) in cols.iter_mut().zip(rec.iter()) {
            c.push(field.parse::<f64>().map_err(|e| bad(e.to_string()))?);
        }
    }
    Ok((headers, cols))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// Row-major little-endian doubles.
pub fn write_f64_le(path: &Path, values: &[f64]) -> Result<()> {
    let mut buf = Vec::with_capacity(values.len() * 8);
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(&buf).map_err(io_err(path))
}

/// Joins `dir` and `name`, creating `dir` first.
pub fn artifact(dir: &Path, name: &str) -> Result<PathBuf> {
    ensure_dir(dir)?;
    Ok(dir.join(name))
}
