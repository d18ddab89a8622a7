//! File output: CSV series and matrices with 17 significant digits, and a
//! JSON sidecar describing the run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn series_csv(header: &str, times: &[f64], values: &[f64]) -> String {
    let mut out = format!("{header}\n");
    for (t, v) in times.iter().zip(values) {
        let _ = writeln!(out, "{},{}", fmt_num(*t), fmt_num(*v));
    }
    out
}

pub fn table_csv(header: &str, rows: &[Vec<f64>]) -> String {
    let mut out = format!("{header}\n");
    for r in rows {
        out.push_str(&r.iter().map(|&v| fmt_num(v)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// `f_mag log10 |u|` with rows along `x1`; exact zeros map to the smallest
/// positive double.
pub fn contour_csv(magnitude: &Array2<f64>, fmag: f64) -> String {
    let mut out = String::new();
    for row in magnitude.rows() {
        let line: Vec<String> = row.iter().map(|&m| fmt_num(fmag * m.max(f64::MIN_POSITIVE).log10())).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Short content hash of the configuration plus the start time, in the
/// style of an abbreviated commit id.
pub fn run_id(config_json: &str, nanos: u128) -> String {
    let digest = Sha256::new().chain_update(config_json).chain_update(nanos.to_le_bytes()).finalize();
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
pub struct Sidecar<'a, C: Serialize, S: Serialize> {
    pub run_id: String,
    pub scheme: &'a str,
    pub config: &'a C,
    pub summary: S,
    pub files: Vec<String>,
}

pub struct Writer {
    dir: PathBuf,
    pub files: Vec<String>,
}

impl Writer {
    pub fn new(dir: &Path) -> Result<Self, String> {
        std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), String> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| format!("{}: {e}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }
}
