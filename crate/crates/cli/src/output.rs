// SPDX-License-Identifier: Apache-2.0

//! CSV tables with 17 significant digits and a metadata sidecar.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_DIR_VAR: &str = "QBM_OUTPUT_DIR";

/// `x` with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Table {
    header: &'static str,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &'static str) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.split(',').count());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = String::with_capacity(self.rows.len() * 24 * 8);
        s.push_str(self.header);
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| num(x)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }
}

/// Output directory: the environment variable, else `[output].dir`, else `.`.
pub fn output_dir(configured: Option<&str>) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_VAR) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from(configured.unwrap_or(".")),
    }
}

/// Writes `<dir>/<name>.csv` and the sidecar `<dir>/<name>.meta`; returns the CSV path.
pub fn write(dir: &Path, name: &str, table: &Table, config_path: &Path, summary: &[(String, String)]) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let csv = dir.join(format!("{name}.csv"));
    std::fs::write(&csv, table.render()).map_err(|e| CliError::io(&csv, e))?;

    let mut meta = String::new();
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let _ = writeln!(meta, "command={name}");
    let _ = writeln!(meta, "config={}", config_path.display());
    let _ = writeln!(meta, "version={}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(meta, "unix_time={stamp}");
    let _ = writeln!(meta, "rows={}", table.len());
    for (k, v) in summary {
        let _ = writeln!(meta, "{k}={v}");
    }
    let meta_path = dir.join(format!("{name}.meta"));
    std::fs::write(&meta_path, meta).map_err(|e| CliError::io(&meta_path, e))?;
    Ok(csv)
}
