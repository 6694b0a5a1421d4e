//! CSV tables and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::config::Config;
use crate::CliError;

/// Shortest round-trip decimal; exponent form outside `[1e-5, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    /// One-row table from `(column, value)` pairs.
    pub fn single(pairs: Vec<(&str, String)>) -> Self {
        let (header, row): (Vec<_>, Vec<_>) = pairs.into_iter().map(|(k, v)| (k.to_string(), v)).unzip();
        Self { header, rows: vec![row] }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Writes through a temporary file and a rename so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_table(dir: &Path, name: &str, table: &Table) -> Result<(), CliError> {
    write_atomic(&dir.join(name), &table.to_csv())
}

/// Resolved configuration as re-ingestible `key=value` lines.
pub fn manifest_body(config: &Config) -> String {
    let mut s = String::new();
    for (k, v) in config.entries() {
        let _ = writeln!(s, "{k}={v}");
    }
    s
}

pub fn write_manifest(dir: &Path, config: &Config, wall_time_s: f64) -> Result<(), CliError> {
    let mut s = format!("# tachyon {}\n# wall_time_s={}\n", env!("CARGO_PKG_VERSION"), fmt_f64(wall_time_s));
    s.push_str(&manifest_body(config));
    write_atomic(&dir.join("manifest.txt"), &s)
}
