//! Atomic file emission: CSV series, JSON reports and run metadata.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use zeno_core::TimeSeries;

use crate::error::LabResult;

pub const REPORT_VERSION: &str = "1.0";

/// Writes via a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> LabResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn real_csv(series: &TimeSeries) -> String {
    let mut s = String::from("t,value\n");
    for (t, v) in series.iter() {
        let _ = writeln!(s, "{t:.16e},{v:.16e}");
    }
    s
}

pub fn complex_csv(series: &TimeSeries<Complex64>) -> String {
    let mut s = String::from("t,re,im\n");
    for (t, v) in series.iter() {
        let _ = writeln!(s, "{t:.16e},{:.16e},{:.16e}", v.re, v.im);
    }
    s
}

pub fn write_series(path: &Path, series: &TimeSeries) -> LabResult<()> {
    write_atomic(path, real_csv(series).as_bytes())
}

/// One measured quantity. `pass` is `None` for informational entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    /// Reference value; when present the check is `|value - target| <= tolerance`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value: Some(value), target: None, tolerance: Some(tolerance), pass: Some(value <= tolerance), error: None }
    }

    pub fn near(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value: Some(value),
            target: Some(target),
            tolerance: Some(tolerance),
            pass: Some((value - target).abs() <= tolerance),
            error: None,
        }
    }

    pub fn flag(name: impl Into<String>, value: f64, pass: bool) -> Self {
        Self { name: name.into(), value: Some(value), target: None, tolerance: None, pass: Some(pass), error: None }
    }

    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), value: Some(value), target: None, tolerance: None, pass: None, error: None }
    }

    pub fn failed(name: impl Into<String>, error: impl ToString) -> Self {
        Self { name: name.into(), value: None, target: None, tolerance: None, pass: Some(false), error: Some(error.to_string()) }
    }

    pub fn passed(&self) -> bool {
        self.pass != Some(false)
    }
}

/// `{version, params, results[], pass}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub params: Value,
    pub results: Vec<Check>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partial: Option<bool>,
}

impl Report {
    pub fn new(params: Value, results: Vec<Check>) -> Self {
        let pass = results.iter().all(Check::passed);
        Self { version: REPORT_VERSION.into(), params, results, pass, partial: None }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.results.iter().find(|c| c.name == name)
    }

    pub fn write(&self, path: &Path) -> LabResult<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_atomic(path, text.as_bytes())
    }

    pub fn read(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Run metadata kept apart from the data files so those stay reproducible.
pub fn write_meta(dir: &Path, command: &str) -> LabResult<()> {
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = serde_json::json!({
        "command": command,
        "created_unix_s": now,
        "zenolab_version": env!("CARGO_PKG_VERSION"),
    });
    let mut text = serde_json::to_string_pretty(&meta)?;
    text.push('\n');
    write_atomic(&dir.join("meta.json"), text.as_bytes())
}
