//! Experiment reports and their canonical serializations.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentKind, SweepConfig};
use crate::error::{Error, Result};

/// One named numeric series, plot-ready.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Series {
    pub fn new(name: impl Into<String>, xs: Vec<f64>, ys: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            xs,
            ys,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    ReportOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub detail: String,
}

impl Verdict {
    pub fn check(ok: bool, detail: impl Into<String>) -> Self {
        Self {
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }

    pub fn report_only(detail: impl Into<String>) -> Self {
        Self {
            status: Status::ReportOnly,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch; `SOURCE_DATE_EPOCH` overrides the clock.
    pub timestamp: u64,
    pub seed: u64,
}

impl Provenance {
    pub fn now(seed: u64) -> Self {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or_else(|| {
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            });
        Self {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            timestamp,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentKind,
    /// The fully resolved configuration; re-running it reproduces `results`.
    pub config: SweepConfig,
    pub results: Vec<Series>,
    pub verdicts: BTreeMap<String, Verdict>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format {s:?}, expected csv or json"))),
        }
    }
}

/// Any serializable value as JSON with sorted keys and shortest round-trip
/// floats, newline-terminated.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // Routing through `Value` sorts object keys.
    let v = serde_json::to_value(value).map_err(|e| Error::Format(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Shortest round-trip decimal; `NaN` and infinities spelled out.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        canonical_json(self)
    }

    /// One column per series holding its `ys`; shorter series leave empty
    /// cells. Abscissae live in the JSON form.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.results.iter().map(|s| csv_field(&s.name)).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        let rows = self.results.iter().map(|s| s.ys.len()).max().unwrap_or(0);
        for r in 0..rows {
            let cells: Vec<String> = self
                .results
                .iter()
                .map(|s| s.ys.get(r).map(|&y| format_float(y)).unwrap_or_default())
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => Ok(self.to_csv()),
        }
    }

    /// Writes the report to `path`.
    pub fn emit(&self, format: Format, path: &Path) -> Result<()> {
        let text = self.render(format)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn series(&self, name: &str) -> Option<&Series> {
        self.results.iter().find(|s| s.name == name)
    }

    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|v| v.status != Status::Fail)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}
