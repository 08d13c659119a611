//! Report files: a timing header kept apart from a deterministic body, so
//! two runs with one seed differ only in the header.
//!
//! Bodies are stored as JSON values; object keys come out sorted, which
//! makes the text canonical.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fredholm::{SweepRow, SweepVerdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timing {
    pub step: String,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub tool: String,
    pub version: String,
    /// Wall-clock start, milliseconds since the Unix epoch.
    pub started_unix_ms: u64,
    pub timings: Vec<Timing>,
}

impl Header {
    pub fn now() -> Self {
        Header {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            started_unix_ms: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_millis() as u64),
            timings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub header: Header,
    pub body: Value,
}

impl Report {
    pub fn new(header: Header, body: Value) -> Self {
        Report { header, body }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports are plain data");
        s.push('\n');
        s
    }

    pub fn body_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.body).expect("reports are plain data");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::validation("report", e.to_string()))
    }
}

/// Any serializable value as a canonical JSON value. Non-finite floats,
/// which JSON cannot carry, should be passed through [`number`] first.
pub fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("reports are plain data")
}

/// A float, with `inf`, `-inf` and `nan` spelled as strings.
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

/// 17 significant digits, or empty when absent.
fn csv_float(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        Some(v) if v.is_nan() => "nan".into(),
        Some(v) if v > 0.0 => "inf".into(),
        Some(_) => "-inf".into(),
        None => String::new(),
    }
}

/// One line of the sweep summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepLine {
    pub row: SweepRow,
    pub delta: Option<f64>,
    pub takagi_b: Option<f64>,
}

pub const SWEEP_COLUMNS: [&str; 8] = [
    "level",
    "kernel_dim",
    "rank",
    "codim",
    "index",
    "bounded_below",
    "delta",
    "takagi_b",
];

/// CSV summary: a header, one line per level, and a final `verdict` line.
pub fn sweep_csv<W: Write>(out: W, lines: &[SweepLine], verdict: SweepVerdict) -> Result<()> {
    let io = |e: csv::Error| Error::Resource(format!("writing CSV: {e}"));
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(SWEEP_COLUMNS).map_err(io)?;
    for line in lines {
        let r = &line.row.report;
        w.write_record([
            line.row.resolution.to_string(),
            r.kernel_dim.to_string(),
            r.range_rank.to_string(),
            r.codim.to_string(),
            r.index.to_string(),
            csv_float(Some(r.bounded_below)),
            csv_float(line.delta),
            csv_float(line.takagi_b),
        ])
        .map_err(io)?;
    }
    let verdict = match to_value(&verdict) {
        Value::String(s) => s,
        other => other.to_string(),
    };
    w.write_record(["verdict".to_string(), verdict])
        .map_err(io)?;
    w.flush()
        .map_err(|e| Error::Resource(format!("writing CSV: {e}")))?;
    Ok(())
}
