//! Deterministic CSV and JSON emission, and the JSON result reader.
//!
//! Floats print in shortest-roundtrip decimal form, negative zero
//! normalized, so identical jobs produce byte-identical artifacts. CSV uses
//! `,` and `\n` with a mandatory header; JSON encodes non-finite values
//! (infinite radii) as `null`.

use serde::{Deserialize, Serialize};

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        return "NaN".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    // +0.0 collapses negative zero
    format!("{}", v + 0.0)
}

/// A computed table: header plus rows in grid order.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("{\"columns\":[");
        for (i, c) in self.columns.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('"');
            out.push_str(c);
            out.push('"');
        }
        out.push_str("],\"rows\":[");
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('[');
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                if v.is_finite() {
                    out.push_str(&fmt_f64(*v));
                } else {
                    out.push_str("null");
                }
            }
            out.push(']');
        }
        out.push_str("]}\n");
        out
    }
}

/// Quaternion result of `eval`, encoded as a flat object.
pub fn eval_json(components: [f64; 4]) -> String {
    format!(
        "{{\"x0\":{},\"x1\":{},\"x2\":{},\"x3\":{}}}\n",
        fmt_f64(components[0]),
        fmt_f64(components[1]),
        fmt_f64(components[2]),
        fmt_f64(components[3])
    )
}

/// Parsed form of a table artifact; `None` entries are the JSON `null`s
/// standing in for non-finite values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

pub fn read_result_json(text: &str) -> Result<ResultTable, serde_json::Error> {
    serde_json::from_str(text)
}

/// Parsed form of an `eval` artifact.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EvalResult {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

pub fn read_eval_json(text: &str) -> Result<EvalResult, serde_json::Error> {
    serde_json::from_str(text)
}
