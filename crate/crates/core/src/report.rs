//! Number formatting, text tables and run reports.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::decomposition::CycleDecomposition;

/// Formats with 12 significant digits, dropping trailing zeros.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("valid float");
    let a = rounded.abs();
    if (1e-6..1e15).contains(&a) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

/// Aligned two-or-more column table.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (k, c) in r.iter().enumerate().take(cols) {
            width[k] = width[k].max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (k, c) in cells.iter().enumerate() {
            if k > 0 {
                s.push_str("  ");
            }
            s.push_str(c);
            if k + 1 < cells.len() {
                s.push_str(&" ".repeat(width[k] - c.chars().count()));
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(header.to_vec());
    let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&line(rule.iter().map(String::as_str).collect()));
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

/// Cycle / weight table in processing order, with an optional column of
/// weights divided by `scale`.
pub fn decomposition_table(d: &CycleDecomposition, scale: Option<f64>) -> String {
    let mut header = vec!["#", "cycle", "weight"];
    if scale.is_some() {
        header.push("scaled");
    }
    let rows: Vec<Vec<String>> = d
        .entries()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let mut r = vec![(k + 1).to_string(), e.cycle.to_string(), num(e.weight)];
            if let Some(s) = scale {
                r.push(num(e.weight / s));
            }
            r
        })
        .collect();
    table(&header, &rows)
}

/// Decomposition written as a sum of cycles, e.g. `3·1→3→6→4 + 2·1→2→6→5`,
/// mirroring a region row of a decomposition table. Zero weights are omitted.
pub fn decomposition_formula(
    d: &CycleDecomposition,
    scale: f64,
    name: impl Fn(&crate::cycles::Cycle) -> String,
) -> String {
    let terms: Vec<String> = d
        .support()
        .map(|e| format!("{}·{}", num(e.weight / scale), name(&e.cycle)))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Hex SHA-256 of input bytes.
pub fn digest(bytes: &[u8]) -> String {
    let h = Sha256::digest(bytes);
    h.iter().map(|b| format!("{b:02x}")).collect()
}

/// Machine-readable record of one CLI invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub input_digest: Option<String>,
    pub tool_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub results: serde_json::Value,
}

impl RunReport {
    pub fn new(command: Vec<String>, input: Option<&[u8]>, results: serde_json::Value) -> Self {
        Self {
            command,
            input_digest: input.map(digest),
            tool_version: env!("CARGO_PKG_VERSION"),
            seed: None,
            results,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}
