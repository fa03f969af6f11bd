//! JSON model and flux files. All state indices in files are 1-based.
//!
//! Model file:
//!
//! ```json
//! { "time": "continuous", "n": 3, "edges": [[1, 2, 1.0], [2, 3, 1.0], [3, 1, 1.0]] }
//! ```
//!
//! Discrete-time models add `"loops": [[i, p], ...]`. Flux files use the
//! same shape without `time`, with fluxes in place of rates.

use serde::{Deserialize, Serialize};

use crate::error::{NessError, Result};
use crate::markov::{FluxField, MarkovProcess, TimeKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub time: TimeKind,
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub loops: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxFile {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loops: Option<Vec<(usize, f64)>>,
}

fn to_zero_based(i: usize, n: usize) -> Result<usize> {
    if i == 0 || i > n {
        return Err(NessError::Parse(format!("state index {i} outside 1..={n}")));
    }
    Ok(i - 1)
}

fn parse_error(e: serde_json::Error) -> NessError {
    NessError::Parse(e.to_string())
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }

    pub fn into_process(self) -> Result<MarkovProcess> {
        let n = self.n;
        if n == 0 {
            return Err(NessError::Parse("model needs n >= 1".into()));
        }
        let edges = self
            .edges
            .iter()
            .map(|&(i, j, w)| Ok((to_zero_based(i, n)?, to_zero_based(j, n)?, w)))
            .collect::<Result<Vec<_>>>()?;
        match self.time {
            TimeKind::Continuous => {
                if !self.loops.is_empty() {
                    return Err(NessError::Parse(
                        "loops are only allowed in discrete-time models".into(),
                    ));
                }
                MarkovProcess::continuous(n, edges)
            }
            TimeKind::Discrete => {
                let loops = self
                    .loops
                    .iter()
                    .map(|&(i, p)| Ok((to_zero_based(i, n)?, p)))
                    .collect::<Result<Vec<_>>>()?;
                MarkovProcess::discrete(n, edges, loops)
            }
        }
    }

    pub fn from_process(p: &MarkovProcess) -> Self {
        let loops = match p.time_kind() {
            TimeKind::Continuous => Vec::new(),
            TimeKind::Discrete => (0..p.n_states())
                .filter(|&i| p.loop_probability(i) > 0.0)
                .map(|i| (i + 1, p.loop_probability(i)))
                .collect(),
        };
        Self {
            time: p.time_kind(),
            n: p.n_states(),
            edges: p.edges().map(|(i, j, w)| (i + 1, j + 1, w)).collect(),
            loops,
        }
    }
}

impl MarkovProcess {
    /// Parses a JSON model file.
    pub fn from_json_str(text: &str) -> Result<Self> {
        ModelFile::parse(text)?.into_process()
    }

    pub fn to_json_string(&self) -> String {
        let m = ModelFile::from_process(self);
        let mut fields = vec![
            format!("  \"time\": \"{}\"", m.time),
            format!("  \"n\": {}", m.n),
            format!(
                "  \"edges\": {}",
                rows(
                    m.edges
                        .iter()
                        .map(|&(i, j, w)| format!("[{i}, {j}, {}]", float(w)))
                )
            ),
        ];
        if !m.loops.is_empty() {
            fields.push(format!(
                "  \"loops\": {}",
                rows(m.loops.iter().map(|&(i, v)| format!("[{i}, {}]", float(v))))
            ));
        }
        format!("{{\n{}\n}}\n", fields.join(",\n"))
    }
}

impl FluxFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }

    pub fn into_field(self) -> Result<FluxField> {
        let n = self.n;
        let edges = self
            .edges
            .iter()
            .map(|&(i, j, v)| Ok((to_zero_based(i, n)?, to_zero_based(j, n)?, v)))
            .collect::<Result<Vec<_>>>()?;
        let f = FluxField::from_edges(n, edges)?;
        match self.loops {
            None => Ok(f),
            Some(l) => {
                let mut loops = vec![0.0; n];
                for (i, v) in l {
                    loops[to_zero_based(i, n)?] = v;
                }
                f.with_loops(loops)
            }
        }
    }

    pub fn from_field(f: &FluxField) -> Self {
        Self {
            n: f.n_states(),
            edges: f.edges().map(|(i, j, v)| (i + 1, j + 1, v)).collect(),
            loops: f
                .loops()
                .map(|l| l.iter().enumerate().map(|(i, v)| (i + 1, *v)).collect()),
        }
    }
}

impl FluxField {
    pub fn to_json_string(&self) -> String {
        let f = FluxFile::from_field(self);
        let mut fields = vec![
            format!("  \"n\": {}", f.n),
            format!(
                "  \"edges\": {}",
                rows(
                    f.edges
                        .iter()
                        .map(|&(i, j, v)| format!("[{i}, {j}, {}]", float(v)))
                )
            ),
        ];
        if let Some(l) = &f.loops {
            fields.push(format!(
                "  \"loops\": {}",
                rows(l.iter().map(|&(i, v)| format!("[{i}, {}]", float(v))))
            ));
        }
        format!("{{\n{}\n}}\n", fields.join(",\n"))
    }
}

/// Shortest round-tripping JSON representation of a float.
fn float(v: f64) -> String {
    serde_json::to_string(&v).expect("finite float")
}

/// One array element per line.
fn rows(items: impl Iterator<Item = String>) -> String {
    let items: Vec<String> = items.map(|r| format!("    {r}")).collect();
    if items.is_empty() {
        "[]".into()
    } else {
        format!("[\n{}\n  ]", items.join(",\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_continuous_ring() {
        let p = MarkovProcess::from_json_str(
            r#"{"time":"continuous","n":3,"edges":[[1,2,1.0],[2,3,1],[3,1,1.0]]}"#,
        )
        .unwrap();
        assert_eq!(p.n_states(), 3);
        assert_eq!(p.rate(2, 0), 1.0);
    }

    #[test]
    fn parses_discrete_with_loops() {
        let p = MarkovProcess::from_json_str(
            r#"{"time":"discrete","n":2,"edges":[[1,2,0.5],[2,1,0.25]],"loops":[[1,0.5],[2,0.75]]}"#,
        )
        .unwrap();
        assert_eq!(p.loop_probability(1), 0.75);
        assert!(p.validate().is_empty());
    }

    #[test]
    fn malformed_json_reports_line() {
        let err = MarkovProcess::from_json_str("{\n\"time\": \"continuous\",\n\"n\": 3,,\n}")
            .unwrap_err();
        match err {
            NessError::Parse(msg) => assert!(msg.contains("line 3"), "{msg}"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn zero_index_rejected() {
        assert!(matches!(
            MarkovProcess::from_json_str(r#"{"time":"continuous","n":2,"edges":[[0,1,1.0]]}"#),
            Err(NessError::Parse(_))
        ));
    }

    #[test]
    fn continuous_loops_rejected() {
        assert!(MarkovProcess::from_json_str(
            r#"{"time":"continuous","n":2,"edges":[[1,2,1.0],[2,1,1.0]],"loops":[[1,0.5]]}"#
        )
        .is_err());
    }

    #[test]
    fn model_round_trip() {
        let p =
            MarkovProcess::discrete(2, [(0, 1, 0.5), (1, 0, 0.25)], [(0, 0.5), (1, 0.75)]).unwrap();
        assert_eq!(
            MarkovProcess::from_json_str(&p.to_json_string()).unwrap(),
            p
        );
    }

    #[test]
    fn flux_round_trip() {
        let f = FluxField::from_edges(2, [(0, 1, 0.2), (1, 0, 0.2)])
            .unwrap()
            .with_loops(vec![0.1, 0.5])
            .unwrap();
        let back = FluxFile::parse(&f.to_json_string())
            .unwrap()
            .into_field()
            .unwrap();
        assert_eq!(back, f);
    }
}
