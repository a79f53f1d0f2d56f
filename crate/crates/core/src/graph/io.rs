//! JSON graph files and edge-value maps.
//!
//! ```json
//! {
//!   "vertices": ["x0", "a", "δ"],
//!   "cemetery": "δ",
//!   "base": "x0",
//!   "edges": [{"id": "e1", "tail": "x0", "head": "a", "alpha": "1/2"}]
//! }
//! ```
//!
//! Weights may be JSON numbers or strings holding an integer, a decimal or a
//! fraction `p/q`; all of them are read exactly.

use std::collections::BTreeMap;

use num::rational::BigRational;
use serde::{Deserialize, Serialize};

use super::DirectedGraph;
use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational};

/// A number written either as a JSON number or as a string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberText {
    Number(serde_json::Number),
    Text(String),
}

impl NumberText {
    pub fn to_rational(&self) -> Result<BigRational> {
        match self {
            NumberText::Number(n) => parse_rational(&n.to_string()),
            NumberText::Text(s) => parse_rational(s),
        }
    }
}

impl From<&BigRational> for NumberText {
    fn from(q: &BigRational) -> Self {
        NumberText::Text(format_rational(q))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub id: String,
    pub tail: String,
    pub head: String,
    #[serde(default = "unit_weight")]
    pub alpha: NumberText,
}

fn unit_weight() -> NumberText {
    NumberText::Text("1".into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub cemetery: String,
    pub base: String,
    pub edges: Vec<EdgeRecord>,
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<DirectedGraph> {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let alpha = e
                    .alpha
                    .to_rational()
                    .map_err(|err| Error::Parse(format!("edge {:?}, field alpha: {err}", e.id)))?;
                Ok((e.id.clone(), e.tail.clone(), e.head.clone(), alpha))
            })
            .collect::<Result<Vec<_>>>()?;
        DirectedGraph::new(&self.vertices, &self.cemetery, &self.base, edges)
    }

    pub fn from_graph(g: &DirectedGraph) -> Self {
        GraphFile {
            vertices: g.vertices().to_vec(),
            cemetery: g.vertex_name(g.cemetery()).to_string(),
            base: g.vertex_name(g.base()).to_string(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    id: e.id.clone(),
                    tail: g.vertex_name(e.tail).to_string(),
                    head: g.vertex_name(e.head).to_string(),
                    alpha: NumberText::from(&e.alpha),
                })
                .collect(),
        }
    }
}

/// Parses a graph file. Syntax errors carry the line and column.
pub fn parse_graph(text: &str) -> Result<DirectedGraph> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_graph()
}

pub fn graph_to_json(g: &DirectedGraph) -> String {
    serde_json::to_string_pretty(&GraphFile::from_graph(g)).expect("graph serializes")
}

/// Reads `{edge id: value}` into a dense per-edge vector; edges absent from
/// the map keep `default`.
pub fn edge_values(
    g: &DirectedGraph,
    map: &BTreeMap<String, NumberText>,
    default: &[BigRational],
) -> Result<Vec<BigRational>> {
    let mut out = default.to_vec();
    for (id, v) in map {
        let e = g.edge_index(id).ok_or_else(|| Error::UnknownEdge(id.clone()))?;
        out[e] = v.to_rational().map_err(|err| Error::Parse(format!("edge {id:?}: {err}")))?;
    }
    Ok(out)
}

/// Parses `id=value` assignments as used on the command line.
pub fn parse_assignments(g: &DirectedGraph, items: &[String]) -> Result<BTreeMap<usize, BigRational>> {
    let mut out = BTreeMap::new();
    for item in items {
        let (id, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected edge=value, got {item:?}")))?;
        let e = g.edge_index(id.trim()).ok_or_else(|| Error::UnknownEdge(id.trim().to_string()))?;
        out.insert(e, parse_rational(value)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{triangle, validate};
    use crate::scalar::{int, rational};

    #[test]
    fn round_trips_the_triangle() {
        let g = triangle().with_alpha(&[rational(1, 3), int(2), rational(5, 2), int(1)]).unwrap();
        let text = graph_to_json(&g);
        assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn weights_are_exact() {
        let text = r#"{"vertices": ["x0", "d"], "cemetery": "d", "base": "x0",
            "edges": [{"id": "e1", "tail": "x0", "head": "d", "alpha": 0.1},
                      {"id": "e2", "tail": "x0", "head": "d", "alpha": "2/6"},
                      {"id": "e3", "tail": "x0", "head": "d"}]}"#;
        let g = parse_graph(text).unwrap();
        assert_eq!(g.alpha(), vec![rational(1, 10), rational(1, 3), int(1)]);
        assert!(validate(&g).is_empty());
    }

    #[test]
    fn syntax_errors_report_position() {
        let err = parse_graph("{\n \"vertices\": [\"x0\",\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn bad_fields_are_named() {
        let text = r#"{"vertices": ["x0", "d"], "cemetery": "d", "base": "x0",
            "edges": [{"id": "e1", "tail": "x0", "head": "d", "alpha": "x/2"}]}"#;
        let msg = parse_graph(text).unwrap_err().to_string();
        assert!(msg.contains("e1") && msg.contains("alpha"), "{msg}");
        let text = r#"{"vertices": ["x0"], "cemetery": "d", "base": "x0", "edges": []}"#;
        assert!(parse_graph(text).unwrap_err().to_string().contains("unknown vertex"));
    }

    #[test]
    fn assignments() {
        let g = triangle();
        let m = parse_assignments(&g, &["e2=1/2".into(), "e4=3".into()]).unwrap();
        assert_eq!(m[&1], rational(1, 2));
        assert_eq!(m[&3], int(3));
        assert!(parse_assignments(&g, &["e9=1".into()]).is_err());
        assert!(parse_assignments(&g, &["e1".into()]).is_err());
    }
}
