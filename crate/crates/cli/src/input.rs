//! Loading graphs and decoding command-line values.

use std::path::Path;

use num::complex::Complex64;
use num::rational::BigRational;
use rwde::graph::io::parse_assignments;
use rwde::graph::{builtin, io::parse_graph, DirectedGraph, SpanningTree, BUILTIN_NAMES};
use rwde::scalar::{format_rational, rational_to_f64};
use rwde::Error;
use serde_json::{json, Value};

use crate::Common;

pub struct CliError {
    pub status: u8,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_)
            | Error::UnknownEdge(_)
            | Error::MissingEdgeValue(_)
            | Error::Dimension(_)
            | Error::EdgeInTree(_)
            | Error::NotSpanningTree(_)
            | Error::TreeNotDirected => 2,
            Error::InvalidGraph(_) | Error::NonPositiveWeight { .. } => 3,
            _ => 1,
        };
        CliError { status, message: e.to_string() }
    }
}

pub fn usage(message: impl Into<String>) -> CliError {
    CliError { status: 2, message: message.into() }
}

pub fn check_ranges(samples: Option<u64>, tol: Option<f64>) -> Result<(), CliError> {
    if samples == Some(0) {
        return Err(usage("--samples must be positive"));
    }
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(usage("--tol must be positive"));
        }
    }
    Ok(())
}

/// Reads the graph named by `--graph` and applies `--alpha`, without
/// checking the standing assumptions.
pub fn load_unchecked(c: &Common) -> Result<DirectedGraph, CliError> {
    let path = Path::new(&c.graph);
    let g = if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError { status: 2, message: format!("cannot read {}: {e}", path.display()) })?;
        parse_graph(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
    } else if let Some(g) = builtin(&c.graph) {
        g
    } else {
        return Err(usage(format!(
            "{:?} is neither a file nor a bundled graph ({})",
            c.graph,
            BUILTIN_NAMES.join(", ")
        )));
    };
    if c.alpha.is_empty() {
        return Ok(g);
    }
    let mut alpha = g.alpha();
    for (e, v) in parse_assignments(&g, &c.alpha)? {
        alpha[e] = v;
    }
    Ok(g.with_alpha(&alpha)?)
}

pub fn load(c: &Common) -> Result<DirectedGraph, CliError> {
    let g = load_unchecked(c)?;
    g.ensure_valid()?;
    Ok(g)
}

/// λ from `--lambda`, with `default(e)` on the edges not mentioned.
pub fn lambda_exact(
    g: &DirectedGraph,
    c: &Common,
    default: impl Fn(usize) -> BigRational,
) -> Result<Vec<BigRational>, CliError> {
    let mut lambda: Vec<BigRational> = (0..g.n_edges()).map(default).collect();
    for (e, v) in parse_assignments(g, &c.lambda)? {
        lambda[e] = v;
    }
    Ok(lambda)
}

pub fn lambda_f64(
    g: &DirectedGraph,
    c: &Common,
    default: impl Fn(usize) -> BigRational,
) -> Result<Vec<f64>, CliError> {
    Ok(lambda_exact(g, c, default)?.iter().map(rational_to_f64).collect())
}

/// The tree given by `--tree`, if any.
pub fn tree(g: &DirectedGraph, c: &Common) -> Result<Option<SpanningTree>, CliError> {
    if c.tree.is_empty() {
        return Ok(None);
    }
    let ids: Vec<&str> = c.tree.iter().map(|s| s.trim()).collect();
    Ok(Some(SpanningTree::from_ids(g, &ids)?))
}

/// Applies one `--waypoint` to the previous point.
pub fn waypoint(g: &DirectedGraph, text: &str, previous: &[Complex64]) -> Result<Vec<Complex64>, CliError> {
    let mut out = previous.to_vec();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (id, value) =
            item.split_once('=').ok_or_else(|| usage(format!("expected edge=value in waypoint, got {item:?}")))?;
        let e = g.edge_index(id.trim()).ok_or_else(|| Error::UnknownEdge(id.trim().to_string()))?;
        out[e] = value
            .trim()
            .parse::<Complex64>()
            .map_err(|_| usage(format!("cannot read {value:?} as a complex number")))?;
    }
    Ok(out)
}

pub fn per_edge<T: Clone + Into<Value>>(g: &DirectedGraph, values: &[T]) -> Value {
    Value::Object((0..g.n_edges()).map(|e| (g.edge_id(e).to_string(), values[e].clone().into())).collect())
}

pub fn per_edge_rational(g: &DirectedGraph, values: &[BigRational]) -> Value {
    let text: Vec<String> = values.iter().map(format_rational).collect();
    per_edge(g, &text)
}

pub fn tree_label(g: &DirectedGraph, t: &SpanningTree) -> Value {
    json!(g.edge_ids(t.edges))
}

/// The inputs block shared by every report.
pub fn inputs(g: &DirectedGraph, c: &Common, extra: Value) -> Value {
    let mut v = json!({
        "graph": c.graph,
        "alpha": per_edge_rational(g, &g.alpha()),
        "seed": c.seed,
    });
    if let (Value::Object(a), Value::Object(b)) = (&mut v, extra) {
        a.extend(b);
    }
    v
}
