//! Small graphs used throughout the tests, the book and the CLI.

use super::DirectedGraph;

pub const BUILTIN_NAMES: [&str; 4] = ["two-edge", "triangle", "two-diamond", "chain"];

/// Two parallel edges `e1, e2: x0 → δ`.
pub fn two_edge() -> DirectedGraph {
    DirectedGraph::with_unit_weights(&["x0", "δ"], "δ", "x0", &[("e1", "x0", "δ"), ("e2", "x0", "δ")])
        .expect("builtin graph")
}

/// `e1: x0→a, e2: a→x0, e3: x0→δ, e4: a→δ`.
pub fn triangle() -> DirectedGraph {
    DirectedGraph::with_unit_weights(
        &["x0", "a", "δ"],
        "δ",
        "x0",
        &[("e1", "x0", "a"), ("e2", "a", "x0"), ("e3", "x0", "δ"), ("e4", "a", "δ")],
    )
    .expect("builtin graph")
}

/// Two diamonds joined by the bridge `e5: c → g`; their cycles are vertex
/// disjoint.
pub fn two_diamond() -> DirectedGraph {
    DirectedGraph::with_unit_weights(
        &["x0", "a", "b", "c", "g", "d", "f", "δ"],
        "δ",
        "x0",
        &[
            ("e1", "x0", "a"),
            ("e2", "x0", "b"),
            ("e3", "a", "c"),
            ("e4", "b", "c"),
            ("e5", "c", "g"),
            ("e6", "g", "d"),
            ("e7", "g", "f"),
            ("e8", "d", "δ"),
            ("e9", "f", "δ"),
        ],
    )
    .expect("builtin graph")
}

/// `e1: x0→a, e2: a→δ`.
pub fn chain() -> DirectedGraph {
    DirectedGraph::with_unit_weights(&["x0", "a", "δ"], "δ", "x0", &[("e1", "x0", "a"), ("e2", "a", "δ")])
        .expect("builtin graph")
}

pub fn builtin(name: &str) -> Option<DirectedGraph> {
    match name {
        "two-edge" => Some(two_edge()),
        "triangle" => Some(triangle()),
        "two-diamond" => Some(two_diamond()),
        "chain" => Some(chain()),
        _ => None,
    }
}
