//! Directed graphs with a cemetery vertex, their standing assumptions, and
//! the combinatorics built on top of them.
//!
//! A [`DirectedGraph`] has a distinguished absorbing vertex δ (the
//! *cemetery*) and a base point `x0`. Edges carry a rational weight α. Edge
//! indices follow the order in which edges were supplied; that order is the
//! canonical edge order used for orientations and for sorting spanning
//! trees.

mod builtin;
mod edgeset;
mod enumerate;
mod flow;
mod hat;
pub mod io;
mod random;

use std::collections::HashMap;
use std::fmt;

use num::rational::BigRational;
use num::{One, Zero};

pub use builtin::{builtin, chain, triangle, two_diamond, two_edge, BUILTIN_NAMES};
pub use edgeset::EdgeSet;
pub use enumerate::{
    cycle_rank, enumerate_cycles, enumerate_cycles_in, enumerate_paths, enumerate_spanning_trees,
    fundamental_cycle, genus, tree_path, SignedEdgeSet, SpanningTree, WalkKind,
};
pub use flow::{
    is_arrangement_basis, orientation_sign, solve_tree_coordinates, FlowPoint, TreeChart,
};
pub use hat::{hat_graph, HatGraph};
pub use random::{random_graph, random_graphs};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Hard limit coming from the 64-bit [`EdgeSet`] representation.
pub const MAX_EDGES: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub alpha: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectedGraph {
    vertices: Vec<String>,
    cemetery: usize,
    base: usize,
    edges: Vec<Edge>,
    /// Non-cemetery vertices in vertex order.
    u: Vec<usize>,
    /// Position of each vertex in `u` (`None` for the cemetery).
    u_pos: Vec<Option<usize>>,
}

/// One failed standing assumption.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    LoopEdge { edge: String },
    EdgeFromCemetery { edge: String },
    NoPathToCemetery { vertex: String },
    NoPathFromBase { vertex: String },
    DuplicateEdgeId { edge: String },
    BaseIsCemetery,
    TooManyEdges { count: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LoopEdge { edge } => write!(f, "loop edge {edge}"),
            Violation::EdgeFromCemetery { edge } => write!(f, "edge with origin δ: {edge}"),
            Violation::NoPathToCemetery { vertex } => write!(f, "no directed path {vertex}→δ"),
            Violation::NoPathFromBase { vertex } => write!(f, "no directed path x0→{vertex}"),
            Violation::DuplicateEdgeId { edge } => write!(f, "duplicate edge id {edge}"),
            Violation::BaseIsCemetery => write!(f, "base point equals the cemetery"),
            Violation::TooManyEdges { count } => {
                write!(f, "{count} edges exceed the limit of {MAX_EDGES}")
            }
        }
    }
}

impl DirectedGraph {
    /// Builds a graph from named vertices and `(id, tail, head, alpha)`
    /// edges. Only name resolution is checked here; see [`validate`] for
    /// the standing assumptions.
    pub fn new<S: AsRef<str>>(
        vertices: &[S],
        cemetery: &str,
        base: &str,
        edges: Vec<(String, String, String, BigRational)>,
    ) -> Result<Self> {
        let vertices: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.as_str(), i).is_some() {
                return Err(Error::Parse(format!("duplicate vertex {v:?}")));
            }
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::Parse(format!("unknown vertex {name:?}")))
        };
        let cemetery = lookup(cemetery)?;
        let base = lookup(base)?;
        let edges = edges
            .into_iter()
            .map(|(id, tail, head, alpha)| {
                Ok(Edge { tail: lookup(&tail)?, head: lookup(&head)?, id, alpha })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(vertices, cemetery, base, edges))
    }

    /// Convenience constructor with unit weights.
    pub fn with_unit_weights(
        vertices: &[&str],
        cemetery: &str,
        base: &str,
        edges: &[(&str, &str, &str)],
    ) -> Result<Self> {
        let edges = edges
            .iter()
            .map(|&(id, t, h)| (id.to_string(), t.to_string(), h.to_string(), BigRational::one()))
            .collect();
        Self::new(vertices, cemetery, base, edges)
    }

    pub(crate) fn from_parts(
        vertices: Vec<String>,
        cemetery: usize,
        base: usize,
        edges: Vec<Edge>,
    ) -> Self {
        let u: Vec<usize> = (0..vertices.len()).filter(|&v| v != cemetery).collect();
        let mut u_pos = vec![None; vertices.len()];
        for (k, &v) in u.iter().enumerate() {
            u_pos[v] = Some(k);
        }
        DirectedGraph { vertices, cemetery, base, edges, u, u_pos }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn cemetery(&self) -> usize {
        self.cemetery
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// The non-cemetery vertices U, in vertex order.
    pub fn u_vertices(&self) -> &[usize] {
        &self.u
    }

    /// Position of `v` inside [`Self::u_vertices`].
    pub fn u_position(&self, v: usize) -> Option<usize> {
        self.u_pos[v]
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn edge_id(&self, e: usize) -> &str {
        &self.edges[e].id
    }

    /// Resolves edge ids to indices.
    pub fn edge_set(&self, ids: &[&str]) -> Result<EdgeSet> {
        ids.iter()
            .map(|id| self.edge_index(id).ok_or_else(|| Error::UnknownEdge(id.to_string())))
            .collect()
    }

    pub fn edge_ids(&self, set: EdgeSet) -> Vec<String> {
        set.iter().map(|e| self.edges[e].id.clone()).collect()
    }

    pub fn out_edges(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().enumerate().filter(move |(_, e)| e.tail == x).map(|(i, _)| i)
    }

    pub fn all_edges(&self) -> EdgeSet {
        EdgeSet::full(self.edges.len())
    }

    /// `|E| - |U|`, the dimension of the affine flow space.
    pub fn flow_dimension(&self) -> usize {
        self.edges.len().saturating_sub(self.u.len())
    }

    pub fn alpha(&self) -> Vec<BigRational> {
        self.edges.iter().map(|e| e.alpha.clone()).collect()
    }

    /// β_x: total weight leaving `x`.
    pub fn beta(&self, x: usize) -> BigRational {
        self.out_edges(x).fold(BigRational::zero(), |acc, e| acc + &self.edges[e].alpha)
    }

    /// Same graph with the edge weights replaced.
    pub fn with_alpha(&self, alpha: &[BigRational]) -> Result<Self> {
        if alpha.len() != self.edges.len() {
            return Err(Error::Dimension(format!(
                "{} weights for {} edges",
                alpha.len(),
                self.edges.len()
            )));
        }
        let mut g = self.clone();
        for (e, a) in g.edges.iter_mut().zip(alpha) {
            e.alpha = a.clone();
        }
        Ok(g)
    }

    /// The graph restricted to an edge subset (same vertices). The result
    /// need not satisfy the standing assumptions.
    pub fn subgraph(&self, keep: EdgeSet) -> Self {
        let edges = keep.iter().map(|e| self.edges[e].clone()).collect();
        Self::from_parts(self.vertices.clone(), self.cemetery, self.base, edges)
    }

    /// Errors unless [`validate`] reports no violation.
    pub fn ensure_valid(&self) -> Result<()> {
        let violations = validate(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(violations.iter().map(|v| v.to_string()).collect()))
        }
    }

    /// Vertices reachable from `start` along directed edges (forward) or
    /// against them (backward).
    fn reachable(&self, start: usize, forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                let (from, to) = if forward { (e.tail, e.head) } else { (e.head, e.tail) };
                if from == v && !seen[to] {
                    seen[to] = true;
                    stack.push(to);
                }
            }
        }
        seen
    }
}

/// Checks the standing assumptions and reports every violation.
pub fn validate(g: &DirectedGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    if g.edges.len() > MAX_EDGES {
        out.push(Violation::TooManyEdges { count: g.edges.len() });
    }
    if g.base == g.cemetery {
        out.push(Violation::BaseIsCemetery);
    }
    let mut seen = std::collections::HashSet::new();
    for e in &g.edges {
        if !seen.insert(e.id.as_str()) {
            out.push(Violation::DuplicateEdgeId { edge: e.id.clone() });
        }
        if e.tail == e.head {
            out.push(Violation::LoopEdge { edge: e.id.clone() });
        }
        if e.tail == g.cemetery {
            out.push(Violation::EdgeFromCemetery { edge: e.id.clone() });
        }
    }
    let from_base = g.reachable(g.base, true);
    let to_cemetery = g.reachable(g.cemetery, false);
    for &x in &g.u {
        if !from_base[x] {
            out.push(Violation::NoPathFromBase { vertex: g.vertices[x].clone() });
        }
        if !to_cemetery[x] {
            out.push(Violation::NoPathToCemetery { vertex: g.vertices[x].clone() });
        }
    }
    out
}

/// `div(θ)(x) = Σ_{tail(e)=x} θ_e − Σ_{head(e)=x} θ_e` for `x` in U, in
/// the order of [`DirectedGraph::u_vertices`].
pub fn divergence<T: Scalar>(g: &DirectedGraph, theta: &[T]) -> Result<Vec<T>> {
    if theta.len() != g.n_edges() {
        return Err(Error::Dimension(format!(
            "{} edge values for {} edges",
            theta.len(),
            g.n_edges()
        )));
    }
    let mut div = vec![T::zero(); g.u.len()];
    for (e, t) in g.edges.iter().zip(theta) {
        if let Some(k) = g.u_pos[e.tail] {
            div[k] = div[k].clone() + t.clone();
        }
        if let Some(k) = g.u_pos[e.head] {
            div[k] = div[k].clone() - t.clone();
        }
    }
    Ok(div)
}

/// `div(z) − δ_{x0}`, which vanishes exactly on the affine flow space.
pub fn flow_residual<T: Scalar>(g: &DirectedGraph, z: &[T]) -> Result<Vec<T>> {
    let mut div = divergence(g, z)?;
    let k = g.u_pos[g.base].expect("base point is not the cemetery");
    div[k] = div[k].clone() - T::one();
    Ok(div)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rational};

    #[test]
    fn triangle_is_valid() {
        assert!(validate(&triangle()).is_empty());
        assert!(validate(&two_edge()).is_empty());
        assert!(validate(&chain()).is_empty());
        assert!(validate(&two_diamond()).is_empty());
    }

    #[test]
    fn edge_from_cemetery_is_reported() {
        let g = DirectedGraph::with_unit_weights(
            &["x0", "d"],
            "d",
            "x0",
            &[("e1", "x0", "d"), ("e2", "d", "x0")],
        )
        .unwrap();
        let v = validate(&g);
        assert_eq!(v, vec![Violation::EdgeFromCemetery { edge: "e2".into() }]);
        assert!(v[0].to_string().contains("edge with origin δ"));
    }

    #[test]
    fn isolated_vertex_breaks_both_reachability_rules() {
        let g = DirectedGraph::with_unit_weights(&["x0", "y", "d"], "d", "x0", &[("e1", "x0", "d")])
            .unwrap();
        let v = validate(&g);
        assert!(v.contains(&Violation::NoPathFromBase { vertex: "y".into() }));
        assert!(v.contains(&Violation::NoPathToCemetery { vertex: "y".into() }));
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn loops_and_duplicate_ids() {
        let g = DirectedGraph::with_unit_weights(
            &["x0", "d"],
            "d",
            "x0",
            &[("e1", "x0", "d"), ("e1", "x0", "d"), ("e3", "x0", "x0")],
        )
        .unwrap();
        let v = validate(&g);
        assert!(v.contains(&Violation::DuplicateEdgeId { edge: "e1".into() }));
        assert!(v.contains(&Violation::LoopEdge { edge: "e3".into() }));
    }

    #[test]
    fn unknown_vertex_is_a_parse_error() {
        let r = DirectedGraph::with_unit_weights(&["x0", "d"], "d", "x0", &[("e1", "x0", "zz")]);
        assert!(matches!(r, Err(Error::Parse(_))));
    }

    #[test]
    fn divergence_examples() {
        let g = two_edge();
        let div = divergence(&g, &[0.4, 0.6]).unwrap();
        assert_eq!(div, vec![1.0]);

        let g = triangle();
        let z = [rational(2, 3), rational(1, 3), rational(2, 3), rational(1, 3)];
        assert_eq!(divergence(&g, &z).unwrap(), vec![int(1), int(0)]);
        assert!(divergence(&g, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn cycle_indicators_are_divergence_free() {
        for g in [triangle(), two_edge(), two_diamond()] {
            for c in enumerate_cycles(&g) {
                let chi: Vec<BigRational> = c.incidence(g.n_edges());
                assert!(divergence(&g, &chi).unwrap().iter().all(Zero::is_zero));
            }
        }
    }

    #[test]
    fn beta_sums_out_weights() {
        let g = triangle().with_alpha(&[int(1), int(2), int(3), int(4)]).unwrap();
        assert_eq!(g.beta(g.base()), int(4));
        assert_eq!(g.beta(g.vertex_index("a").unwrap()), int(6));
    }
}
