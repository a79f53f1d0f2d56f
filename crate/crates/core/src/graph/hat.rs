//! The bipartite doubling Ĝ of a graph.
//!
//! Every `x ∈ U` splits into `x-` (receives edges) and `x+` (emits edges),
//! joined by `ê_x = (x-, x+)` of weight `−β_x`. An edge `e = (x, y)` becomes
//! `ê = (x+, y-)`, or `(x+, δ)` when `y = δ`. The base point is `x0-`. Flow
//! spaces of G and Ĝ are identified through `z_{ê_x} = Σ_{tail(e)=x} z_e`.

use num::Signed;

use super::{DirectedGraph, Edge, EdgeSet, SpanningTree};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct HatGraph {
    graph: DirectedGraph,
    /// `lift[e]` is the index of ê in the hat graph.
    lift: Vec<usize>,
    /// `vertex_edge[k]` is the index of `ê_x` for the k-th vertex of U.
    vertex_edge: Vec<usize>,
}

/// Builds Ĝ with `α_ê = α_e` and `α_{ê_x} = −β_x`.
pub fn hat_graph(g: &DirectedGraph) -> HatGraph {
    let u = g.u_vertices();
    let mut names = Vec::with_capacity(2 * u.len() + 1);
    // vertex k of U maps to 2k (minus copy) and 2k+1 (plus copy)
    for &x in u {
        names.push(format!("{}-", g.vertex_name(x)));
        names.push(format!("{}+", g.vertex_name(x)));
    }
    let cemetery = names.len();
    names.push(g.vertex_name(g.cemetery()).to_string());
    let minus = |x: usize| 2 * g.u_position(x).expect("vertex of U");
    let plus = |x: usize| minus(x) + 1;

    let mut edges = Vec::with_capacity(g.n_edges() + u.len());
    let mut lift = Vec::with_capacity(g.n_edges());
    for e in g.edges() {
        let head = if e.head == g.cemetery() { cemetery } else { minus(e.head) };
        lift.push(edges.len());
        edges.push(Edge { id: e.id.clone(), tail: plus(e.tail), head, alpha: e.alpha.clone() });
    }
    let mut vertex_edge = Vec::with_capacity(u.len());
    for &x in u {
        vertex_edge.push(edges.len());
        edges.push(Edge {
            id: format!("^{}", g.vertex_name(x)),
            tail: minus(x),
            head: plus(x),
            alpha: -g.beta(x),
        });
    }
    let base = minus(g.base());
    HatGraph { graph: DirectedGraph::from_parts(names, cemetery, base, edges), lift, vertex_edge }
}

impl HatGraph {
    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    /// Index of ê in Ĝ.
    pub fn lift_edge(&self, e: usize) -> usize {
        self.lift[e]
    }

    /// Indices of the edges `ê_x`, in the order of U.
    pub fn vertex_edges(&self) -> &[usize] {
        &self.vertex_edge
    }

    pub fn vertex_edge_set(&self) -> EdgeSet {
        self.vertex_edge.iter().copied().collect()
    }

    /// `T̂ = {ê : e ∈ T} ∪ {ê_x : x ∈ U}`.
    pub fn lift_tree(&self, tree: &SpanningTree) -> SpanningTree {
        let edges = tree.edges.iter().map(|e| self.lift[e]).collect::<EdgeSet>().union(self.vertex_edge_set());
        SpanningTree::new(&self.graph, edges).expect("lifted tree spans Ĝ")
    }

    /// Removes the `ê_x` from a tree of Ĝ and maps back to edges of G; the
    /// result is a spanning tree of `g` when every `ê_x` was present.
    pub fn restrict_tree(&self, g: &DirectedGraph, tree: &SpanningTree) -> Result<SpanningTree> {
        if !self.vertex_edge_set().is_subset(tree.edges) {
            return Err(Error::NotSpanningTree("some ê_x is missing".into()));
        }
        let edges = (0..g.n_edges()).filter(|&e| tree.edges.contains(self.lift[e])).collect();
        SpanningTree::new(g, edges)
    }

    /// Lifts a flow on G to Ĝ by appending `z_{ê_x} = Σ_{tail(e)=x} z_e`.
    pub fn lift_flow<T: crate::scalar::Scalar>(&self, g: &DirectedGraph, z: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.graph.n_edges()];
        for (e, v) in z.iter().enumerate() {
            out[self.lift[e]] = v.clone();
        }
        for (k, &x) in g.u_vertices().iter().enumerate() {
            out[self.vertex_edge[k]] = g.out_edges(x).fold(T::zero(), |acc, e| acc + z[e].clone());
        }
        out
    }

    /// True if every hat weight is negative, i.e. built from positive α.
    pub fn has_negative_vertex_weights(&self) -> bool {
        self.vertex_edge.iter().all(|&e| self.graph.edge(e).alpha.is_negative())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{
        enumerate_spanning_trees, flow_residual, triangle, two_diamond, two_edge, validate,
    };
    use crate::scalar::{int, rational};
    use num::Zero;

    #[test]
    fn two_edge_hat_shape() {
        let g = two_edge().with_alpha(&[int(2), int(5)]).unwrap();
        let h = hat_graph(&g);
        assert_eq!(h.graph().n_vertices(), 3);
        assert_eq!(h.graph().n_edges(), 3);
        assert_eq!(h.graph().edge(h.vertex_edges()[0]).alpha, int(-7));
        assert!(validate(h.graph()).is_empty());
        assert!(h.has_negative_vertex_weights());
    }

    #[test]
    fn triangle_hat_shape() {
        let g = triangle().with_alpha(&[int(1), int(2), int(3), int(4)]).unwrap();
        let h = hat_graph(&g);
        assert_eq!(h.graph().n_vertices(), 5);
        assert_eq!(h.graph().n_edges(), 6);
        let w: Vec<_> = h.vertex_edges().iter().map(|&e| h.graph().edge(e).alpha.clone()).collect();
        assert_eq!(w, vec![int(-4), int(-6)]);
        assert!(validate(h.graph()).is_empty());
    }

    #[test]
    fn directed_trees_correspond() {
        for g in [triangle(), two_edge(), two_diamond()] {
            let h = hat_graph(&g);
            let hat_directed = enumerate_spanning_trees(h.graph(), true);
            let directed = enumerate_spanning_trees(&g, true);
            assert_eq!(hat_directed.len(), directed.len());
            for t in &hat_directed {
                assert!(h.vertex_edge_set().is_subset(t.edges));
                let r = h.restrict_tree(&g, t).unwrap();
                assert!(r.directed);
                assert!(directed.contains(&r));
                assert_eq!(h.lift_tree(&r), *t);
            }
        }
    }

    #[test]
    fn lifted_flow_stays_in_flow_space() {
        let g = triangle();
        let h = hat_graph(&g);
        let z = [rational(2, 3), rational(1, 3), rational(2, 3), rational(1, 3)];
        let zh = h.lift_flow(&g, &z);
        assert!(flow_residual(h.graph(), &zh).unwrap().iter().all(Zero::is_zero));
        // z_{ê_{x0}} = z1 + z3, z_{ê_a} = z2 + z4
        assert_eq!(zh[h.vertex_edges()[0]], rational(4, 3));
        assert_eq!(zh[h.vertex_edges()[1]], rational(2, 3));
    }
}
