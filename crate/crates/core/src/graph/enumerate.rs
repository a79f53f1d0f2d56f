//! Exhaustive enumeration of simple cycles, simple paths `x0 → δ` and
//! spanning trees, plus the tree-relative cycles and paths used by the
//! connection matrices.
//!
//! Cycles and paths live in the underlying undirected multigraph: an edge
//! may be traversed against its direction, in which case it carries sign
//! −1.

use num::rational::BigRational;
use num::Zero;

use super::{DirectedGraph, EdgeSet};
use crate::error::{Error, Result};
use crate::scalar::{Matrix, Scalar};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum WalkKind {
    Cycle,
    Path,
}

/// A simple cycle or simple path together with its orientation.
///
/// `steps` lists the edges in walk order with their sign: +1 when the edge
/// is traversed from tail to head. `walk` holds the visited vertices; for a
/// cycle it does not repeat the first vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedEdgeSet {
    pub kind: WalkKind,
    pub steps: Vec<(usize, i8)>,
    pub walk: Vec<usize>,
    pub edges: EdgeSet,
    pub directed: bool,
}

impl SignedEdgeSet {
    fn new(kind: WalkKind, steps: Vec<(usize, i8)>, walk: Vec<usize>) -> Self {
        let edges = steps.iter().map(|&(e, _)| e).collect();
        let directed = steps.iter().all(|&(_, s)| s == 1);
        SignedEdgeSet { kind, steps, walk, edges, directed }
    }

    /// ε(e): ±1 on member edges, 0 elsewhere.
    pub fn sign(&self, e: usize) -> i8 {
        self.steps.iter().find(|&&(f, _)| f == e).map_or(0, |&(_, s)| s)
    }

    /// The signed indicator `χ = Σ ε(e) δ_e`.
    pub fn incidence<T: Scalar>(&self, n_edges: usize) -> Vec<T> {
        let mut v = vec![T::zero(); n_edges];
        for &(e, s) in &self.steps {
            v[e] = T::from_i64(s as i64);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The same edge set traversed the other way round.
    pub fn reversed(&self) -> Self {
        let steps = self.steps.iter().rev().map(|&(e, s)| (e, -s)).collect();
        let mut walk = self.walk.clone();
        walk.reverse();
        if self.kind == WalkKind::Cycle {
            walk.rotate_right(1);
        }
        SignedEdgeSet::new(self.kind, steps, walk)
    }

    /// Human readable form such as `{e1+, e4+, e3-}`.
    pub fn describe(&self, g: &DirectedGraph) -> String {
        let parts: Vec<String> = self
            .steps
            .iter()
            .map(|&(e, s)| format!("{}{}", g.edge_id(e), if s > 0 { '+' } else { '-' }))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpanningTree {
    pub edges: EdgeSet,
    pub directed: bool,
}

impl SpanningTree {
    /// Checks that `edges` is a spanning tree of `g`.
    pub fn new(g: &DirectedGraph, edges: EdgeSet) -> Result<Self> {
        if edges.len() + 1 != g.n_vertices() {
            return Err(Error::NotSpanningTree(format!(
                "{} edges for {} vertices",
                edges.len(),
                g.n_vertices()
            )));
        }
        if edges.iter().any(|e| e >= g.n_edges()) {
            return Err(Error::NotSpanningTree("edge index out of range".into()));
        }
        let mut dsu = Dsu::new(g.n_vertices());
        for e in edges.iter() {
            let edge = g.edge(e);
            if !dsu.union(edge.tail, edge.head) {
                return Err(Error::NotSpanningTree(format!("contains a cycle through {}", edge.id)));
            }
        }
        Ok(SpanningTree { edges, directed: is_directed_tree(g, edges) })
    }

    pub fn from_ids(g: &DirectedGraph, ids: &[&str]) -> Result<Self> {
        Self::new(g, g.edge_set(ids)?)
    }

    /// T^c in increasing edge order.
    pub fn complement(&self, g: &DirectedGraph) -> Vec<usize> {
        g.all_edges().difference(self.edges).to_vec()
    }
}

fn is_directed_tree(g: &DirectedGraph, edges: EdgeSet) -> bool {
    let mut out = vec![0usize; g.n_vertices()];
    for e in edges.iter() {
        out[g.edge(e).tail] += 1;
    }
    g.u_vertices().iter().all(|&x| out[x] == 1)
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Incidence lists `(edge, neighbour, sign)` restricted to `allowed`.
fn incidence_lists(g: &DirectedGraph, allowed: EdgeSet) -> Vec<Vec<(usize, usize, i8)>> {
    let mut adj = vec![Vec::new(); g.n_vertices()];
    for e in allowed.iter() {
        let edge = g.edge(e);
        adj[edge.tail].push((e, edge.head, 1));
        adj[edge.head].push((e, edge.tail, -1));
    }
    adj
}

/// All simple cycles of `g`.
pub fn enumerate_cycles(g: &DirectedGraph) -> Vec<SignedEdgeSet> {
    enumerate_cycles_in(g, g.all_edges())
}

/// All simple cycles using only edges of `within`. Each cycle is oriented
/// so that its smallest edge index is traversed forward (sign +1).
pub fn enumerate_cycles_in(g: &DirectedGraph, within: EdgeSet) -> Vec<SignedEdgeSet> {
    let adj = incidence_lists(g, within);
    let mut out = Vec::new();
    for first in within.iter() {
        let edge = g.edge(first);
        if edge.tail == edge.head {
            continue;
        }
        let (start, next) = (edge.tail, edge.head);
        let mut on_walk = vec![false; g.n_vertices()];
        on_walk[start] = true;
        on_walk[next] = true;
        let mut steps = vec![(first, 1i8)];
        let mut walk = vec![start, next];
        close_cycles(&adj, first, start, next, &mut on_walk, &mut steps, &mut walk, &mut out);
    }
    out.sort_by(|a, b| a.edges.lex_cmp(b.edges));
    out
}

#[allow(clippy::too_many_arguments)]
fn close_cycles(
    adj: &[Vec<(usize, usize, i8)>],
    first: usize,
    start: usize,
    at: usize,
    on_walk: &mut [bool],
    steps: &mut Vec<(usize, i8)>,
    walk: &mut Vec<usize>,
    out: &mut Vec<SignedEdgeSet>,
) {
    for &(e, w, s) in &adj[at] {
        if e <= first {
            continue;
        }
        if w == start {
            steps.push((e, s));
            out.push(SignedEdgeSet::new(WalkKind::Cycle, steps.clone(), walk.clone()));
            steps.pop();
        } else if !on_walk[w] {
            on_walk[w] = true;
            steps.push((e, s));
            walk.push(w);
            close_cycles(adj, first, start, w, on_walk, steps, walk, out);
            walk.pop();
            steps.pop();
            on_walk[w] = false;
        }
    }
}

/// All simple paths from `x0` to δ, oriented from `x0` toward δ.
pub fn enumerate_paths(g: &DirectedGraph) -> Vec<SignedEdgeSet> {
    let adj = incidence_lists(g, g.all_edges());
    let mut on_walk = vec![false; g.n_vertices()];
    on_walk[g.base()] = true;
    let mut out = Vec::new();
    let mut steps = Vec::new();
    let mut walk = vec![g.base()];
    extend_paths(&adj, g.cemetery(), g.base(), &mut on_walk, &mut steps, &mut walk, &mut out);
    out.sort_by(|a, b| a.edges.lex_cmp(b.edges));
    out
}

fn extend_paths(
    adj: &[Vec<(usize, usize, i8)>],
    target: usize,
    at: usize,
    on_walk: &mut [bool],
    steps: &mut Vec<(usize, i8)>,
    walk: &mut Vec<usize>,
    out: &mut Vec<SignedEdgeSet>,
) {
    for &(e, w, s) in &adj[at] {
        if on_walk[w] {
            continue;
        }
        steps.push((e, s));
        walk.push(w);
        if w == target {
            out.push(SignedEdgeSet::new(WalkKind::Path, steps.clone(), walk.clone()));
        } else {
            on_walk[w] = true;
            extend_paths(adj, target, w, on_walk, steps, walk, out);
            on_walk[w] = false;
        }
        walk.pop();
        steps.pop();
    }
}

/// All spanning trees in canonical order (lexicographic on the sorted edge
/// index lists). With `directed_only`, keeps the trees directed toward δ.
pub fn enumerate_spanning_trees(g: &DirectedGraph, directed_only: bool) -> Vec<SpanningTree> {
    let n = g.n_vertices();
    let mut out: Vec<EdgeSet> = Vec::new();
    if n == 0 {
        return Vec::new();
    }
    let mut chosen = Vec::with_capacity(n - 1);
    grow_trees(g, 0, &mut chosen, &mut out);
    let mut trees: Vec<SpanningTree> = out
        .into_iter()
        .map(|edges| SpanningTree { edges, directed: is_directed_tree(g, edges) })
        .filter(|t| !directed_only || t.directed)
        .collect();
    trees.sort_by(|a, b| a.edges.lex_cmp(b.edges));
    trees
}

fn grow_trees(g: &DirectedGraph, next: usize, chosen: &mut Vec<usize>, out: &mut Vec<EdgeSet>) {
    let need = g.n_vertices() - 1;
    if chosen.len() == need {
        out.push(chosen.iter().copied().collect());
        return;
    }
    if g.n_edges() - next < need - chosen.len() {
        return;
    }
    let edge = g.edge(next);
    if edge.tail != edge.head && !connected_by(g, chosen, edge.tail, edge.head) {
        chosen.push(next);
        grow_trees(g, next + 1, chosen, out);
        chosen.pop();
    }
    grow_trees(g, next + 1, chosen, out);
}

fn connected_by(g: &DirectedGraph, edges: &[usize], a: usize, b: usize) -> bool {
    let mut dsu = Dsu::new(g.n_vertices());
    for &e in edges {
        dsu.union(g.edge(e).tail, g.edge(e).head);
    }
    dsu.find(a) == dsu.find(b)
}

/// Unique simple path inside `tree` from `from` to `to`, as signed steps
/// and visited vertices.
fn path_in_tree(
    g: &DirectedGraph,
    tree: EdgeSet,
    from: usize,
    to: usize,
) -> Option<(Vec<(usize, i8)>, Vec<usize>)> {
    let adj = incidence_lists(g, tree);
    // parent pointers of a search rooted at `from`
    let mut via: Vec<Option<(usize, usize, i8)>> = vec![None; g.n_vertices()];
    let mut seen = vec![false; g.n_vertices()];
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        for &(e, w, s) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                via[w] = Some((v, e, s));
                stack.push(w);
            }
        }
    }
    if !seen[to] {
        return None;
    }
    let mut steps = Vec::new();
    let mut walk = vec![to];
    let mut v = to;
    while v != from {
        let (prev, e, s) = via[v].expect("visited vertex has a parent");
        steps.push((e, s));
        walk.push(prev);
        v = prev;
    }
    steps.reverse();
    walk.reverse();
    Some((steps, walk))
}

/// The unique cycle `C^{e0}_T` in `T ∪ {e0}`, oriented along `e0`.
pub fn fundamental_cycle(g: &DirectedGraph, tree: &SpanningTree, e0: usize) -> Result<SignedEdgeSet> {
    if tree.edges.contains(e0) {
        return Err(Error::EdgeInTree(g.edge_id(e0).to_string()));
    }
    let edge = g.edge(e0);
    let (mut steps, mut walk) = path_in_tree(g, tree.edges, edge.head, edge.tail)
        .ok_or_else(|| Error::NotSpanningTree("tree does not connect the edge endpoints".into()))?;
    steps.insert(0, (e0, 1));
    walk.insert(0, edge.tail);
    walk.pop();
    Ok(SignedEdgeSet::new(WalkKind::Cycle, steps, walk))
}

/// The unique simple path `σ_T` from `x0` to δ inside `T`.
pub fn tree_path(g: &DirectedGraph, tree: &SpanningTree) -> SignedEdgeSet {
    let (steps, walk) = path_in_tree(g, tree.edges, g.base(), g.cemetery())
        .expect("a spanning tree connects x0 to the cemetery");
    SignedEdgeSet::new(WalkKind::Path, steps, walk)
}

/// Genus of an edge subset: `|S| − |V(S)| + #components`.
pub fn genus(g: &DirectedGraph, subset: EdgeSet) -> usize {
    let mut dsu = Dsu::new(g.n_vertices());
    // |V(S)| − #components is the number of successful merges
    let merges = subset.iter().filter(|&e| dsu.union(g.edge(e).tail, g.edge(e).head)).count();
    subset.len() - merges
}

/// Rank of the signed indicators of all cycles contained in `subset`.
/// Independent route to [`genus`].
pub fn cycle_rank(g: &DirectedGraph, subset: EdgeSet) -> usize {
    let cycles = enumerate_cycles_in(g, subset);
    if cycles.is_empty() {
        return 0;
    }
    let m = Matrix::from_fn(cycles.len(), g.n_edges(), |i, e| {
        let s = cycles[i].sign(e);
        if s == 0 {
            BigRational::zero()
        } else {
            BigRational::from_i64(s as i64)
        }
    });
    m.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{chain, triangle, two_diamond, two_edge};

    fn ids(g: &DirectedGraph, s: EdgeSet) -> Vec<String> {
        g.edge_ids(s)
    }

    /// Brute-force oracle: an edge subset is a simple cycle iff it is
    /// connected and every touched vertex has degree two.
    fn cycle_sets_brute_force(g: &DirectedGraph) -> Vec<EdgeSet> {
        let mut out = Vec::new();
        for bits in 1u64..(1u64 << g.n_edges()) {
            let s = EdgeSet::from_bits(bits);
            let mut deg = vec![0; g.n_vertices()];
            for e in s.iter() {
                deg[g.edge(e).tail] += 1;
                deg[g.edge(e).head] += 1;
            }
            if deg.iter().any(|&d| d != 0 && d != 2) {
                continue;
            }
            let touched = deg.iter().filter(|&&d| d == 2).count();
            // connected 2-regular: |S| = |V(S)| and one component
            if s.len() == touched && genus(g, s) == 1 {
                out.push(s);
            }
        }
        out.sort_by(|a, b| a.lex_cmp(*b));
        out
    }

    #[test]
    fn two_edge_has_one_undirected_cycle() {
        let g = two_edge();
        let cycles = enumerate_cycles(&g);
        assert_eq!(cycles.len(), 1);
        assert_eq!(ids(&g, cycles[0].edges), ["e1", "e2"]);
        assert!(!cycles[0].directed);
        assert_eq!(cycles[0].sign(0), 1);
        assert_eq!(cycles[0].sign(1), -1);
    }

    #[test]
    fn triangle_cycles_match_brute_force() {
        let g = triangle();
        let cycles = enumerate_cycles(&g);
        let got: Vec<EdgeSet> = cycles.iter().map(|c| c.edges).collect();
        assert_eq!(got, cycle_sets_brute_force(&g));
        let names: Vec<Vec<String>> = cycles.iter().map(|c| ids(&g, c.edges)).collect();
        assert_eq!(names, [vec!["e1", "e2"], vec!["e1", "e3", "e4"], vec!["e2", "e3", "e4"]]);
        assert!(cycles[0].directed);
        assert!(!cycles[1].directed && !cycles[2].directed);
        // smallest edge forward
        assert_eq!((cycles[1].sign(0), cycles[1].sign(3), cycles[1].sign(2)), (1, 1, -1));
        assert_eq!((cycles[2].sign(1), cycles[2].sign(2), cycles[2].sign(3)), (1, 1, -1));
    }

    #[test]
    fn cycles_match_brute_force_on_two_diamond() {
        let g = two_diamond();
        let got: Vec<EdgeSet> = enumerate_cycles(&g).iter().map(|c| c.edges).collect();
        assert_eq!(got, cycle_sets_brute_force(&g));
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn trees_have_no_cycles() {
        let g = triangle();
        for t in enumerate_spanning_trees(&g, false) {
            assert!(enumerate_cycles_in(&g, t.edges).is_empty());
        }
    }

    #[test]
    fn paths_of_small_graphs() {
        let g = two_edge();
        let paths = enumerate_paths(&g);
        assert_eq!(paths.len(), 2);
        assert!(paths.iter().all(|p| p.directed && p.len() == 1));

        let g = triangle();
        let paths = enumerate_paths(&g);
        let names: Vec<Vec<String>> = paths.iter().map(|p| ids(&g, p.edges)).collect();
        assert_eq!(names, [vec!["e1", "e4"], vec!["e2", "e4"], vec!["e3"]]);
        assert_eq!(paths[1].sign(1), -1);
        assert_eq!(paths[1].sign(3), 1);
        assert!(!paths[1].directed);
        assert!(paths[0].directed && paths[2].directed);

        assert_eq!(enumerate_paths(&chain()).len(), 1);
    }

    #[test]
    fn triangle_spanning_trees() {
        let g = triangle();
        let trees = enumerate_spanning_trees(&g, false);
        let names: Vec<Vec<String>> = trees.iter().map(|t| ids(&g, t.edges)).collect();
        assert_eq!(
            names,
            [
                vec!["e1", "e3"],
                vec!["e1", "e4"],
                vec!["e2", "e3"],
                vec!["e2", "e4"],
                vec!["e3", "e4"]
            ]
        );
        let directed = enumerate_spanning_trees(&g, true);
        let names: Vec<Vec<String>> = directed.iter().map(|t| ids(&g, t.edges)).collect();
        assert_eq!(names, [vec!["e1", "e4"], vec!["e2", "e3"], vec!["e3", "e4"]]);

        let g = two_edge();
        let trees = enumerate_spanning_trees(&g, false);
        assert_eq!(trees.len(), 2);
        assert!(trees.iter().all(|t| t.directed));
    }

    #[test]
    fn spanning_trees_match_subset_oracle() {
        for g in [triangle(), two_diamond(), two_edge(), chain()] {
            let need = g.n_vertices() - 1;
            let mut oracle = Vec::new();
            for bits in 0u64..(1u64 << g.n_edges()) {
                let s = EdgeSet::from_bits(bits);
                if s.len() == need && genus(&g, s) == 0 {
                    oracle.push(s);
                }
            }
            oracle.sort_by(|a, b| a.lex_cmp(*b));
            let got: Vec<EdgeSet> = enumerate_spanning_trees(&g, false).iter().map(|t| t.edges).collect();
            assert_eq!(got, oracle);
        }
    }

    #[test]
    fn fundamental_cycles_on_small_graphs() {
        let g = two_edge();
        let t = SpanningTree::from_ids(&g, &["e1"]).unwrap();
        let c = fundamental_cycle(&g, &t, 1).unwrap();
        assert_eq!((c.sign(1), c.sign(0)), (1, -1));
        assert!(matches!(fundamental_cycle(&g, &t, 0), Err(Error::EdgeInTree(_))));

        let g = triangle();
        let t = SpanningTree::from_ids(&g, &["e3", "e4"]).unwrap();
        let c = fundamental_cycle(&g, &t, 0).unwrap();
        assert_eq!(ids(&g, c.edges), ["e1", "e3", "e4"]);
        assert_eq!((c.sign(0), c.sign(3), c.sign(2)), (1, 1, -1));
        let c = fundamental_cycle(&g, &t, 1).unwrap();
        assert_eq!(ids(&g, c.edges), ["e2", "e3", "e4"]);
        assert_eq!((c.sign(1), c.sign(2), c.sign(3)), (1, 1, -1));
    }

    #[test]
    fn tree_paths_on_triangle() {
        let g = triangle();
        let p = tree_path(&g, &SpanningTree::from_ids(&g, &["e3", "e4"]).unwrap());
        assert_eq!(ids(&g, p.edges), ["e3"]);
        let p = tree_path(&g, &SpanningTree::from_ids(&g, &["e1", "e4"]).unwrap());
        assert_eq!(ids(&g, p.edges), ["e1", "e4"]);
        assert!(p.directed);
        let p = tree_path(&g, &SpanningTree::from_ids(&g, &["e2", "e3"]).unwrap());
        assert_eq!(ids(&g, p.edges), ["e3"]);
    }

    #[test]
    fn genus_examples() {
        let g = triangle();
        assert_eq!(genus(&g, g.edge_set(&["e1", "e2"]).unwrap()), 1);
        assert_eq!(genus(&g, g.all_edges()), 2);
        for t in enumerate_spanning_trees(&g, false) {
            assert_eq!(genus(&g, t.edges), 0);
        }
    }

    #[test]
    fn genus_equals_cycle_rank_on_every_subset() {
        for g in [triangle(), two_edge(), two_diamond()] {
            for bits in 0u64..(1u64 << g.n_edges()) {
                let s = EdgeSet::from_bits(bits);
                assert_eq!(genus(&g, s), cycle_rank(&g, s), "subset {s:?}");
            }
        }
    }

    #[test]
    fn spanning_tree_constructor_rejects_non_trees() {
        let g = triangle();
        assert!(SpanningTree::from_ids(&g, &["e1", "e2"]).is_err());
        assert!(SpanningTree::from_ids(&g, &["e1"]).is_err());
        assert!(SpanningTree::from_ids(&g, &["e1", "e4"]).unwrap().directed);
        assert!(!SpanningTree::from_ids(&g, &["e1", "e3"]).unwrap().directed);
    }

    #[test]
    fn reversed_cycle_flips_signs() {
        let g = triangle();
        let c = &enumerate_cycles(&g)[1];
        let r = c.reversed();
        for e in c.edges.iter() {
            assert_eq!(r.sign(e), -c.sign(e));
        }
        assert_eq!(r.walk.len(), c.walk.len());
    }
}
