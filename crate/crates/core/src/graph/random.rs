//! Random graphs satisfying the standing assumptions.

use num::rational::BigRational;
use rand::Rng;

use super::DirectedGraph;

/// A random valid graph with `n_u` vertices besides δ and exactly
/// `n_edges ≥ 2·n_u − 1` edges, with weights `p/q`, `1 ≤ p ≤ 5`,
/// `1 ≤ q ≤ 3`.
///
/// An edge into each new vertex from an earlier one makes every vertex
/// reachable from `x0`; an edge from each vertex to a later vertex or δ
/// makes δ reachable. The remaining edges are uniform among non-loops.
pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, n_u: usize, n_edges: usize) -> DirectedGraph {
    assert!(n_u >= 1 && n_edges + 1 >= 2 * n_u, "too few edges for {n_u} vertices");
    let mut names: Vec<String> = (0..n_u).map(|i| if i == 0 { "x0".into() } else { format!("v{i}") }).collect();
    names.push("δ".into());
    let d = n_u;
    let mut pairs = Vec::with_capacity(n_edges);
    for i in 1..n_u {
        pairs.push((rng.random_range(0..i), i));
    }
    for i in 0..n_u {
        let head = rng.random_range(i + 1..=d);
        pairs.push((i, head));
    }
    while pairs.len() < n_edges {
        let tail = rng.random_range(0..n_u);
        let head = rng.random_range(0..=d);
        if head != tail {
            pairs.push((tail, head));
        }
    }
    let edges = pairs
        .into_iter()
        .enumerate()
        .map(|(k, (t, h))| {
            let alpha = BigRational::new(rng.random_range(1..=5).into(), rng.random_range(1..=3).into());
            (format!("e{}", k + 1), names[t].clone(), names[h].clone(), alpha)
        })
        .collect();
    DirectedGraph::new(&names, "δ", "x0", edges).expect("vertex names are consistent")
}

/// Random graphs with between 2 and `max_edges` edges.
pub fn random_graphs<R: Rng + ?Sized>(rng: &mut R, count: usize, max_edges: usize) -> Vec<DirectedGraph> {
    (0..count)
        .map(|_| {
            let m = rng.random_range(2..=max_edges);
            let n_u = rng.random_range(1..=m.div_ceil(2));
            random_graph(rng, n_u, m)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_graphs_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for g in random_graphs(&mut rng, 200, 8) {
            assert!(validate(&g).is_empty());
            assert!(g.n_edges() <= 8);
        }
    }
}
