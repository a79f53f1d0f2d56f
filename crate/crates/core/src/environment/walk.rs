//! Trajectories of the killed chain, loop erasure, and Wilson's algorithm
//! rooted at the cemetery.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{substream, tree_probability, Environment};
use crate::error::{Error, Result};
use crate::graph::{enumerate_spanning_trees, tree_path, DirectedGraph, EdgeSet, SpanningTree};

/// Walks abort after this many steps.
pub const STEP_CAP: u64 = 10_000_000;

/// Per-vertex cumulative exit distributions for fast edge sampling.
#[derive(Clone, Debug)]
pub struct TransitionTable {
    out: Vec<Vec<(usize, f64)>>,
    heads: Vec<usize>,
    cemetery: usize,
}

impl TransitionTable {
    pub fn new(g: &DirectedGraph, env: &Environment) -> Self {
        let mut out = vec![Vec::new(); g.n_vertices()];
        for &x in g.u_vertices() {
            let mut acc = 0.0;
            for e in g.out_edges(x) {
                acc += env.p[e];
                out[x].push((e, acc));
            }
        }
        TransitionTable { out, heads: g.edges().iter().map(|e| e.head).collect(), cemetery: g.cemetery() }
    }

    /// Draws an out-edge of `x`.
    pub fn step<R: Rng + ?Sized>(&self, x: usize, rng: &mut R) -> usize {
        let choices = &self.out[x];
        let total = choices.last().map_or(0.0, |&(_, c)| c);
        let r = rng.random::<f64>() * total;
        choices.iter().find(|&&(_, c)| r < c).unwrap_or(choices.last().expect("vertex of U has out-edges")).0
    }

    pub fn head(&self, e: usize) -> usize {
        self.heads[e]
    }
}

/// Edges crossed by the chain from `x0` until it reaches δ.
pub fn simulate_chain<R: Rng + ?Sized>(
    g: &DirectedGraph,
    table: &TransitionTable,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let mut x = g.base();
    let mut path = Vec::new();
    while x != table.cemetery {
        if path.len() as u64 >= STEP_CAP {
            return Err(Error::IterationCap(STEP_CAP));
        }
        let e = table.step(x, rng);
        path.push(e);
        x = table.head(e);
    }
    Ok(path)
}

/// Chronological loop erasure of an edge trajectory starting at `x0`.
pub fn loop_erase(g: &DirectedGraph, trajectory: &[usize]) -> Vec<usize> {
    let mut erased: Vec<usize> = Vec::new();
    // position in `erased` after which each vertex was reached
    let mut index_of = vec![None; g.n_vertices()];
    index_of[g.base()] = Some(0);
    for &e in trajectory {
        let head = g.edge(e).head;
        match index_of[head] {
            Some(k) => {
                for f in erased.drain(k..) {
                    index_of[g.edge(f).head] = None;
                }
                index_of[head] = Some(k);
            }
            None => {
                erased.push(e);
                index_of[head] = Some(erased.len());
            }
        }
    }
    erased
}

/// Samples a directed spanning tree with probability
/// `∏_{e∈T} p_e / det(I − P_U)` by loop-erased walks rooted at δ, started
/// from the vertices of U in order.
pub fn wilson_sample_tree<R: Rng + ?Sized>(
    g: &DirectedGraph,
    table: &TransitionTable,
    rng: &mut R,
) -> Result<SpanningTree> {
    let n = g.n_vertices();
    let mut in_tree = vec![false; n];
    in_tree[g.cemetery()] = true;
    let mut next: Vec<Option<usize>> = vec![None; n];
    let mut steps = 0u64;
    for &start in g.u_vertices() {
        let mut x = start;
        while !in_tree[x] {
            let e = table.step(x, rng);
            next[x] = Some(e);
            x = table.head(e);
            steps += 1;
            if steps >= STEP_CAP {
                return Err(Error::IterationCap(STEP_CAP));
            }
        }
        let mut x = start;
        while !in_tree[x] {
            in_tree[x] = true;
            x = table.head(next[x].expect("walk recorded an exit"));
        }
    }
    let edges: EdgeSet = g.u_vertices().iter().map(|&x| next[x].expect("every vertex joined")).collect();
    Ok(SpanningTree { edges, directed: true })
}

/// Wilson frequencies against the exact tree law, and the law of the tree
/// path against loop-erased chains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilsonTest {
    pub trees: Vec<Vec<String>>,
    pub probabilities: Vec<f64>,
    pub counts: Vec<u64>,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub critical: f64,
    /// Total variation between the two empirical path laws.
    pub path_tv: f64,
    pub pass: bool,
}

/// Draws `n` Wilson trees and `n` loop-erased chains. The test passes when
/// the chi-square statistic is below its upper `significance` point and the
/// path laws are within `tv_bound`. Tree `i` uses stream `(seed, i)` and
/// chain `i` stream `(seed, n + i)`.
pub fn wilson_test(
    g: &DirectedGraph,
    env: &Environment,
    n: u64,
    seed: u64,
    significance: f64,
    tv_bound: f64,
) -> Result<WilsonTest> {
    if n == 0 {
        return Err(Error::NoSamples);
    }
    let trees = enumerate_spanning_trees(g, true);
    let probabilities = trees.iter().map(|t| tree_probability(g, env, t)).collect::<Result<Vec<f64>>>()?;
    let table = TransitionTable::new(g, env);
    let sampled = (0..n)
        .into_par_iter()
        .map(|i| wilson_sample_tree(g, &table, &mut substream(seed, i)))
        .collect::<Result<Vec<_>>>()?;
    let erased = (0..n)
        .into_par_iter()
        .map(|i| {
            let path = simulate_chain(g, &table, &mut substream(seed, n + i))?;
            Ok(loop_erase(g, &path).into_iter().collect::<EdgeSet>())
        })
        .collect::<Result<Vec<_>>>()?;

    let mut counts = vec![0u64; trees.len()];
    let mut paths: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    for t in &sampled {
        let k = trees.iter().position(|s| s == t).expect("Wilson returns a directed tree");
        counts[k] += 1;
        paths.entry(tree_path(g, t).edges.bits()).or_default().0 += 1.0;
    }
    for p in &erased {
        paths.entry(p.bits()).or_default().1 += 1.0;
    }
    let nf = n as f64;
    let path_tv = 0.5 * paths.values().map(|(a, b)| (a - b).abs() / nf).sum::<f64>();
    let support: Vec<usize> = (0..trees.len()).filter(|&k| probabilities[k] > 0.0).collect();
    let chi_square = support
        .iter()
        .map(|&k| (counts[k] as f64 - nf * probabilities[k]).powi(2) / (nf * probabilities[k]))
        .sum();
    let degrees_of_freedom = support.len().saturating_sub(1);
    let critical = if degrees_of_freedom == 0 {
        0.0
    } else {
        ChiSquared::new(degrees_of_freedom as f64).expect("positive dof").inverse_cdf(1.0 - significance)
    };
    let pass = (degrees_of_freedom == 0 || chi_square < critical) && path_tv <= tv_bound;
    Ok(WilsonTest {
        trees: trees.iter().map(|t| g.edge_ids(t.edges)).collect(),
        probabilities,
        counts,
        chi_square,
        degrees_of_freedom,
        critical,
        path_tv,
        pass,
    })
}
