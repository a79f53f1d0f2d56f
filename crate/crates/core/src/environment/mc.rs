//! Monte Carlo over Dirichlet environments.
//!
//! Sample `i` draws from its own ChaCha8 stream `(seed, i)`, so estimates
//! are bit-identical whether samples run serially or in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{edge_occupation, sample_environment_with, survival_determinant, DirichletWeights};
use crate::error::{Error, Result};
use crate::graph::{enumerate_spanning_trees, DirectedGraph, SpanningTree};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_values(values: &[f64], seed: u64) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::NoSamples);
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Ok(McEstimate { value: mean, std_error, n_samples: n as u64, seed })
    }
}

/// The generator for sample `index` of a run seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub(crate) fn check_lambda(g: &DirectedGraph, lambda: &[f64]) -> Result<()> {
    if lambda.len() != g.n_edges() {
        return Err(Error::Dimension(format!("{} lambda values for {} edges", lambda.len(), g.n_edges())));
    }
    for (e, l) in lambda.iter().enumerate() {
        if l.is_nan() || *l < 0.0 {
            return Err(Error::NegativeLambda(g.edge_id(e).to_string()));
        }
    }
    Ok(())
}

/// One sampled environment reduced to what the estimators need.
struct Draw {
    discount: f64,
    det: f64,
    p: Vec<f64>,
}

fn draws<T, F>(g: &DirectedGraph, w: &DirichletWeights, lambda: &[f64], n: u64, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Draw) -> T + Sync,
{
    check_lambda(g, lambda)?;
    if n == 0 {
        return Err(Error::NoSamples);
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i);
            let env = sample_environment_with(g, w, &mut rng);
            let z = edge_occupation(g, &env)?;
            let discount = (-z.z.iter().zip(lambda).map(|(z, l)| z * l).sum::<f64>()).exp();
            let det = survival_determinant(g, &env);
            Ok(f(&Draw { discount, det, p: env.p }))
        })
        .collect()
}

/// Estimates `E[e^{−⟨λ,z⟩} ∏_{e∈T} p_e / det(I − P_U)]` for a directed tree.
pub fn mc_estimate_rhs(
    g: &DirectedGraph,
    w: &DirichletWeights,
    lambda: &[f64],
    tree: &SpanningTree,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    if !tree.directed {
        return Err(Error::TreeNotDirected);
    }
    let values = draws(g, w, lambda, n, seed, |d| {
        d.discount * tree.edges.iter().map(|e| d.p[e]).product::<f64>() / d.det
    })?;
    McEstimate::from_values(&values, seed)
}

/// Estimates the Laplace transform `E[e^{−⟨λ,z⟩}]` of the edge occupation.
pub fn mc_laplace(
    g: &DirectedGraph,
    w: &DirichletWeights,
    lambda: &[f64],
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    let values = draws(g, w, lambda, n, seed, |d| d.discount)?;
    McEstimate::from_values(&values, seed)
}

/// Per-directed-tree estimates and the Laplace estimate from the same
/// samples.
#[derive(Clone, Debug)]
pub struct TreeDecomposition {
    pub trees: Vec<SpanningTree>,
    pub per_tree: Vec<McEstimate>,
    pub laplace: McEstimate,
}

impl TreeDecomposition {
    pub fn sum_of_trees(&self) -> f64 {
        self.per_tree.iter().map(|e| e.value).sum()
    }
}

pub fn mc_tree_decomposition(
    g: &DirectedGraph,
    w: &DirichletWeights,
    lambda: &[f64],
    n: u64,
    seed: u64,
) -> Result<TreeDecomposition> {
    let trees = enumerate_spanning_trees(g, true);
    let rows = draws(g, w, lambda, n, seed, |d| {
        let mut row = Vec::with_capacity(trees.len() + 1);
        row.push(d.discount);
        for t in &trees {
            let weight: f64 = t.edges.iter().map(|e| d.p[e]).product();
            row.push(d.discount * weight / d.det);
        }
        row
    })?;
    let column = |k: usize| -> Result<McEstimate> {
        let values: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        McEstimate::from_values(&values, seed)
    };
    let laplace = column(0)?;
    let per_tree = (1..=trees.len()).map(column).collect::<Result<Vec<_>>>()?;
    Ok(TreeDecomposition { trees, per_tree, laplace })
}
