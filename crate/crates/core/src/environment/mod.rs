//! Random Dirichlet environments and the killed Markov chain they define.
//!
//! At every `x ∈ U` the exit probabilities `(p_e)_{tail(e)=x}` are drawn from
//! a Dirichlet law with parameters `(α_e)`, independently across vertices.
//! Given an environment, the chain starts at `x0` and is stopped at δ; its
//! Green function is `(I − P_U)^{-1}` and the expected number of crossings
//! of `e` is `z_e = G(x0, tail(e)) p_e`.

mod mc;
mod walk;

use num::rational::BigRational;
use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

pub use mc::{
    mc_estimate_rhs, mc_laplace, mc_tree_decomposition, substream, McEstimate, TreeDecomposition,
};
pub(crate) use mc::check_lambda;
pub use walk::{loop_erase, simulate_chain, wilson_sample_tree, wilson_test, TransitionTable, WilsonTest, STEP_CAP};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, FlowPoint, SpanningTree};
use crate::scalar::{rational_to_f64, Matrix, Scalar};

/// Positive Dirichlet parameters α, with `β_x = Σ_{tail(e)=x} α_e`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletWeights {
    alpha: Vec<BigRational>,
    alpha_f64: Vec<f64>,
    beta: Vec<f64>,
}

impl DirichletWeights {
    pub fn new(g: &DirectedGraph, alpha: Vec<BigRational>) -> Result<Self> {
        if alpha.len() != g.n_edges() {
            return Err(Error::Dimension(format!("{} weights for {} edges", alpha.len(), g.n_edges())));
        }
        for (e, a) in alpha.iter().enumerate() {
            if !a.is_positive() {
                return Err(Error::NonPositiveWeight {
                    edge: g.edge_id(e).to_string(),
                    value: rational_to_f64(a),
                });
            }
        }
        let alpha_f64: Vec<f64> = alpha.iter().map(rational_to_f64).collect();
        let beta = g
            .u_vertices()
            .iter()
            .map(|&x| g.out_edges(x).map(|e| alpha_f64[e]).sum())
            .collect();
        Ok(DirichletWeights { alpha, alpha_f64, beta })
    }

    /// The weights stored on the graph's edges.
    pub fn from_graph(g: &DirectedGraph) -> Result<Self> {
        Self::new(g, g.alpha())
    }

    pub fn alpha(&self) -> &[BigRational] {
        &self.alpha
    }

    pub fn alpha_f64(&self) -> &[f64] {
        &self.alpha_f64
    }

    /// β in the order of U.
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }
}

/// Exit probabilities `p_e`, summing to one at every `x ∈ U`.
#[derive(Clone, Debug, PartialEq)]
pub struct Environment<T = f64> {
    pub p: Vec<T>,
}

impl<T: Scalar + PartialOrd> Environment<T> {
    /// Checks `p_e ∈ (0, 1]` and the per-vertex sums, up to `tol`
    /// (use zero for exact scalars).
    pub fn check(&self, g: &DirectedGraph, tol: f64) -> Result<()> {
        if self.p.len() != g.n_edges() {
            return Err(Error::Dimension(format!("{} probabilities for {} edges", self.p.len(), g.n_edges())));
        }
        for (e, p) in self.p.iter().enumerate() {
            if *p <= T::zero() || *p > T::one() {
                return Err(Error::InvalidEnvironment(format!("p[{}] outside (0, 1]", g.edge_id(e))));
            }
        }
        for &x in g.u_vertices() {
            let total = g.out_edges(x).fold(T::zero(), |acc, e| acc + self.p[e].clone());
            if (total - T::one()).magnitude() > tol {
                return Err(Error::InvalidEnvironment(format!(
                    "exit probabilities at {} do not sum to one",
                    g.vertex_name(x)
                )));
            }
        }
        Ok(())
    }
}

impl Environment<f64> {
    /// Every out-edge of `x` gets probability `1/outdeg(x)`.
    pub fn uniform(g: &DirectedGraph) -> Self {
        Environment::<BigRational>::uniform_exact(g).to_f64()
    }
}

impl Environment<BigRational> {
    pub fn uniform_exact(g: &DirectedGraph) -> Self {
        let mut p = vec![BigRational::zero(); g.n_edges()];
        for &x in g.u_vertices() {
            let out: Vec<usize> = g.out_edges(x).collect();
            for &e in &out {
                p[e] = BigRational::new(1.into(), (out.len() as i64).into());
            }
        }
        Environment { p }
    }

    pub fn to_f64(&self) -> Environment<f64> {
        Environment { p: self.p.iter().map(rational_to_f64).collect() }
    }
}

/// Draws one environment: normalized independent `Gamma(α_e, 1)` variates at
/// each vertex.
pub fn sample_environment_with<R: Rng + ?Sized>(
    g: &DirectedGraph,
    w: &DirichletWeights,
    rng: &mut R,
) -> Environment {
    let mut p = vec![0.0; g.n_edges()];
    for &x in g.u_vertices() {
        let out: Vec<usize> = g.out_edges(x).collect();
        loop {
            let mut total = 0.0;
            for &e in &out {
                let v = Gamma::new(w.alpha_f64[e], 1.0).expect("positive shape").sample(rng);
                p[e] = v;
                total += v;
            }
            if total > 0.0 {
                for &e in &out {
                    p[e] /= total;
                }
                break;
            }
        }
    }
    Environment { p }
}

/// An exact environment with `p_e = k_e / Σ k` for uniform integers
/// `k_e ∈ [1, 9]` at each vertex.
pub fn random_rational_environment<R: Rng + ?Sized>(g: &DirectedGraph, rng: &mut R) -> Environment<BigRational> {
    let mut p = vec![BigRational::zero(); g.n_edges()];
    for &x in g.u_vertices() {
        let out: Vec<usize> = g.out_edges(x).collect();
        let k: Vec<i64> = out.iter().map(|_| rng.random_range(1..=9)).collect();
        let total: i64 = k.iter().sum();
        for (&e, &k) in out.iter().zip(&k) {
            p[e] = BigRational::new(k.into(), total.into());
        }
    }
    Environment { p }
}

/// Deterministic in `seed`.
pub fn sample_environment(g: &DirectedGraph, w: &DirichletWeights, seed: u64) -> Environment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_environment_with(g, w, &mut rng)
}

/// `P_U(x, y) = Σ_{e=(x,y)} p_e`, indexed by positions in U.
pub fn transition_matrix<T: Scalar>(g: &DirectedGraph, env: &Environment<T>) -> Matrix<T> {
    let n = g.u_vertices().len();
    let mut m = Matrix::<T>::zeros(n, n);
    for (e, edge) in g.edges().iter().enumerate() {
        if let (Some(i), Some(j)) = (g.u_position(edge.tail), g.u_position(edge.head)) {
            m[(i, j)] = m[(i, j)].clone() + env.p[e].clone();
        }
    }
    m
}

fn killed_generator<T: Scalar>(g: &DirectedGraph, env: &Environment<T>) -> Matrix<T> {
    let n = g.u_vertices().len();
    Matrix::identity(n).sub(&transition_matrix(g, env))
}

/// `(I − P_U)^{-1}`
pub fn green_function<T: Scalar>(g: &DirectedGraph, env: &Environment<T>) -> Result<Matrix<T>> {
    killed_generator(g, env).inverse().ok_or(Error::SingularGreenFunction)
}

/// `z_e = G(x0, tail(e)) p_e`, the expected number of crossings of each
/// edge before absorption.
pub fn edge_occupation<T: Scalar>(g: &DirectedGraph, env: &Environment<T>) -> Result<FlowPoint<T>> {
    let n = g.u_vertices().len();
    // row x0 of (I − P)^{-1} solves (I − P)^T r = e_{x0}
    let mut rhs = Matrix::zeros(n, 1);
    let base = g.u_position(g.base()).expect("base point in U");
    rhs[(base, 0)] = T::one();
    let row = killed_generator(g, env).transpose().solve(&rhs).ok_or(Error::SingularGreenFunction)?;
    let z = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let k = g.u_position(edge.tail).expect("edges leave U");
            row[(k, 0)].clone() * env.p[e].clone()
        })
        .collect();
    Ok(FlowPoint { z })
}

/// `det(I − P_U)`
pub fn survival_determinant<T: Scalar>(g: &DirectedGraph, env: &Environment<T>) -> T {
    killed_generator(g, env).det()
}

/// `∏_{e∈T} p_e`
pub fn tree_weight<T: Scalar>(env: &Environment<T>, tree: &SpanningTree) -> T {
    tree.edges.iter().fold(T::one(), |acc, e| acc * env.p[e].clone())
}

/// `∏_{e∈T} p_e / det(I − P_U)`, the probability of a directed tree.
pub fn tree_probability<T: Scalar>(
    g: &DirectedGraph,
    env: &Environment<T>,
    tree: &SpanningTree,
) -> Result<T> {
    if !tree.directed {
        return Err(Error::TreeNotDirected);
    }
    let det = survival_determinant(g, env);
    if det.is_zero() {
        return Err(Error::SingularGreenFunction);
    }
    Ok(tree_weight(env, tree) / det)
}

/// Mean of `p_e` under the Dirichlet law: `α_e / β_{tail(e)}`.
pub fn dirichlet_mean(g: &DirectedGraph, w: &DirichletWeights, e: usize) -> BigRational {
    let x = g.edge(e).tail;
    let beta = g.out_edges(x).fold(BigRational::zero(), |acc, f| acc + &w.alpha[f]);
    &w.alpha[e] / beta
}
