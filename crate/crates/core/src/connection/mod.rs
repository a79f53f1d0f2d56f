//! The connection `∇ = d + Ω` on the trivial bundle with fibre `ℝ^{trees}`,
//!
//! ```text
//! Ω = Σ_σ dl_σ Ω_σ + Σ_C (dl_C / l_C) Ω_C,
//! ```
//!
//! summed over the simple paths σ from `x0` to δ and the simple cycles C.
//! The vector of integrals `I_T(λ)` over all spanning trees satisfies
//! `dI = −Ω I` away from the hyperplanes `ker l_C`.
//!
//! Matrices act on column vectors indexed by the tree basis. Row T of `Ω_C`
//! is nonzero only when `C ∖ T = {e0}`, and then
//! `(Ω_C I)_T = Σ_{e∈C} ε_C(e0) ε_C(e) α_e I_{T∪e0∖e}`.

mod checks;
mod transport;

use std::collections::HashMap;

use num::rational::BigRational;
use num::Zero;
use serde::{Deserialize, Serialize};

pub use checks::{check_commutation, check_flatness, flatness_shadow, CommutationInstance, CommutationReport, Relation};
pub use transport::{transport, LambdaPath, TransportOptions, TransportResult};

use crate::error::{Error, Result};
use crate::graph::{enumerate_cycles, enumerate_paths, enumerate_spanning_trees, DirectedGraph, SignedEdgeSet, SpanningTree};
use crate::scalar::{format_rational, Matrix, Scalar};

/// `λ ↦ Σ_e ε(e) λ_e` with coefficients in {−1, 0, 1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearForm {
    pub coeffs: Vec<i8>,
}

impl LinearForm {
    pub fn eval<T: Scalar>(&self, lambda: &[T]) -> T {
        self.coeffs.iter().zip(lambda).fold(T::zero(), |acc, (&c, l)| match c {
            1 => acc + l.clone(),
            -1 => acc - l.clone(),
            _ => acc,
        })
    }

    /// Such as `λ2 − λ1`.
    pub fn describe(&self, g: &DirectedGraph) -> String {
        let mut out = String::new();
        for (e, &c) in self.coeffs.iter().enumerate().filter(|(_, c)| **c != 0) {
            let sign = if c > 0 { "+" } else { "−" };
            if out.is_empty() {
                out.push_str(if c > 0 { "" } else { "−" });
            } else {
                out.push_str(&format!(" {sign} "));
            }
            out.push_str(&format!("λ[{}]", g.edge_id(e)));
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

pub fn linear_form(g: &DirectedGraph, set: &SignedEdgeSet) -> LinearForm {
    LinearForm { coeffs: (0..g.n_edges()).map(|e| set.sign(e)).collect() }
}

/// All spanning trees in canonical order, with a lookup by edge set.
#[derive(Clone, Debug)]
pub struct TreeBasis {
    trees: Vec<SpanningTree>,
    index: HashMap<u64, usize>,
}

impl TreeBasis {
    pub fn new(g: &DirectedGraph) -> Self {
        let trees = enumerate_spanning_trees(g, false);
        let index = trees.iter().enumerate().map(|(i, t)| (t.edges.bits(), i)).collect();
        TreeBasis { trees, index }
    }

    pub fn trees(&self) -> &[SpanningTree] {
        &self.trees
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn position(&self, tree: &SpanningTree) -> Option<usize> {
        self.index.get(&tree.edges.bits()).copied()
    }

    pub fn labels(&self, g: &DirectedGraph) -> Vec<Vec<String>> {
        self.trees.iter().map(|t| g.edge_ids(t.edges)).collect()
    }
}

/// `Ω_C` in the tree basis, with α taken from the graph.
pub fn omega_cycle(g: &DirectedGraph, basis: &TreeBasis, cycle: &SignedEdgeSet) -> Matrix<BigRational> {
    let n = basis.len();
    let mut m = Matrix::<BigRational>::zeros(n, n);
    for (row, tree) in basis.trees.iter().enumerate() {
        let outside = cycle.edges.difference(tree.edges);
        if outside.len() != 1 {
            continue;
        }
        let e0 = outside.iter().next().expect("one edge");
        let s0 = cycle.sign(e0);
        for &(e, s) in &cycle.steps {
            let exchanged = SpanningTree { edges: tree.edges.with(e0).without(e), directed: false };
            let col = basis.position(&exchanged).expect("exchange along a fundamental cycle gives a tree");
            let coeff = if s0 == s { g.edge(e).alpha.clone() } else { -g.edge(e).alpha.clone() };
            m[(row, col)] = m[(row, col)].clone() + coeff;
        }
    }
    m
}

/// `Ω_σ`: the diagonal projector onto the trees containing σ.
pub fn omega_path(basis: &TreeBasis, path: &SignedEdgeSet) -> Matrix<BigRational> {
    let n = basis.len();
    Matrix::from_fn(n, n, |i, j| {
        if i == j && path.edges.is_subset(basis.trees[i].edges) {
            BigRational::from_integer(1.into())
        } else {
            BigRational::zero()
        }
    })
}

/// One summand of Ω: a path or cycle, its linear form and its matrix.
#[derive(Clone, Debug)]
pub struct Term {
    pub set: SignedEdgeSet,
    pub form: LinearForm,
    pub omega: Matrix<BigRational>,
}

#[derive(Clone, Debug)]
pub struct ConnectionForm {
    pub graph: DirectedGraph,
    pub basis: TreeBasis,
    pub path_terms: Vec<Term>,
    pub cycle_terms: Vec<Term>,
}

/// Assembles Ω for the weights stored on `g`.
pub fn build_connection(g: &DirectedGraph) -> ConnectionForm {
    let basis = TreeBasis::new(g);
    let path_terms = enumerate_paths(g)
        .into_iter()
        .map(|p| Term { form: linear_form(g, &p), omega: omega_path(&basis, &p), set: p })
        .collect();
    let cycle_terms = enumerate_cycles(g)
        .into_iter()
        .map(|c| Term { form: linear_form(g, &c), omega: omega_cycle(g, &basis, &c), set: c })
        .collect();
    ConnectionForm { graph: g.clone(), basis, path_terms, cycle_terms }
}

impl ConnectionForm {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Fails with the first cycle whose form vanishes at λ.
    pub fn check_membership<T: Scalar>(&self, lambda: &[T]) -> Result<Vec<T>> {
        if lambda.len() != self.graph.n_edges() {
            return Err(Error::Dimension(format!("{} lambda values for {} edges", lambda.len(), self.graph.n_edges())));
        }
        self.cycle_terms
            .iter()
            .map(|t| {
                let l = t.form.eval(lambda);
                if l.is_zero() {
                    Err(Error::ExcludedLocus(t.set.describe(&self.graph)))
                } else {
                    Ok(l)
                }
            })
            .collect()
    }

    /// `M_i` with `Ω = Σ_i M_i dλ_i`.
    pub fn coefficients<T: Scalar>(&self, lambda: &[T]) -> Result<Vec<Matrix<T>>> {
        let forms = self.check_membership(lambda)?;
        let n = self.dimension();
        let mut out = vec![Matrix::<T>::zeros(n, n); self.graph.n_edges()];
        for term in &self.path_terms {
            let omega = term.omega.map(T::from_rational);
            for &(e, s) in &term.set.steps {
                out[e].add_scaled(&T::from_i64(s.into()), &omega);
            }
        }
        for (term, l) in self.cycle_terms.iter().zip(forms) {
            let omega = term.omega.map(T::from_rational);
            for &(e, s) in &term.set.steps {
                out[e].add_scaled(&(T::from_i64(s.into()) / l.clone()), &omega);
            }
        }
        Ok(out)
    }

    /// `Ω(λ)(v) = Σ_i v_i M_i(λ)` for a tangent vector `v`.
    pub fn contract<T: Scalar>(&self, lambda: &[T], v: &[T]) -> Result<Matrix<T>> {
        let forms = self.check_membership(lambda)?;
        let n = self.dimension();
        let mut out = Matrix::<T>::zeros(n, n);
        for term in &self.path_terms {
            out.add_scaled(&term.form.eval(v), &term.omega.map(T::from_rational));
        }
        for (term, l) in self.cycle_terms.iter().zip(forms) {
            out.add_scaled(&(term.form.eval(v) / l), &term.omega.map(T::from_rational));
        }
        Ok(out)
    }
}

/// Coefficient matrices of the connection at λ.
pub fn connection_coefficients<T: Scalar>(conn: &ConnectionForm, lambda: &[T]) -> Result<Vec<Matrix<T>>> {
    conn.coefficients(lambda)
}

/// A matrix as sparse `[row, col, "p/q"]` triplets with the basis listing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, String)>,
    pub basis: Vec<Vec<String>>,
}

pub fn export_matrix(g: &DirectedGraph, basis: &TreeBasis, m: &Matrix<BigRational>) -> SparseMatrix {
    SparseMatrix {
        rows: m.rows(),
        cols: m.cols(),
        entries: m.triplets().map(|(i, j, v)| (i, j, format_rational(v))).collect(),
        basis: basis.labels(g),
    }
}
