//! Coordinates on the affine flow space `{z : div z = δ_{x0}}`.
//!
//! Fixing the values on the complement of a spanning tree determines the
//! values on the tree edges uniquely; a [`TreeChart`] stores that affine map
//! `z = A u + b` exactly.

use num::rational::BigRational;
use num::{One, Zero};

use super::{divergence, flow_residual, DirectedGraph, EdgeSet, SpanningTree};
use crate::error::{Error, Result};
use crate::scalar::{rational_to_f64, Matrix, Scalar};

/// An edge vector, meant to satisfy `div z = δ_{x0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowPoint<T = f64> {
    pub z: Vec<T>,
}

impl<T: Scalar> FlowPoint<T> {
    /// `div z − δ_{x0}` on U.
    pub fn residual(&self, g: &DirectedGraph) -> Result<Vec<T>> {
        flow_residual(g, &self.z)
    }

    /// True when every coordinate is positive, i.e. `z ∈ Δ`.
    pub fn in_chamber(&self) -> bool
    where
        T: PartialOrd,
    {
        self.z.iter().all(|v| *v > T::zero())
    }
}

/// Affine chart `u ↦ z(u)` of the flow space attached to a spanning tree;
/// `u` holds the values on `T^c` in increasing edge order.
#[derive(Clone, Debug)]
pub struct TreeChart {
    tree: SpanningTree,
    free: Vec<usize>,
    linear: Matrix<BigRational>,
    offset: Vec<BigRational>,
    linear_f64: Vec<f64>,
    offset_f64: Vec<f64>,
}

impl TreeChart {
    pub fn new(g: &DirectedGraph, tree: &SpanningTree) -> Self {
        let free = tree.complement(g);
        let order = peeling_order(g, tree.edges);
        let offset = peel(g, &order, &free, &vec![BigRational::zero(); free.len()], BigRational::one());
        let mut linear = Matrix::zeros(g.n_edges(), free.len());
        for k in 0..free.len() {
            let mut unit = vec![BigRational::zero(); free.len()];
            unit[k] = BigRational::one();
            let col = peel(g, &order, &free, &unit, BigRational::zero());
            for (e, v) in col.into_iter().enumerate() {
                linear[(e, k)] = v;
            }
        }
        let linear_f64 = (0..g.n_edges())
            .flat_map(|e| linear.row(e).iter().map(rational_to_f64).collect::<Vec<_>>())
            .collect();
        let offset_f64 = offset.iter().map(rational_to_f64).collect();
        TreeChart { tree: *tree, free, linear, offset, linear_f64, offset_f64 }
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    /// `T^c`, the coordinate edges, in increasing order.
    pub fn free_edges(&self) -> &[usize] {
        &self.free
    }

    pub fn dimension(&self) -> usize {
        self.free.len()
    }

    /// `∂z_e/∂u_k`, an integer in {−1, 0, 1}.
    pub fn linear(&self) -> &Matrix<BigRational> {
        &self.linear
    }

    /// `z(0)`
    pub fn offset(&self) -> &[BigRational] {
        &self.offset
    }

    pub fn eval<T: Scalar>(&self, u: &[T]) -> Vec<T> {
        assert_eq!(u.len(), self.free.len());
        (0..self.offset.len())
            .map(|e| {
                self.linear
                    .row(e)
                    .iter()
                    .zip(u)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(T::from_rational(&self.offset[e]), |acc, (a, x)| {
                        acc + T::from_rational(a) * x.clone()
                    })
            })
            .collect()
    }

    /// Floating-point fast path of [`Self::eval`], writing into `z`.
    pub fn eval_f64_into(&self, u: &[f64], z: &mut [f64]) {
        let d = self.free.len();
        for (e, out) in z.iter_mut().enumerate() {
            let row = &self.linear_f64[e * d..(e + 1) * d];
            *out = self.offset_f64[e] + row.iter().zip(u).map(|(a, x)| a * x).sum::<f64>();
        }
    }

    /// Offset and coefficients of `z_e` as an affine function of `u`.
    pub fn affine_row_f64(&self, e: usize) -> (f64, &[f64]) {
        let d = self.free.len();
        (self.offset_f64[e], &self.linear_f64[e * d..(e + 1) * d])
    }
}

/// Tree vertices other than δ, leaves first, each with the tree edge toward
/// δ.
fn peeling_order(g: &DirectedGraph, tree: EdgeSet) -> Vec<(usize, usize)> {
    let mut parent_edge = vec![None; g.n_vertices()];
    let mut seen = vec![false; g.n_vertices()];
    let mut queue = std::collections::VecDeque::from([g.cemetery()]);
    seen[g.cemetery()] = true;
    let mut order = Vec::new();
    while let Some(v) = queue.pop_front() {
        for e in tree.iter() {
            let edge = g.edge(e);
            let w = if edge.tail == v {
                edge.head
            } else if edge.head == v {
                edge.tail
            } else {
                continue;
            };
            if !seen[w] {
                seen[w] = true;
                parent_edge[w] = Some(e);
                order.push((w, e));
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Solves the tree values given the values on `free` and a divergence
/// target of `source` at `x0` (zero elsewhere).
fn peel<T: Scalar>(
    g: &DirectedGraph,
    order: &[(usize, usize)],
    free: &[usize],
    u: &[T],
    source: T,
) -> Vec<T> {
    let mut z = vec![T::zero(); g.n_edges()];
    for (&e, v) in free.iter().zip(u) {
        z[e] = v.clone();
    }
    for &(x, up) in order {
        let mut residual = if x == g.base() { source.clone() } else { T::zero() };
        for (e, edge) in g.edges().iter().enumerate() {
            if e == up {
                continue;
            }
            if edge.tail == x {
                residual = residual - z[e].clone();
            }
            if edge.head == x {
                residual = residual + z[e].clone();
            }
        }
        z[up] = if g.edge(up).tail == x { residual } else { -residual };
    }
    z
}

/// The unique flow with prescribed values `u` on `T^c` (increasing edge
/// order).
pub fn solve_tree_coordinates<T: Scalar>(
    g: &DirectedGraph,
    tree: &SpanningTree,
    u: &[T],
) -> Result<FlowPoint<T>> {
    let free = tree.complement(g);
    if u.len() != free.len() {
        return Err(Error::Dimension(format!(
            "{} coordinates for |T^c| = {}",
            u.len(),
            free.len()
        )));
    }
    let order = peeling_order(g, tree.edges);
    assert_eq!(order.len() + 1, g.n_vertices(), "tree must span the graph");
    Ok(FlowPoint { z: peel(g, &order, &free, u, T::one()) })
}

/// Sign (±1) of `dz_{T^c}` relative to the reference orientation given by
/// the coordinates of the first spanning tree in canonical order.
pub fn orientation_sign(g: &DirectedGraph, tree: &SpanningTree) -> i8 {
    let reference = super::enumerate_spanning_trees(g, false)
        .into_iter()
        .next()
        .expect("a valid graph has a spanning tree");
    let chart = TreeChart::new(g, &reference);
    let free = tree.complement(g);
    let jac = Matrix::from_fn(free.len(), free.len(), |i, k| chart.linear()[(free[i], k)].clone());
    let det = jac.det();
    if det > BigRational::zero() {
        1
    } else {
        assert!(det < BigRational::zero(), "coordinate change must be invertible");
        -1
    }
}

/// Whether the hyperplanes `{z_e = 0}`, `e ∈ subset`, form a basis of the
/// arrangement: their normals restricted to the flow space are independent
/// and there are `|E| − |U|` of them. Computed from the null space of the
/// divergence, without reference to spanning trees.
pub fn is_arrangement_basis(g: &DirectedGraph, subset: EdgeSet) -> bool {
    let dim = g.flow_dimension();
    if subset.len() != dim {
        return false;
    }
    let div = Matrix::from_fn(g.u_vertices().len(), g.n_edges(), |x, e| {
        let mut unit = vec![BigRational::zero(); g.n_edges()];
        unit[e] = BigRational::one();
        divergence(g, &unit).expect("length matches")[x].clone()
    });
    let kernel = div.null_space();
    if kernel.cols() != dim {
        return false;
    }
    let rows: Vec<usize> = subset.to_vec();
    let restricted = Matrix::from_fn(rows.len(), dim, |i, k| kernel[(rows[i], k)].clone());
    restricted.rank() == dim
}
