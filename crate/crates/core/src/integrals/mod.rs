//! The integrals `I_T(λ) = ∫_Δ e^{−⟨λ,z⟩} ∏_e z_e^{α_e} ω_T` over the open
//! chamber Δ of the flow space, their evaluation by quadrature and Monte
//! Carlo, and the identities relating them to the random walk.
//!
//! In the chart of a spanning tree T the free coordinates are `u = z|_{T^c}`
//! and `ω_T = ∏_{e∈T^c} du_e / u_e`. Every chart change is unimodular and
//! `ω_T` is positively oriented, so `I_T` is the ordinary Lebesgue integral
//! in those coordinates.

pub mod quadrature;

use num::rational::BigRational;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::environment::{check_lambda, mc_estimate_rhs, substream, DirichletWeights, McEstimate};
use crate::error::{Error, Result};
use crate::graph::{
    fundamental_cycle, hat_graph, tree_path, DirectedGraph, EdgeSet, FlowPoint, SignedEdgeSet, SpanningTree,
    TreeChart,
};
use crate::scalar::{rational_to_f64, Scalar};
use quadrature::{Constraint, MAX_DIM};

/// Default absolute quadrature tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Everything needed to evaluate one integral: graph, exponents α, λ and
/// the tree whose chart and form are used.
#[derive(Clone, Debug)]
pub struct IntegrandSpec {
    graph: DirectedGraph,
    alpha: Vec<f64>,
    lambda: Vec<f64>,
    chart: TreeChart,
    vertex_edges: EdgeSet,
    weight_edge: Option<usize>,
}

impl IntegrandSpec {
    /// α is taken from the graph's edge weights.
    pub fn new(g: &DirectedGraph, lambda: &[f64], tree: &SpanningTree) -> Result<Self> {
        let alpha = g.alpha().iter().map(rational_to_f64).collect();
        Self::with_alpha(g, alpha, lambda, tree)
    }

    pub fn with_alpha(g: &DirectedGraph, alpha: Vec<f64>, lambda: &[f64], tree: &SpanningTree) -> Result<Self> {
        if alpha.len() != g.n_edges() {
            return Err(Error::Dimension(format!("{} exponents for {} edges", alpha.len(), g.n_edges())));
        }
        check_lambda(g, lambda)?;
        let tree = SpanningTree::new(g, tree.edges)?;
        Ok(IntegrandSpec {
            graph: g.clone(),
            alpha,
            lambda: lambda.to_vec(),
            chart: TreeChart::new(g, &tree),
            vertex_edges: EdgeSet::empty(),
            weight_edge: None,
        })
    }

    /// The hat-graph integral for a directed tree `T` of `g`: Ĝ with
    /// `T̂ = T ∪ {ê_x}`, λ extended by zero on the `ê_x`, and α from `w`.
    pub fn hat(g: &DirectedGraph, w: &DirichletWeights, lambda: &[f64], tree: &SpanningTree) -> Result<Self> {
        check_lambda(g, lambda)?;
        let tree = SpanningTree::new(g, tree.edges)?;
        if !tree.directed {
            return Err(Error::TreeNotDirected);
        }
        let hat = hat_graph(&g.with_alpha(w.alpha())?);
        let h = hat.graph();
        let mut hat_lambda = vec![0.0; h.n_edges()];
        for (e, l) in lambda.iter().enumerate() {
            hat_lambda[hat.lift_edge(e)] = *l;
        }
        let mut spec = Self::new(h, &hat_lambda, &hat.lift_tree(&tree))?;
        spec.vertex_edges = hat.vertex_edge_set();
        Ok(spec)
    }

    /// The same integral with ω_T replaced by `ω_{tree}`.
    pub fn with_tree(&self, tree: &SpanningTree) -> Result<Self> {
        let tree = SpanningTree::new(&self.graph, tree.edges)?;
        Ok(IntegrandSpec { chart: TreeChart::new(&self.graph, &tree), ..self.clone() })
    }

    /// The same integral with an extra factor `z_e` in the integrand.
    pub fn times_coordinate(&self, e: usize) -> Self {
        IntegrandSpec { weight_edge: Some(e), ..self.clone() }
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn tree(&self) -> &SpanningTree {
        self.chart.tree()
    }

    pub fn chart(&self) -> &TreeChart {
        &self.chart
    }

    /// The `ê_x` edges when the spec lives on a hat graph.
    pub fn vertex_edges(&self) -> EdgeSet {
        self.vertex_edges
    }

    pub fn dimension(&self) -> usize {
        self.chart.dimension()
    }

    /// The integrand in the coordinates `u = z|_{T^c}`; zero outside Δ.
    pub fn eval(&self, u: &[f64]) -> f64 {
        if u.iter().any(|&x| x.is_nan() || x <= 0.0) {
            return 0.0;
        }
        let mut log = -u.iter().map(|x| x.ln()).sum::<f64>();
        for e in 0..self.graph.n_edges() {
            let (b, row) = self.chart.affine_row_f64(e);
            let z = b + row.iter().zip(u).map(|(a, x)| a * x).sum::<f64>();
            if z.is_nan() || z <= 0.0 {
                return 0.0;
            }
            log += self.alpha[e] * z.ln() - self.lambda[e] * z;
            if self.weight_edge == Some(e) {
                log += z.ln();
            }
        }
        log.exp()
    }

    /// Δ in `u`-coordinates: `u > 0` and `z_e(u) > 0` on tree edges.
    fn constraints(&self) -> Vec<Constraint> {
        let d = self.dimension();
        let free = self.chart.free_edges();
        let mut out = Vec::new();
        for e in 0..self.graph.n_edges() {
            if free.contains(&e) {
                continue;
            }
            let (b, row) = self.chart.affine_row_f64(e);
            let mut a = [0.0; MAX_DIM];
            a[..d].copy_from_slice(row);
            out.push(Constraint { a, b });
        }
        for k in 0..d {
            let mut a = [0.0; MAX_DIM];
            a[k] = 1.0;
            out.push(Constraint { a, b: 0.0 });
        }
        out
    }
}

/// The integrand of `spec` at `u`.
pub fn integrand(spec: &IntegrandSpec, u: &[f64]) -> f64 {
    spec.eval(u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

/// A numerical integral. `error` is the quadrature error estimate or one
/// Monte Carlo standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub error: f64,
    pub method: Method,
    pub n_evals: u64,
}

/// Nested adaptive Gauss–Kronrod quadrature over the exact slices of Δ.
pub fn integrate_quadrature(spec: &IntegrandSpec, tol: f64) -> Result<IntegralEstimate> {
    let d = spec.dimension();
    if d > MAX_DIM {
        return Err(Error::DimensionTooLarge { dim: d, max: MAX_DIM });
    }
    if d == 0 {
        return Ok(IntegralEstimate { value: spec.eval(&[]), error: 0.0, method: Method::Quadrature, n_evals: 1 });
    }
    let Some(levels) = quadrature::project(&spec.constraints(), d) else {
        return Ok(IntegralEstimate { value: 0.0, error: 0.0, method: Method::Quadrature, n_evals: 0 });
    };
    let q = quadrature::nested(&|u: &[f64]| spec.eval(u), &levels, tol)?;
    if q.error > tol && q.error > 1e-12 * q.value.abs() {
        return Err(Error::NonConvergence { value: q.value, error: q.error, tol });
    }
    Ok(IntegralEstimate { value: q.value, error: q.error, method: Method::Quadrature, n_evals: q.evals })
}

/// Importance sampling with independent `Gamma(α_e, rate λ_e)` proposals on
/// the free coordinates. Sample `i` uses stream `(seed, i)`.
pub fn integrate_mc(spec: &IntegrandSpec, n: u64, seed: u64) -> Result<IntegralEstimate> {
    if n == 0 {
        return Err(Error::NoSamples);
    }
    let g = &spec.graph;
    let proposals = spec
        .chart
        .free_edges()
        .iter()
        .map(|&e| {
            let (shape, rate) = (spec.alpha[e], spec.lambda[e]);
            if !(shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite()) {
                return Err(Error::InvalidProposal(format!(
                    "edge {}: shape {shape}, rate {rate}",
                    g.edge_id(e)
                )));
            }
            let dist = Gamma::new(shape, 1.0 / rate).map_err(|err| Error::InvalidProposal(err.to_string()))?;
            let log_norm = shape * rate.ln() - ln_gamma(shape);
            Ok((dist, shape, rate, log_norm))
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i);
            let u: Vec<f64> = proposals.iter().map(|(dist, ..)| dist.sample(&mut rng)).collect();
            let f = spec.eval(&u);
            if f == 0.0 {
                return 0.0;
            }
            let log_density: f64 = proposals
                .iter()
                .zip(&u)
                .map(|((_, shape, rate, log_norm), x)| log_norm + (shape - 1.0) * x.ln() - rate * x)
                .sum();
            f * (-log_density).exp()
        })
        .collect();
    if values.iter().all(|&v| v == 0.0) {
        return Err(Error::AllWeightsZero);
    }
    let est = McEstimate::from_values(&values, seed)?;
    Ok(IntegralEstimate { value: est.value, error: est.std_error, method: Method::MonteCarlo, n_evals: n })
}

/// `log C_α = Σ_{x∈U} log Γ(β_x) − Σ_e log Γ(α_e)`.
pub fn log_constant_c_alpha(w: &DirichletWeights) -> f64 {
    w.beta().iter().map(|&b| ln_gamma(b)).sum::<f64>() - w.alpha_f64().iter().map(|&a| ln_gamma(a)).sum::<f64>()
}

/// `C_α = ∏_{x∈U} Γ(β_x) / ∏_e Γ(α_e)`.
pub fn constant_c_alpha(w: &DirichletWeights) -> Result<f64> {
    let log = log_constant_c_alpha(w);
    let value = log.exp();
    if !log.is_finite() || value == 0.0 || value.is_infinite() {
        return Err(Error::Overflow(log));
    }
    Ok(value)
}

/// A value with its absolute error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Side {
    pub value: f64,
    pub error: f64,
}

/// Two estimates of the same quantity and whether they agree within
/// `3·√(e_l² + e_r²) + slack`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub lhs: Side,
    pub rhs: Side,
    pub diff: f64,
    pub pass: bool,
}

impl Comparison {
    pub fn new(lhs: Side, rhs: Side, slack: f64) -> Self {
        let diff = lhs.value - rhs.value;
        let bound = 3.0 * lhs.error.hypot(rhs.error) + slack;
        Comparison { lhs, rhs, diff, pass: diff.abs() <= bound }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    #[serde(flatten)]
    pub comparison: Comparison,
    pub c_alpha: f64,
    pub hat_integral: IntegralEstimate,
    pub expectation: McEstimate,
}

/// Compares `C_α Î_{T̂}(λ)` with the Monte Carlo estimate of
/// `E[e^{−⟨λ,z⟩} ∏_{e∈T} p_e / det(I − P_U)]`. The hat integral uses
/// quadrature and falls back to importance sampling when quadrature is out
/// of reach.
pub fn verify_theorem_2_1(
    g: &DirectedGraph,
    w: &DirichletWeights,
    lambda: &[f64],
    tree: &SpanningTree,
    n: u64,
    seed: u64,
    tol: f64,
) -> Result<TheoremReport> {
    let spec = IntegrandSpec::hat(g, w, lambda, tree)?;
    let c_alpha = constant_c_alpha(w)?;
    let hat_integral = match integrate_quadrature(&spec, tol) {
        Err(Error::DimensionTooLarge { .. } | Error::NonConvergence { .. }) => integrate_mc(&spec, n, seed)?,
        other => other?,
    };
    let expectation = mc_estimate_rhs(g, w, lambda, tree, n, seed)?;
    let lhs = Side { value: c_alpha * hat_integral.value, error: c_alpha * hat_integral.error };
    let rhs = Side { value: expectation.value, error: expectation.std_error };
    Ok(TheoremReport { comparison: Comparison::new(lhs, rhs, tol), c_alpha, hat_integral, expectation })
}

/// `l(λ) = Σ_e ε(e) λ_e` for a signed edge set.
pub fn pair<T: Scalar>(set: &SignedEdgeSet, lambda: &[T]) -> T {
    set.steps.iter().fold(T::zero(), |acc, &(e, s)| {
        if s > 0 {
            acc + lambda[e].clone()
        } else {
            acc - lambda[e].clone()
        }
    })
}

/// `⟨z, λ⟩ − l_{σ_T}(λ) − Σ_{e∈T^c} z_e l_{C^e_T}(λ)` with each fundamental
/// cycle oriented along its edge; zero for every `z` with `div z = δ_{x0}`.
pub fn pairing_identity_check<T: Scalar>(
    g: &DirectedGraph,
    tree: &SpanningTree,
    z: &FlowPoint<T>,
    lambda: &[T],
) -> Result<T> {
    if z.z.len() != g.n_edges() || lambda.len() != g.n_edges() {
        return Err(Error::Dimension("z and lambda need one entry per edge".into()));
    }
    let mut residual = z.z.iter().zip(lambda).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
    residual = residual - pair(&tree_path(g, tree), lambda);
    for e in tree.complement(g) {
        let cycle = fundamental_cycle(g, tree, e)?;
        residual = residual - z.z[e].clone() * pair(&cycle, lambda);
    }
    Ok(residual)
}

/// Checks
/// `l_C(λ) ∫_Δ z_{e0} e^{−⟨λ,z⟩} ∏ z_e^{α_e} ω_T = Σ_{e′∈C} ε_C(e′) α_{e′} I_{T∪e0∖e′}(λ)`
/// for the fundamental cycle `C = C^{e0}_T` oriented along `e0`, by
/// quadrature at tolerance `tol`.
pub fn cohomology_identity_check(spec: &IntegrandSpec, e0: usize, tol: f64) -> Result<Comparison> {
    let g = spec.graph();
    let tree = *spec.tree();
    let cycle = fundamental_cycle(g, &tree, e0)?;
    let l = pair(&cycle, spec.lambda());
    let weighted = integrate_quadrature(&spec.times_coordinate(e0), tol)?;
    let lhs = Side { value: l * weighted.value, error: l.abs() * weighted.error };
    let mut rhs = Side { value: 0.0, error: 0.0 };
    for &(e, s) in &cycle.steps {
        let exchanged = SpanningTree::new(g, tree.edges.with(e0).without(e))?;
        let i = integrate_quadrature(&spec.with_tree(&exchanged)?, tol)?;
        let coeff = f64::from(s) * spec.alpha()[e];
        rhs.value += coeff * i.value;
        rhs.error += coeff.abs() * i.error;
    }
    Ok(Comparison::new(lhs, rhs, tol))
}

/// `α_e/β_{tail(e)}`, the closed form of both sides at λ = 0 on a graph with
/// a single vertex in U.
pub fn beta_integral(g: &DirectedGraph, e: usize) -> BigRational {
    g.edge(e).alpha.clone() / g.beta(g.edge(e).tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{triangle, two_edge};
    use crate::scalar::{int, rational};
    use approx::assert_abs_diff_eq;

    fn tree(g: &DirectedGraph, ids: &[&str]) -> SpanningTree {
        SpanningTree::from_ids(g, ids).unwrap()
    }

    #[test]
    fn integrand_examples() {
        let g = two_edge();
        let spec = IntegrandSpec::new(&g, &[0.0, 0.0], &tree(&g, &["e1"])).unwrap();
        assert_abs_diff_eq!(integrand(&spec, &[0.5]), 0.5, epsilon = 1e-15);
        assert_eq!(integrand(&spec, &[1.5]), 0.0);
        let w = DirichletWeights::from_graph(&g).unwrap();
        let hat = IntegrandSpec::hat(&g, &w, &[0.0, 0.0], &tree(&g, &["e1"])).unwrap();
        assert_abs_diff_eq!(integrand(&hat, &[0.5]), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn two_edge_closed_forms() {
        let g = two_edge();
        let spec = IntegrandSpec::new(&g, &[0.0, 0.0], &tree(&g, &["e1"])).unwrap();
        let i = integrate_quadrature(&spec, 1e-10).unwrap();
        assert_abs_diff_eq!(i.value, 0.5, epsilon = 1e-10);
        let w = DirichletWeights::from_graph(&g).unwrap();
        let hat = IntegrandSpec::hat(&g, &w, &[1.0, 0.0], &tree(&g, &["e1"])).unwrap();
        let i = integrate_quadrature(&hat, 1e-10).unwrap();
        assert_abs_diff_eq!(i.value, 1.0 - 2.0 / 1f64.exp(), epsilon = 1e-10);
        assert!(i.error <= 1e-10);
    }

    #[test]
    fn quadrature_rejects_high_dimension() {
        let g = DirectedGraph::with_unit_weights(
            &["x0", "d"],
            "d",
            "x0",
            &[("e1", "x0", "d"), ("e2", "x0", "d"), ("e3", "x0", "d"), ("e4", "x0", "d"), ("e5", "x0", "d"), ("e6", "x0", "d")],
        )
        .unwrap();
        let spec = IntegrandSpec::new(&g, &[1.0; 6], &tree(&g, &["e1"])).unwrap();
        assert_eq!(integrate_quadrature(&spec, 1e-8), Err(Error::DimensionTooLarge { dim: 5, max: 4 }));
    }

    #[test]
    fn mc_matches_quadrature_on_triangle() {
        let g = triangle();
        let spec = IntegrandSpec::new(&g, &[1.0; 4], &tree(&g, &["e3", "e4"])).unwrap();
        let q = integrate_quadrature(&spec, 1e-8).unwrap();
        let m = integrate_mc(&spec, 200_000, 7).unwrap();
        assert!((q.value - m.value).abs() <= 3.0 * m.error + 1e-8, "{q:?} {m:?}");
    }

    #[test]
    fn mc_matches_quadrature_on_two_edge() {
        let g = two_edge().with_alpha(&[int(2), rational(1, 2)]).unwrap();
        let t = tree(&g, &["e1"]);
        for lambda in [[1.0, 2.0], [3.0, 0.5]] {
            let spec = IntegrandSpec::new(&g, &lambda, &t).unwrap();
            let q = integrate_quadrature(&spec, 1e-9).unwrap();
            let m = integrate_mc(&spec, 100_000, 3).unwrap();
            assert!((q.value - m.value).abs() <= 4.0 * m.error, "{q:?} {m:?}");
        }
    }

    #[test]
    fn mc_errors() {
        let g = two_edge();
        let spec = IntegrandSpec::new(&g, &[1.0, 0.0], &tree(&g, &["e1"])).unwrap();
        assert!(matches!(integrate_mc(&spec, 10, 0), Err(Error::InvalidProposal(_))));
        let spec = IntegrandSpec::new(&g, &[1.0, 1.0], &tree(&g, &["e1"])).unwrap();
        assert_eq!(integrate_mc(&spec, 0, 0), Err(Error::NoSamples));
    }

    #[test]
    fn c_alpha_examples() {
        let g = two_edge();
        assert_abs_diff_eq!(constant_c_alpha(&DirichletWeights::from_graph(&g).unwrap()).unwrap(), 1.0, epsilon = 1e-14);
        let w = DirichletWeights::new(&g, vec![int(2), int(1)]).unwrap();
        assert_abs_diff_eq!(constant_c_alpha(&w).unwrap(), 2.0, epsilon = 1e-13);
        let w = DirichletWeights::new(&g, vec![rational(1, 1000), rational(1, 1000)]).unwrap();
        assert!(constant_c_alpha(&w).unwrap() < 1e-2);
        let w = DirichletWeights::new(&g, vec![int(2000), int(2000)]).unwrap();
        assert!(matches!(constant_c_alpha(&w), Err(Error::Overflow(_))));
    }

    #[test]
    fn pairing_on_two_edge() {
        let g = two_edge();
        let t = tree(&g, &["e1"]);
        let z = FlowPoint { z: vec![rational(2, 3), rational(1, 3)] };
        let r = pairing_identity_check(&g, &t, &z, &[rational(5, 7), int(3)]).unwrap();
        assert_eq!(r, int(0));
        let r = pairing_identity_check(&g, &t, &z, &[int(0), int(0)]).unwrap();
        assert_eq!(r, int(0));
    }

    #[test]
    fn cohomology_on_two_edge() {
        let g = two_edge();
        let spec = IntegrandSpec::new(&g, &[1.0, 2.0], &tree(&g, &["e1"])).unwrap();
        let c = cohomology_identity_check(&spec, 1, 1e-9).unwrap();
        assert!(c.pass, "{c:?}");
        assert!(c.diff.abs() < 1e-9);
        // λ1 = λ2 makes the left side vanish, so the two integrals agree
        let spec = IntegrandSpec::new(&g, &[1.5, 1.5], &tree(&g, &["e1"])).unwrap();
        let c = cohomology_identity_check(&spec, 1, 1e-9).unwrap();
        assert_eq!(c.lhs.value, 0.0);
        assert!(c.rhs.value.abs() < 1e-9);
    }

    #[test]
    fn cohomology_with_unequal_weights() {
        let g = two_edge().with_alpha(&[int(2), rational(3, 2)]).unwrap();
        let spec = IntegrandSpec::new(&g, &[1.0, 2.5], &tree(&g, &["e1"])).unwrap();
        let c = cohomology_identity_check(&spec, 1, 1e-9).unwrap();
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn theorem_at_zero_is_a_beta_integral() {
        let g = two_edge().with_alpha(&[int(3), int(2)]).unwrap();
        let w = DirichletWeights::from_graph(&g).unwrap();
        let t = tree(&g, &["e1"]);
        let r = verify_theorem_2_1(&g, &w, &[0.0, 0.0], &t, 20_000, 1, 1e-8).unwrap();
        assert_abs_diff_eq!(r.comparison.lhs.value, rational_to_f64(&beta_integral(&g, 0)), epsilon = 1e-8);
        assert!(r.comparison.pass, "{r:?}");
    }

    #[test]
    fn theorem_on_triangle() {
        let g = triangle();
        let w = DirichletWeights::from_graph(&g).unwrap();
        for t in crate::graph::enumerate_spanning_trees(&g, true) {
            let r = verify_theorem_2_1(&g, &w, &[1.0, 2.0, 3.0, 4.0], &t, 100_000, 2, 1e-8).unwrap();
            assert!(r.comparison.pass, "{r:?}");
            assert_eq!(r.hat_integral.method, Method::Quadrature);
        }
    }
}
