//! Property tests over random valid graphs with at most eight edges.

use num::rational::BigRational;
use num::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rwde::connection::build_connection;
use rwde::environment::{edge_occupation, random_rational_environment};
use rwde::graph::{
    cycle_rank, enumerate_spanning_trees, flow_residual, genus, hat_graph, is_arrangement_basis, random_graph,
    solve_tree_coordinates, DirectedGraph, EdgeSet, FlowPoint, SpanningTree, TreeChart,
};
use rwde::integrals::pairing_identity_check;
use rwde::scalar::{rational, Matrix};

fn graph_from(seed: u64) -> (DirectedGraph, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m: usize = rng.random_range(2..=8);
    let n_u = rng.random_range(1..=m.div_ceil(2));
    (random_graph(&mut rng, n_u, m), rng)
}

fn random_rational<R: Rng>(rng: &mut R) -> BigRational {
    rational(rng.random_range(-20..=20), rng.random_range(1..=7))
}

fn random_flow<R: Rng>(g: &DirectedGraph, tree: &SpanningTree, rng: &mut R) -> FlowPoint<BigRational> {
    let u: Vec<BigRational> = tree.complement(g).iter().map(|_| random_rational(rng)).collect();
    solve_tree_coordinates(g, tree, &u).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn genus_is_the_cycle_rank(seed in any::<u64>(), bits in any::<u64>()) {
        let (g, _) = graph_from(seed);
        let subset = EdgeSet::from_bits(bits & g.all_edges().bits());
        prop_assert_eq!(genus(&g, subset), cycle_rank(&g, subset));
    }

    #[test]
    fn bases_are_tree_complements(seed in any::<u64>(), bits in any::<u64>()) {
        let (g, _) = graph_from(seed);
        let subset = EdgeSet::from_bits(bits & g.all_edges().bits());
        let complement = g.all_edges().difference(subset);
        let is_complement = subset.len() == g.flow_dimension() && SpanningTree::new(&g, complement).is_ok();
        prop_assert_eq!(is_arrangement_basis(&g, subset), is_complement);
    }

    #[test]
    fn chart_points_are_flows(seed in any::<u64>()) {
        let (g, mut rng) = graph_from(seed);
        for tree in enumerate_spanning_trees(&g, false) {
            let z = random_flow(&g, &tree, &mut rng);
            prop_assert!(flow_residual(&g, &z.z).unwrap().iter().all(|r| r.is_zero()));
            // the same point read in any other chart
            for other in enumerate_spanning_trees(&g, false) {
                let u: Vec<BigRational> = other.complement(&g).iter().map(|&e| z.z[e].clone()).collect();
                prop_assert_eq!(&TreeChart::new(&g, &other).eval(&u), &z.z);
            }
        }
    }

    #[test]
    fn pairing_identity_is_exact(seed in any::<u64>()) {
        let (g, mut rng) = graph_from(seed);
        for tree in enumerate_spanning_trees(&g, false) {
            let z = random_flow(&g, &tree, &mut rng);
            let lambda: Vec<BigRational> = (0..g.n_edges()).map(|_| random_rational(&mut rng)).collect();
            let any_tree = enumerate_spanning_trees(&g, false)[0];
            prop_assert!(pairing_identity_check(&g, &tree, &z, &lambda).unwrap().is_zero());
            prop_assert!(pairing_identity_check(&g, &any_tree, &z, &lambda).unwrap().is_zero());
        }
    }

    #[test]
    fn occupation_lies_in_the_flow_space(seed in any::<u64>()) {
        let (g, mut rng) = graph_from(seed);
        let env = random_rational_environment(&g, &mut rng);
        let z = edge_occupation(&g, &env).unwrap();
        prop_assert!(flow_residual(&g, &z.z).unwrap().iter().all(|r| r.is_zero()));
        prop_assert!(z.z.iter().all(|v| *v > BigRational::zero()));
        let hat = hat_graph(&g);
        let lifted = hat.lift_flow(&g, &z.z);
        prop_assert!(flow_residual(hat.graph(), &lifted).unwrap().iter().all(|r| r.is_zero()));
    }

    #[test]
    fn cycle_matrices_are_scaled_projectors(seed in any::<u64>()) {
        let (g, _) = graph_from(seed);
        let conn = build_connection(&g);
        for term in &conn.cycle_terms {
            let total = term.set.edges.iter().fold(BigRational::zero(), |acc, e| acc + g.edge(e).alpha.clone());
            prop_assert_eq!(term.omega.mul(&term.omega), term.omega.scale(&total));
        }
        let mut sum = Matrix::<BigRational>::zeros(conn.dimension(), conn.dimension());
        for term in &conn.path_terms {
            sum = sum.add(&term.omega);
        }
        // each tree contains exactly one simple path from x0 to δ
        prop_assert_eq!(sum, Matrix::identity(conn.dimension()));
    }
}
