//! Exact checks of the commutation relations and of flatness.

use num::rational::BigRational;
use serde::{Deserialize, Serialize};

use super::ConnectionForm;
use crate::error::Result;
use crate::graph::{genus, EdgeSet};
use crate::scalar::{Matrix, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `[Ω_C, Ω_C′] = 0` for disjoint cycles or `genus(C ∪ C′) ≠ 2`.
    Cycles,
    /// `[Ω_σ, Ω_σ′] = 0`.
    Paths,
    /// `[Ω_C, Ω_σ] = 0` for disjoint C, σ or `genus(σ ∪ C) ≠ 1`.
    CyclePath,
    /// `[Ω_{C1} + Ω_{C2} + Ω_{C3}, Ω_{Ci}] = 0` for the three cycles of a
    /// genus-2 union.
    Triple,
    /// `[Ω_{σ1} + Ω_{σ2}, Ω_C] = 0` when `σ1 ∪ σ2` has genus 1 and cycle C.
    PathPair,
    /// `Ω_σ² = Ω_σ`.
    PathProjector,
    /// `Ω_C² = (Σ_{e∈C} α_e) Ω_C`.
    CycleProjector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutationInstance {
    pub relation: Relation,
    pub members: Vec<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutationReport {
    pub instances: Vec<CommutationInstance>,
    pub pass: bool,
}

impl CommutationReport {
    pub fn count(&self, relation: Relation) -> usize {
        self.instances.iter().filter(|i| i.relation == relation).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CommutationInstance> {
        self.instances.iter().filter(|i| !i.pass)
    }
}

/// Runs every relation on every eligible family of paths and cycles, in
/// exact arithmetic.
pub fn check_commutation(conn: &ConnectionForm) -> CommutationReport {
    let g = &conn.graph;
    let cycles = &conn.cycle_terms;
    let paths = &conn.path_terms;
    let mut out = Vec::new();
    let mut record = |relation, members: Vec<String>, pass| out.push(CommutationInstance { relation, members, pass });
    let commute = |a: &Matrix<BigRational>, b: &Matrix<BigRational>| a.commutator(b).is_zero();

    for p in paths {
        record(Relation::PathProjector, vec![p.set.describe(g)], p.omega.mul(&p.omega) == p.omega);
    }
    for c in cycles {
        let total = c.set.edges.iter().fold(BigRational::from_integer(0.into()), |acc, e| acc + g.edge(e).alpha.clone());
        record(Relation::CycleProjector, vec![c.set.describe(g)], c.omega.mul(&c.omega) == c.omega.scale(&total));
    }
    for (i, a) in cycles.iter().enumerate() {
        for b in &cycles[i + 1..] {
            let union = a.set.edges.union(b.set.edges);
            if a.set.edges.is_disjoint(b.set.edges) || genus(g, union) != 2 {
                record(Relation::Cycles, vec![a.set.describe(g), b.set.describe(g)], commute(&a.omega, &b.omega));
            }
        }
    }
    for (i, a) in paths.iter().enumerate() {
        for b in &paths[i + 1..] {
            record(Relation::Paths, vec![a.set.describe(g), b.set.describe(g)], commute(&a.omega, &b.omega));
        }
    }
    for c in cycles {
        for p in paths {
            if c.set.edges.is_disjoint(p.set.edges) || genus(g, c.set.edges.union(p.set.edges)) != 1 {
                record(Relation::CyclePath, vec![c.set.describe(g), p.set.describe(g)], commute(&c.omega, &p.omega));
            }
        }
    }
    let inside = |union: EdgeSet| cycles.iter().filter(move |c| c.set.edges.is_subset(union));
    let mut seen: Vec<EdgeSet> = Vec::new();
    for (i, a) in cycles.iter().enumerate() {
        for b in &cycles[i + 1..] {
            let union = a.set.edges.union(b.set.edges);
            if a.set.edges.is_disjoint(b.set.edges) || genus(g, union) != 2 || seen.contains(&union) {
                continue;
            }
            seen.push(union);
            let triple: Vec<_> = inside(union).collect();
            let members = triple.iter().map(|c| c.set.describe(g)).collect();
            let sum = triple.iter().skip(1).fold(triple[0].omega.clone(), |acc, c| acc.add(&c.omega));
            let pass = triple.len() == 3 && triple.iter().all(|c| commute(&sum, &c.omega));
            record(Relation::Triple, members, pass);
        }
    }
    for (i, a) in paths.iter().enumerate() {
        for b in &paths[i + 1..] {
            let union = a.set.edges.union(b.set.edges);
            if genus(g, union) != 1 {
                continue;
            }
            let found: Vec<_> = inside(union).collect();
            let mut members = vec![a.set.describe(g), b.set.describe(g)];
            members.extend(found.iter().map(|c| c.set.describe(g)));
            let pass = found.len() == 1 && commute(&a.omega.add(&b.omega), &found[0].omega);
            record(Relation::PathPair, members, pass);
        }
    }
    let pass = out.iter().all(|i| i.pass);
    CommutationReport { instances: out, pass }
}

/// Largest entry of `[M_i(λ), M_j(λ)]` over all `i < j` and all samples;
/// exactly zero in exact arithmetic.
pub fn check_flatness<T: Scalar>(conn: &ConnectionForm, samples: &[Vec<T>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for lambda in samples {
        let m = conn.coefficients(lambda)?;
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                worst = worst.max(m[i].commutator(&m[j]).max_abs());
            }
        }
    }
    Ok(worst)
}

/// Floating-point flatness residual, relative to `max|M_i| · max|M_j|`.
pub fn flatness_shadow(conn: &ConnectionForm, samples: &[Vec<f64>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for lambda in samples {
        let m = conn.coefficients(lambda)?;
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                let scale = m[i].max_abs() * m[j].max_abs();
                if scale > 0.0 {
                    worst = worst.max(m[i].commutator(&m[j]).max_abs() / scale);
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::super::build_connection;
    use super::*;
    use crate::graph::{chain, triangle, two_diamond, two_edge};
    use crate::scalar::{int, rational};

    #[test]
    fn triangle_relations() {
        let g = triangle();
        let r = check_commutation(&build_connection(&g));
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.count(Relation::Triple), 1);
        assert!(r.count(Relation::PathPair) >= 1);
        let pp = r.instances.iter().find(|i| i.relation == Relation::PathPair && i.members[0] == "{e1+, e4+}");
        assert!(pp.is_some(), "{:?}", r.instances);
    }

    #[test]
    fn weighted_graphs_pass() {
        for g in [
            two_edge().with_alpha(&[rational(1, 3), int(4)]).unwrap(),
            triangle().with_alpha(&[int(2), rational(5, 3), int(1), rational(7, 2)]).unwrap(),
            two_diamond(),
        ] {
            let r = check_commutation(&build_connection(&g));
            assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn disjoint_diamonds_commute() {
        let g = two_diamond();
        let conn = build_connection(&g);
        assert_eq!(conn.cycle_terms.len(), 2);
        let r = check_commutation(&conn);
        assert_eq!(r.count(Relation::Cycles), 1);
        assert!(r.pass);
    }

    #[test]
    fn flatness_exact_and_float() {
        let g = triangle().with_alpha(&[int(2), rational(1, 2), int(3), int(1)]).unwrap();
        let conn = build_connection(&g);
        let exact = vec![vec![int(1), rational(2, 3), int(5), rational(7, 4)]];
        assert_eq!(check_flatness(&conn, &exact).unwrap(), 0.0);
        let float = vec![vec![1.0, 2.0 / 3.0, 5.0, 1.75]];
        assert!(flatness_shadow(&conn, &float).unwrap() <= 1e-12);
        assert_eq!(check_flatness(&build_connection(&chain()), &[vec![int(1), int(1)]]).unwrap(), 0.0);
    }
}
