//! One function per subcommand. Each returns the resolved inputs, the
//! results and whether every check passed.

use num::complex::Complex64;
use num::rational::BigRational;
use num::{Signed, Zero};
use rand::Rng;
use rwde::connection::{
    build_connection, check_commutation as commutation, check_flatness as flatness, flatness_shadow,
    transport as run_transport, LambdaPath, Relation, TransportOptions,
};
use rwde::environment::{
    dirichlet_mean, edge_occupation, mc_tree_decomposition, sample_environment_with, substream,
    survival_determinant, wilson_test as run_wilson, DirichletWeights, Environment,
};
use rwde::graph::{
    enumerate_cycles, enumerate_paths, enumerate_spanning_trees, genus, hat_graph, solve_tree_coordinates,
    validate as violations, SpanningTree,
};
use rwde::integrals::{
    cohomology_identity_check, integrate_quadrature, pairing_identity_check, verify_theorem_2_1, IntegrandSpec,
};
use rwde::scalar::{int, rational, rational_to_f64};
use rwde::Error;
use serde_json::{json, Value};

use crate::input::{self, per_edge, per_edge_rational, tree_label, CliError};
use crate::{Common, Outcome, TransportArgs};

fn index_plus_one(e: usize) -> BigRational {
    int(e as i64 + 1)
}

fn complex(z: &Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn random_rational<R: Rng>(rng: &mut R) -> BigRational {
    rational(rng.random_range(-30..=30), rng.random_range(1..=9))
}

pub fn validate(c: &Common) -> Result<Outcome, CliError> {
    let g = input::load_unchecked(c)?;
    let mut problems: Vec<String> = violations(&g).iter().map(|v| v.to_string()).collect();
    for e in 0..g.n_edges() {
        if !g.edge(e).alpha.is_positive() {
            problems.push(format!("nonpositive weight on edge {}", g.edge_id(e)));
        }
    }
    let results = json!({
        "vertices": g.n_vertices(),
        "edges": g.n_edges(),
        "violations": problems,
    });
    Ok(Outcome { inputs: input::inputs(&g, c, json!({})), results, pass: problems.is_empty() })
}

pub fn enumerate(c: &Common) -> Result<Outcome, CliError> {
    let g = input::load(c)?;
    let trees = enumerate_spanning_trees(&g, false);
    let directed: Vec<&SpanningTree> = trees.iter().filter(|t| t.directed).collect();
    let cycles = enumerate_cycles(&g);
    let paths = enumerate_paths(&g);
    let hat = hat_graph(&g);
    let h = hat.graph();
    let results = json!({
        "spanning_trees": { "count": trees.len(), "members": trees.iter().map(|t| tree_label(&g, t)).collect::<Vec<_>>() },
        "directed_trees": { "count": directed.len(), "members": directed.iter().map(|t| tree_label(&g, t)).collect::<Vec<_>>() },
        "cycles": { "count": cycles.len(), "members": cycles.iter().map(|s| s.describe(&g)).collect::<Vec<_>>() },
        "genus": genus(&g, g.all_edges()),
        "paths": { "count": paths.len(), "members": paths.iter().map(|s| s.describe(&g)).collect::<Vec<_>>() },
        "hat": {
            "vertices": h.n_vertices(),
            "edges": h.n_edges(),
            "base": h.vertex_name(h.base()),
            "vertex_edges": hat.vertex_edges().iter().map(|&e| json!({
                "id": h.edge_id(e),
                "tail": h.vertex_name(h.edge(e).tail),
                "head": h.vertex_name(h.edge(e).head),
                "alpha": rwde::scalar::format_rational(&h.edge(e).alpha),
            })).collect::<Vec<_>>(),
            "negative_vertex_weights": hat.has_negative_vertex_weights(),
        },
    });
    Ok(Outcome { inputs: input::inputs(&g, c, json!({})), results, pass: true })
}

pub fn sample_env(c: &Common) -> Result<Outcome, CliError> {
    let g = input::load(c)?;
    let w = DirichletWeights::from_graph(&g)?;
    let n = c.samples.unwrap_or(10_000);
    let tol = c.tol.unwrap_or(1e-12);
    let draws: Vec<Environment> =
        (0..n).map(|i| sample_environment_with(&g, &w, &mut substream(c.seed, i))).collect();
    let first = &draws[0];
    let env_ok = draws.iter().all(|d| d.check(&g, tol).is_ok());
    let occupation = edge_occupation(&g, first)?;
    let residual = occupation.residual(&g)?.iter().fold(0.0f64, |m, r| m.max(r.abs()));

    let mut means = serde_json::Map::new();
    let mut worst_z = 0.0f64;
    for e in 0..g.n_edges() {
        let exact = rational_to_f64(&dirichlet_mean(&g, &w, e));
        let a = w.alpha_f64()[e];
        let b = rational_to_f64(&g.beta(g.edge(e).tail));
        let sd = (a * (b - a) / (b * b * (b + 1.0)) / n as f64).sqrt();
        let mean = draws.iter().map(|d| d.p[e]).sum::<f64>() / n as f64;
        let z = if sd > 0.0 { (mean - exact) / sd } else { 0.0 };
        worst_z = worst_z.max(z.abs());
        means.insert(g.edge_id(e).to_string(), json!({ "sample": mean, "exact": exact, "z": z }));
    }
    let pass = env_ok && residual <= 1e-9 && worst_z <= 5.0;
    let results = json!({
        "environment": per_edge(&g, &first.p),
        "occupation": per_edge(&g, &occupation.z),
        "occupation_residual": residual,
        "survival_determinant": survival_determinant(&g, first),
        "environments_valid": env_ok,
        "means": means,
        "max_abs_z": worst_z,
    });
    Ok(Outcome { inputs: input::inputs(&g, c, json!({ "samples": n, "tol": tol })), results, pass })
}

pub fn verify_thm21(c: &Common) -> Result<Outcome, CliError> {
    let g = input::load(c)?;
    let w = DirichletWeights::from_graph(&g)?;
    let lambda = input::lambda_f64(&g, c, |e| if e == 0 { int(1) } else { BigRational::zero() })?;
    let n = c.samples.unwrap_or(200_000);
    let tol = c.tol.unwrap_or(1e-8);
    let trees = match input::tree(&g, c)? {
        Some(t) => vec![t],
        None => enumerate_spanning_trees(&g, true),
    };
    let mut rows = Vec::new();
    let mut pass = true;
    for t in &trees {
        let report = verify_theorem_2_1(&g, &w, &lambda, t, n, c.seed, tol)?;
        pass &= report.comparison.pass;
        let mut row = serde_json::to_value(&report).expect("report serializes");
        row["tree"] = tree_label(&g, t);
        rows.push(row);
    }
    let inputs = input::inputs(&g, c, json!({ "lambda": per_edge(&g, &lambda), "samples": n, "tol": tol }));
    Ok(Outcome { inputs, results: json!({ "trees": rows }), pass })
}

pub fn verify_identities(c: &Common) -> Result<Outcome, CliError> {
    let g = input::load(c)?;
    let n = c.samples.unwrap_or(100);
    let exact = !c.float;
    let trees = enumerate_spanning_trees(&g, false);
    let mut nonzero = 0u64;
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut rng = substream(c.seed, i);
        let tree = trees[rng.random_range(0..trees.len())];
        let chart = trees[rng.random_range(0..trees.len())];
        let u: Vec<BigRational> = chart.complement(&g).iter().map(|_| random_rational(&mut rng)).collect();
        let lambda: Vec<BigRational> = (0..g.n_edges()).map(|_| random_rational(&mut rng)).collect();
        let z = solve_tree_coordinates(&g, &chart, &u)?;
        let residual = if exact {
            rational_to_f64(&pairing_identity_check(&g, &tree, &z, &lambda)?)
        } else {
            let zf = rwde::graph::FlowPoint { z: z.z.iter().map(rational_to_f64).collect() };
            let lf: Vec<f64> = lambda.iter().map(rational_to_f64).collect();
            pairing_identity_check(&g, &tree, &zf, &lf)?
        };
        worst = worst.max(residual.abs());
        if (exact && residual != 0.0) || (!exact && residual.abs() > 1e-9) {
            nonzero += 1;
        }
    }

    let lambda = input::lambda_f64(&g, c, index_plus_one)?;
    let tol = c.tol.unwrap_or(1e-6);
    let mut entries = Vec::new();
    let mut cohomology_pass = true;
    for t in &trees {
        let spec = IntegrandSpec::new(&g, &lambda, t)?;
        for e0 in t.complement(&g) {
            let entry = match cohomology_identity_check(&spec, e0, tol) {
                Ok(cmp) => {
                    cohomology_pass &= cmp.pass;
                    json!({ "tree": tree_label(&g, t), "edge": g.edge_id(e0), "comparison": cmp })
                }
                Err(e @ (Error::DimensionTooLarge { .. } | Error::NonConvergence { .. })) => {
                    json!({ "tree": tree_label(&g, t), "edge": g.edge_id(e0), "skipped": e.to_string() })
                }
                Err(e) => return Err(e.into()),
            };
            entries.push(entry);
        }
    }
    let results = json!({
        "pairing": {
            "arithmetic": if exact { "exact" } else { "float" },
            "triples": n,
            "failures": nonzero,
            "max_abs_residual": worst,
        },
        "cohomology": entries,
    });
    let inputs = input::inputs(&g, c, json!({ "lambda": per_edge(&g, &lambda), "samples": n, "tol": tol }));
    Ok(Outcome { inputs, results, pass: nonzero == 0 && cohomology_pass })
}

pub fn check_commutation(c: &Common) -> Result<Outcome, CliError> {
    let g = input::load(c)?;
    let conn = build_connection(&g);
    let report = commutation(&conn);
    let relations = [
        Relation::Cycles,
        Relation::Paths,
        Relation::CyclePath,
        Relation::Triple,
        Relation::PathPair,
        Relation::PathProjector,
        Relation::CycleProjector,
    ];
    let counts: serde_json::Map<String, Value> = relations
        .iter()
        .map(|&r| {
            let name = serde_json::to_value(r).expect("relation serializes");
            (name.as_str().unwrap_or_default().to_string(), json!(report.count(r)))
        })
        .collect();
    let results = json!({
        "basis": conn.basis.labels(&g),
        "paths": conn.path_terms.len(),
        "cycles": conn.cycle_terms.len(),
        "instances": counts,
        "failures": report.failures().collect::<Vec<_>>(),
    });
    Ok(Outcome { inputs: input::inputs(&g, c, json!({})), results, pass: report.pass })
}

/// Random rational points of M, redrawn when they hit a hyperplane.
fn random_points(conn: &rwde::connection::ConnectionForm, n: u64, seed: u64) -> Vec<Vec<BigRational>> {
    let m = conn.graph.n_edges();
    (0..n)
        .map(|i| {
            let mut rng = substream(seed, i);
            loop {
                let lambda: Vec<BigRational> = (0..m).map(|_| random_rational(&mut rng)).collect();
                if conn.check_membership(&lambda).is_ok() {
                    return lambda;
                }
            }
        })
        .collect()
}

pub fn check_flatness(c: &Common) -> Result<Outcome, CliError> {
    let g = input::load(c)?;
    let conn = build_connection(&g);
    let n = c.samples.unwrap_or(100);
    let points = random_points(&conn, n, c.seed);
    let (arithmetic, residual, bound) = if c.float {
        let tol = c.tol.unwrap_or(1e-12);
        let pf: Vec<Vec<f64>> = points.iter().map(|p| p.iter().map(rational_to_f64).collect()).collect();
        ("float", flatness_shadow(&conn, &pf)?, tol)
    } else {
        ("exact", flatness(&conn, &points)?, 0.0)
    };
    let results = json!({
        "arithmetic": arithmetic,
        "points": n,
        "basis_size": conn.basis.len(),
        "max_residual": residual,
    });
    let inputs = input::inputs(&g, c, json!({ "samples": n, "arithmetic": arithmetic }));
    Ok(Outcome { inputs, results, pass: residual <= bound })
}

/// Quadrature values and errors of every basis integral at a real point.
fn basis_integrals(
    conn: &rwde::connection::ConnectionForm,
    lambda: &[f64],
    tol: f64,
) -> Result<Vec<(f64, f64)>, CliError> {
    conn.basis
        .trees()
        .iter()
        .map(|t| {
            let q = integrate_quadrature(&IntegrandSpec::new(&conn.graph, lambda, t)?, tol)?;
            Ok((q.value, q.error))
        })
        .collect()
}

pub fn transport(t: &TransportArgs) -> Result<Outcome, CliError> {
    let c = &t.common;
    let base = input::load(c)?;
    let lambda0 = input::lambda_exact(&base, c, index_plus_one)?;
    let (g, lambda0) = if t.hat {
        let hat = hat_graph(&base);
        let mut lifted = vec![BigRational::zero(); hat.graph().n_edges()];
        for (e, v) in lambda0.into_iter().enumerate() {
            lifted[hat.lift_edge(e)] = v;
        }
        (hat.graph().clone(), lifted)
    } else {
        (base, lambda0)
    };
    let tol = c.tol.unwrap_or(1e-10);
    let quad_tol = tol.max(1e-9);
    let conn = build_connection(&g);
    let start: Vec<Complex64> = lambda0.iter().map(|v| Complex64::new(rational_to_f64(v), 0.0)).collect();
    let mut waypoints = vec![start.clone()];
    if t.waypoint.is_empty() {
        let lift: Vec<bool> = lambda0.iter().map(|v| !v.is_zero()).collect();
        let detour = start.iter().zip(&lift).map(|(z, &on)| if on { z * 1.5 + Complex64::new(0.0, 0.5) } else { *z });
        waypoints.push(detour.collect());
        waypoints.push(start.iter().map(|z| z * 2.0).collect());
    } else {
        for text in &t.waypoint {
            let next = input::waypoint(&g, text, waypoints.last().expect("nonempty"))?;
            waypoints.push(next);
        }
    }
    let start_real: Vec<f64> = start.iter().map(|z| z.re).collect();
    let initial = basis_integrals(&conn, &start_real, quad_tol)?;
    let v0: Vec<Complex64> = initial.iter().map(|&(v, _)| Complex64::new(v, 0.0)).collect();
    let path = LambdaPath::new(waypoints.clone());
    let opts = TransportOptions { tol, ..Default::default() };
    let moved = run_transport(&conn, &v0, &path, opts)?;

    let end = waypoints.last().expect("nonempty");
    let mut comparison = Value::Null;
    let mut pass = true;
    if end.iter().all(|z| z.im == 0.0) {
        let end_real: Vec<f64> = end.iter().map(|z| z.re).collect();
        let direct = basis_integrals(&conn, &end_real, quad_tol)?;
        let mut worst = 0.0f64;
        for ((v, (d, de)), (_, e0)) in moved.value.iter().zip(&direct).zip(&initial) {
            let diff = (v - Complex64::new(*d, 0.0)).norm();
            worst = worst.max(diff);
            pass &= diff <= 3.0 * (de + e0) + 1e-5;
        }
        comparison = json!({
            "direct": direct.iter().map(|d| d.0).collect::<Vec<_>>(),
            "max_abs_diff": worst,
        });
    }
    let results = json!({
        "basis": conn.basis.labels(&g),
        "start": initial.iter().map(|d| d.0).collect::<Vec<_>>(),
        "transported": moved.value.iter().map(complex).collect::<Vec<_>>(),
        "steps": { "accepted": moved.accepted, "rejected": moved.rejected },
        "comparison": comparison,
    });
    let inputs = json!({
        "graph": c.graph,
        "hat": t.hat,
        "alpha": per_edge_rational(&g, &g.alpha()),
        "waypoints": waypoints.iter().map(|w| w.iter().map(complex).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "tol": tol,
    });
    Ok(Outcome { inputs, results, pass })
}

pub fn wilson_test(c: &Common) -> Result<Outcome, CliError> {
    let g = input::load(c)?;
    let n = c.samples.unwrap_or(100_000);
    let tv_bound = c.tol.unwrap_or(0.01);
    let significance = 1e-3;
    let report = run_wilson(&g, &Environment::uniform(&g), n, c.seed, significance, tv_bound)?;
    let pass = report.pass;
    let inputs = input::inputs(
        &g,
        c,
        json!({ "environment": "uniform", "samples": n, "significance": significance, "tv_bound": tv_bound }),
    );
    Ok(Outcome { inputs, results: serde_json::to_value(&report).expect("report serializes"), pass })
}

pub fn laplace(c: &Common) -> Result<Outcome, CliError> {
    let g = input::load(c)?;
    let w = DirichletWeights::from_graph(&g)?;
    let lambda = input::lambda_f64(&g, c, index_plus_one)?;
    let n = c.samples.unwrap_or(100_000);
    let tol = c.tol.unwrap_or(1e-12);
    let d = mc_tree_decomposition(&g, &w, &lambda, n, c.seed)?;
    let gap = (d.sum_of_trees() - d.laplace.value).abs();
    let pass = gap <= tol * d.laplace.value.abs().max(1.0);
    let results = json!({
        "laplace": d.laplace,
        "trees": d.trees.iter().zip(&d.per_tree).map(|(t, e)| json!({ "tree": tree_label(&g, t), "estimate": e })).collect::<Vec<_>>(),
        "sum_of_trees": d.sum_of_trees(),
        "gap": gap,
    });
    let inputs = input::inputs(&g, c, json!({ "lambda": per_edge(&g, &lambda), "samples": n, "tol": tol }));
    Ok(Outcome { inputs, results, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_points_avoid_the_locus() {
        let conn = build_connection(&rwde::graph::triangle());
        for p in random_points(&conn, 20, 4) {
            assert!(conn.check_membership(&p).is_ok());
        }
    }

    #[test]
    fn transport_basis_integrals_on_two_edges() {
        let conn = build_connection(&rwde::graph::two_edge());
        let v = basis_integrals(&conn, &[0.0, 0.0], 1e-10).unwrap_or_else(|_| panic!("quadrature"));
        assert!(v.iter().all(|(x, _)| x.is_finite()));
    }
}
