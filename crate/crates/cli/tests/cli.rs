use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn rwde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rwde")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn data(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    path.to_string_lossy().into_owned()
}

#[test]
fn theorem_on_the_bundled_two_edge_file() {
    let out = rwde(&["verify-thm21", "--graph", &data("two-edge.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["command"], "verify-thm21");
    assert_eq!(r["pass"], true);
    assert_eq!(r["inputs"]["lambda"]["e1"], 1.0);
    assert_eq!(r["inputs"]["lambda"]["e2"], 0.0);
    let first = &r["results"]["trees"][0];
    assert_eq!(first["tree"][0], "e1");
    let closed = 1.0 - 2.0 * (-1.0f64).exp();
    assert!((first["lhs"]["value"].as_f64().unwrap() - closed).abs() < 1e-8);
    assert!((first["rhs"]["value"].as_f64().unwrap() - closed).abs() < 5e-3);
}

#[test]
fn exact_flatness_on_the_triangle() {
    let out = rwde(&["check-flatness", "--graph", &data("triangle.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["arithmetic"], "exact");
    assert_eq!(r["results"]["max_residual"], 0.0);
}

#[test]
fn enumeration_counts() {
    let r = report(&rwde(&["enumerate", "--graph", "triangle"]));
    let res = &r["results"];
    assert_eq!(res["spanning_trees"]["count"], 5);
    assert_eq!(res["directed_trees"]["count"], 3);
    assert_eq!(res["cycles"]["count"], 3);
    assert_eq!(res["paths"]["count"], 3);
    assert_eq!(res["genus"], 2);

    let r = report(&rwde(&["enumerate", "--graph", "two-edge"]));
    let res = &r["results"];
    assert_eq!(res["spanning_trees"]["count"], 2);
    assert_eq!(res["directed_trees"]["count"], 2);
    assert_eq!(res["cycles"]["count"], 1);
    assert_eq!(res["paths"]["count"], 2);
    assert_eq!(res["genus"], 1);

    let r = report(&rwde(&["enumerate", "--graph", &data("chain.json")]));
    assert_eq!(r["results"]["cycles"]["count"], 0);
}

#[test]
fn malformed_file_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"vertices\": [\"x0\", \"d\"],\n \"cemetery\": \"d\",\n \"base\": }\n").unwrap();
    let out = rwde(&["validate", "--graph", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_weight_field_names_the_edge() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"vertices": ["x0", "d"], "cemetery": "d", "base": "x0",
            "edges": [{"id": "e1", "tail": "x0", "head": "d", "alpha": "1/0"}]}"#,
    )
    .unwrap();
    let out = rwde(&["enumerate", "--graph", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("e1") && err.contains("alpha"), "{err}");
}

#[test]
fn validation_failures_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stranded.json");
    std::fs::write(
        &path,
        r#"{"vertices": ["x0", "y", "d"], "cemetery": "d", "base": "x0",
            "edges": [{"id": "e1", "tail": "x0", "head": "d", "alpha": "1"},
                      {"id": "e2", "tail": "y", "head": "x0", "alpha": "1"}]}"#,
    )
    .unwrap();
    let out = rwde(&["validate", "--graph", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let r = report(&out);
    assert_eq!(r["pass"], false);
    assert_eq!(r["results"]["violations"].as_array().unwrap().len(), 1);

    let out = rwde(&["laplace", "--graph", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let out = rwde(&["laplace", "--graph", "triangle", "--alpha", "e1=0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify-thm21", "--graph", "two-edge", "--lambda", "e7=1"][..],
        &["verify-thm21", "--graph", "two-edge", "--lambda", "e1=abc"],
        &["verify-thm21", "--graph", "triangle", "--tree", "e1"],
        &["check-flatness", "--graph", "triangle", "--exact", "--float"],
        &["laplace", "--graph", "triangle", "--samples", "0"],
        &["laplace", "--graph", "triangle", "--tol", "-1"],
        &["enumerate", "--graph", "no-such-graph"],
        &["transport", "--graph", "two-edge", "--waypoint", "e1=1+i+"],
    ] {
        assert_eq!(rwde(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn failing_check_exits_one() {
    // a zero total-variation bound cannot be met by two independent samples
    let out = rwde(&["wilson-test", "--graph", "triangle", "--samples", "1000", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["pass"], false);
}

#[test]
fn exit_status_matches_pass_flag() {
    for args in [
        &["sample-env", "--graph", "triangle"][..],
        &["verify-identities", "--graph", "triangle"],
        &["check-commutation", "--graph", "two-diamond"],
        &["transport", "--graph", "two-edge", "--hat"],
        &["wilson-test", "--graph", "triangle", "--samples", "20000"],
        &["laplace", "--graph", "two-diamond", "--samples", "5000"],
    ] {
        let out = rwde(args);
        let pass = report(&out)["pass"].as_bool().unwrap();
        assert_eq!(out.status.code(), Some(if pass { 0 } else { 1 }), "{args:?}");
        assert!(pass, "{args:?}");
    }
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["verify-thm21", "sample-env", "wilson-test", "laplace", "check-flatness", "transport"] {
        let a = dir.path().join("a.json");
        let b = dir.path().join("b.json");
        for p in [&a, &b] {
            let out = rwde(&[cmd, "--graph", "triangle", "--seed", "7", "--samples", "3000", "--out", p.to_str().unwrap()]);
            assert!(out.stdout.is_empty());
            assert!(out.status.code().is_some());
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{cmd}");
    }
}

#[test]
fn transport_through_complex_waypoints() {
    let out = rwde(&[
        "transport",
        "--graph",
        "triangle",
        "--lambda",
        "e1=1,e2=1,e3=1,e4=1",
        "--waypoint",
        "e1=1.5+0.5i,e3=2-0.25i",
        "--waypoint",
        "e1=2,e3=2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["inputs"]["waypoints"].as_array().unwrap().len(), 3);
    assert!(r["results"]["comparison"]["max_abs_diff"].as_f64().unwrap() < 1e-6);
}
