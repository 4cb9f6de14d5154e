use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dirac-basis"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn build(dir: &Path, degree: u32) -> std::path::PathBuf {
    let file = dir.join(format!("basis{degree}.json"));
    let out = run(&["basis", "build", "--max-degree", &degree.to_string(), "--out", path(&file)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    file
}

#[test]
fn build_verify_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let file = build(dir.path(), 3);
    let basis: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(basis["elements"].as_array().unwrap().len(), 29);
    assert_eq!(basis["provenance"].as_array().unwrap().len(), 29);

    let out = run(&["basis", "verify", path(&file)]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["kernel_exact"], true);
    assert!(report["real_deviation"].as_f64().unwrap() < 1e-9);
    assert_eq!(report["tolerance"], 1e-9);

    let again = dir.path().join("again.json");
    let out = bin().args(["basis", "build", "--max-degree", "3", "--out", path(&again)]).env("DIRAC_BASIS_THREADS", "1").output().unwrap();
    assert!(out.status.success());
    assert_eq!(std::fs::read(&file).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn float_arithmetic_checks_kernel_residual() {
    let dir = tempfile::tempdir().unwrap();
    let file = build(dir.path(), 2);
    let out = run(&["--arithmetic", "float", "basis", "verify", path(&file)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["arithmetic"], "float");
}

#[test]
fn tight_tolerance_is_an_invariant_failure() {
    let dir = tempfile::tempdir().unwrap();
    let file = build(dir.path(), 2);
    let out = run(&["basis", "verify", path(&file), "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["passed"], false);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"max_degree": 2, "quad_order": 12}"#).unwrap();
    let file = dir.path().join("b.json");
    let out = run(&["--config", path(&cfg), "basis", "build", "--out", path(&file)]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["elements"], 13);
    let out = run(&["--config", path(&cfg), "basis", "build", "--max-degree", "3", "--out", path(&file)]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["elements"], 29);
    // 2 * 5 + 4 > 12
    let out = run(&["--config", path(&cfg), "basis", "build", "--max-degree", "5", "--out", path(&file)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn expanding_a_basis_element_recovers_it() {
    let dir = tempfile::tempdir().unwrap();
    let file = build(dir.path(), 2);
    let basis: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let h = dir.path().join("h.json");
    std::fs::write(&h, basis["elements"][7].to_string()).unwrap();
    let out = run(&["expand", "--basis", path(&file), "--input", path(&h), "--terms", "13"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["terms"], 13);
    assert_eq!(report["flagged"], true);
    let last = report["checkpoints"].as_array().unwrap().last().unwrap().clone();
    assert!(last["l2_residual"].as_f64().unwrap() < 1e-10, "{last}");
    assert!(report["partial_sum_hardy2"].as_f64().unwrap() > 0.0);

    let out = run(&["expand", "--basis", path(&file), "--input", path(&h), "--terms", "99"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn poisson_extension_reproduces_linear_data() {
    let dir = tempfile::tempdir().unwrap();
    // x0 i1 + x1
    let f = dir.path().join("f.json");
    std::fs::write(
        &f,
        r#"{"n":4,"l":1,"terms":[{"coeff":[[0,1,0,0]],"beta":[1,0,0,0],"s":0},{"coeff":[[1,0,0,0]],"beta":[0,1,0,0],"s":0}]}"#,
    )
    .unwrap();
    let pts = dir.path().join("p.json");
    std::fs::write(&pts, "[[0.1, 0.2, 0.0, 0.0], [-0.3, 0.4, 0.5, 0.1]]").unwrap();
    for (order, tol) in [("24", 1e-3), ("60", 1e-8)] {
        let out = run(&["--quad-order", order, "poisson", "extend", "--boundary", path(&f), "--points", path(&pts)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        for row in stdout_json(&out).as_array().unwrap() {
            let p: Vec<f64> = serde_json::from_value(row["point"].clone()).unwrap();
            let v: Vec<Vec<f64>> = serde_json::from_value(row["value"].clone()).unwrap();
            let estimate = row["error_estimate"].as_f64().unwrap();
            let err = (v[0][0] - p[1]).hypot(v[0][1] - p[0]).hypot(v[0][2]).hypot(v[0][3]);
            assert!(err < tol && err <= 2.0 * estimate + 1e-12, "order {order}: error {err}, estimate {estimate}");
        }
    }

    std::fs::write(&pts, "[[1.0, 0.0, 0.0, 0.0]]").unwrap();
    let out = run(&["poisson", "extend", "--boundary", path(&f), "--points", path(&pts)]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn approximation_from_builtin_and_file_targets() {
    let out = run(&["approx", "fit", "--target", "conj", "--degree", "1", "--grid", "7"]);
    assert!(out.status.success());
    assert!(stdout_json(&out)["sup_error"].as_f64().unwrap() < 1e-12);

    let dir = tempfile::tempdir().unwrap();
    let samples: Vec<Value> = (0..40)
        .map(|i| {
            let t = i as f64 / 40.0;
            let x = [t - 0.5, (3.0 * t).sin() * 0.4, t * t - 0.3, 0.2 - t * 0.1 * (i % 3) as f64];
            serde_json::json!({"point": x, "value": [2.0 * x[0] - x[3], x[1], 0.0, 1.0]})
        })
        .collect();
    let file = dir.path().join("s.json");
    std::fs::write(&file, serde_json::to_string(&samples).unwrap()).unwrap();
    let out = run(&["approx", "fit", "--target", path(&file), "--degree", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["samples"], 40);
    assert!(report["sup_error"].as_f64().unwrap() < 1e-10);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"elements\": [\n    oops\n").unwrap();
    let out = run(&["basis", "verify", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("bad.json") && msg.contains("line 3"), "{msg}");

    assert_eq!(run(&["basis", "frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["approx", "fit", "--target", "unknown", "--degree", "1"]).status.code(), Some(2));
    let out = bin().args(["verify", "all", "--criterion", "1"]).env("DIRAC_BASIS_THREADS", "0").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_all_runs_selected_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = run(&["verify", "all", "--criterion", "1", "--criterion", "6", "--out", path(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2, "{text}");
    let outcomes: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(outcomes.as_array().unwrap().len(), 2);
    assert_eq!(run(&["verify", "all", "--criterion", "15"]).status.code(), Some(2));
}
