use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn heatlaw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatlaw"))
        .args(args)
        .env_remove("HEATLAW_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = heatlaw(args);
    assert!(o.status.success(), "{args:?}: {}", stderr(&o));
    stdout(&o)
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn derive_mgt_reports_stability_number() {
    let out = ok(&["derive", "--preset", "mgt", "--a", "1", "--b", "1", "--c", "0.5"]);
    assert!(out.contains("order: 1"), "{out}");
    assert!(out.contains("classification: (vi) MGT equation"), "{out}");
    assert!(out.contains("stability number: 1/2"), "{out}");
}

#[test]
fn derive_dirac_with_zero_top_conductivity_is_heat() {
    let out = ok(&["derive", "--n", "1", "--epsilon", "0", "--kappa1", "0"]);
    assert!(out.contains("(i) heat equation"), "{out}");
}

#[test]
fn derive_json_carries_exact_tables() {
    let out = ok(&["derive", "--n", "2", "--epsilon", "1,1/2", "--omega", "0,1/3", "--kappa", "1,2,3", "--format", "json"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    // α_2 = (ε1 + ε2, ε1 ε2)
    assert_eq!(v["coefficients"]["alpha"], serde_json::json!(["3/2", "1/2"]));
    assert_eq!(v["params"]["kappa"], serde_json::json!(["1", "2", "3"]));
    assert_eq!(v["classification"], "general(order=5, memory=false)");
}

#[test]
fn omega_one_is_rejected_with_range() {
    let o = heatlaw(&["derive", "--n", "2", "--omega1", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("error: "), "{err}");
    assert!(err.contains("[0,1)"), "{err}");
    assert!(err.contains("ParameterSequence"), "{err}");
}

#[test]
fn preset_and_explicit_parameters_conflict() {
    let o = heatlaw(&["derive", "--preset", "heat", "--kappa", "1"]);
    assert!(!o.status.success());
}

#[test]
fn solve_heat_single_mode_decays_exponentially() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("heat.csv");
    ok(&[
        "solve", "--preset", "heat", "--modes", "1", "--final-time", "1", "--dt", "0.01", "--initial", "1",
        "--csv", csv.to_str().unwrap(),
    ]);
    let (header, rows) = read_csv(&csv);
    assert_eq!(header, ["t", "mode_1", "l2_norm", "l2_norm_dt"]);
    assert_eq!(rows.len(), 101);
    let lambda = std::f64::consts::PI * std::f64::consts::PI;
    for r in &rows {
        let exact = (-lambda * r[0]).exp();
        assert!((r[1] - exact).abs() <= 1e-8 * exact, "t={} got {} want {exact}", r[0], r[1]);
        // ‖sin(πx)‖ on (0, 1) is 1/√2
        assert!((r[2] - exact / 2f64.sqrt()).abs() <= 1e-8 * exact);
    }
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("heat.csv.json")).unwrap()).unwrap();
    assert_eq!(meta["classification"], "(i) heat equation");
    assert_eq!(meta["time_order"], 1);
    assert!(meta["diverged_at"].is_null());
    assert_eq!(meta["config"]["law"]["preset"], "heat");
}

#[test]
fn zero_initial_data_stays_zero() {
    let out = ok(&["solve", "--preset", "coleman-gurtin", "--modes", "3", "--final-time", "0.5", "--dt", "0.1", "--initial", "0", "--metadata", "/dev/null"]);
    let mut lines = out.lines();
    lines.next();
    for line in lines {
        for v in line.split(',').skip(1) {
            assert_eq!(v.parse::<f64>().unwrap(), 0.0, "{line}");
        }
    }
}

#[test]
fn supercritical_mgt_records_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("mgt.csv");
    let meta = dir.path().join("meta.json");
    let o = heatlaw(&[
        "solve", "--preset", "mgt", "--a", "1", "--b", "1", "--c", "2", "--modes", "4", "--final-time", "200",
        "--dt", "0.1", "--initial", "1,0,0", "--csv", csv.to_str().unwrap(), "--metadata", meta.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("diverged"));
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&meta).unwrap()).unwrap();
    let t = m["diverged_at"].as_f64().unwrap();
    assert!(t > 0.0 && t < 200.0);
    assert_eq!(m["stability_number"], "-1");
    let (_, rows) = read_csv(&csv);
    assert!(rows.last().unwrap()[0] <= t + 1e-12);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"law": {"preset": "heat"}, "domain": {"length": 1, "modes": 2},
            "time": {"final": 1, "dt": 0.1}, "initial": {"fourier": [[1], [1]]}}"#,
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    ok(&["solve", "--config", cfg.to_str().unwrap(), "--final-time", "0.2", "--csv", csv.to_str().unwrap()]);
    let (header, rows) = read_csv(&csv);
    assert_eq!(header.len(), 5);
    assert_eq!(rows.len(), 3);
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out.csv.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["time"]["final"], 0.2);
}

#[test]
fn solve_outputs_are_reproducible() {
    let args = ["solve", "--preset", "mgt-memory-1", "--modes", "3", "--final-time", "0.5", "--dt", "0.05", "--initial", "1,0,0"];
    let a = heatlaw(&args);
    let b = heatlaw(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}

#[test]
fn roots_of_subcritical_mgt_lie_left() {
    let out = ok(&["roots", "--preset", "mgt", "--a", "1", "--b", "1", "--c", "0.5", "--modes", "8"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let modes = v.as_array().unwrap();
    assert_eq!(modes.len(), 8);
    for m in modes {
        let roots = m["roots"].as_array().unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().all(|z| z["re"].as_f64().unwrap() < 0.0));
    }
    assert!(out.contains("9.8696044010893580e0"), "lambda_1 = π² with 17 digits");
}

#[test]
fn roots_of_heat_are_minus_lambda() {
    let out = ok(&["roots", "--preset", "heat", "--modes", "3"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    for m in v.as_array().unwrap() {
        let lambda = m["lambda"].as_f64().unwrap();
        let z = &m["roots"][0];
        assert!((z["re"].as_f64().unwrap() + lambda).abs() <= 1e-12 * lambda);
        assert_eq!(z["im"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn roots_with_memory_include_the_auxiliary() {
    // third-order MGT part plus one exponential auxiliary
    let out = ok(&["roots", "--preset", "mgt-memory-2", "--modes", "2"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["roots"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_is_deterministic_and_reports() {
    let a: Value = serde_json::from_str(&ok(&["verify", "--suite", "induction", "--seed", "5"])).unwrap();
    let b: Value = serde_json::from_str(&ok(&["verify", "--suite", "induction", "--seed", "5"])).unwrap();
    for key in ["suite", "cases", "failures", "seed", "passed"] {
        assert_eq!(a[key], b[key], "{key}");
    }
    assert_eq!(a["seed"], 5);
    assert!(a["wall_ms"].is_u64());
}

#[test]
fn verify_seed_falls_back_to_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_heatlaw"))
        .args(["verify", "--suite", "catalog"])
        .env("HEATLAW_SEED", "9")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 9);
    let v: Value = serde_json::from_str(&ok(&["verify", "--suite", "catalog"])).unwrap();
    assert_eq!(v["seed"], 42);
}

#[test]
fn verify_beta_passes() {
    let v: Value = serde_json::from_str(&ok(&["verify", "--suite", "beta"])).unwrap();
    assert_eq!(v["suite"], "beta");
    assert_eq!(v["passed"], true);
    assert_eq!(v["failures"], serde_json::json!([]));
}

#[test]
fn verify_all_aggregates_suites() {
    let v: Value = serde_json::from_str(&ok(&["verify"])).unwrap();
    assert_eq!(v["suite"], "all");
    assert_eq!(v["suites"].as_array().unwrap().len(), 8);
    assert_eq!(v["passed"], true);
}

#[test]
fn unknown_suite_is_an_error() {
    let o = heatlaw(&["verify", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}
