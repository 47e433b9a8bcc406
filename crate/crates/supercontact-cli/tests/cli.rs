use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supercontact")).args(args).output().expect("spawn supercontact")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("supercontact-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn cross_ratio_of_0123_is_four_thirds() {
    let o = run(&["eval", "cross-ratio", "--points", &data("points_0123.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "4/3");
}

#[test]
fn cross_ratio_json_output() {
    let o = run(&["eval", "cross-ratio", "--points", &data("points_0123.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.to_string().contains("4/3"), "{v}");
}

#[test]
fn euclid_invariant_has_even_and_odd_parts() {
    let o = run(&["eval", "euclid", "--points", &data("points_pair_n1.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("even = ") && s.contains("odd[1] = "), "{s}");
}

#[test]
fn homography_has_zero_schwarzian() {
    let o = run(&["eval", "cocycle", "--which", "S", "--map", &data("homography_n1.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    let line = s.lines().find(|l| l.starts_with("S = ")).expect("S line");
    let jet: serde_json::Value = serde_json::from_str(&line[4..]).unwrap();
    assert_eq!(jet["terms"], serde_json::json!([]), "{line}");
}

#[test]
fn classical_schwarzian_of_x_squared() {
    let o = run(&["eval", "cocycle", "--which", "s", "--map", &data("x_squared.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains(r#""value":"-3/2""#));
}

#[test]
fn euclid_cocycle_keeps_irrational_log_symbolic() {
    let o = run(&["eval", "cocycle", "--which", "E", "--map", &data("k1_germ.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("log_body = log(25/9)"));
}

#[test]
fn malformed_input_reports_location() {
    let bad = tmp("bad.json");
    std::fs::write(&bad, "{\"points\": [{\"x\": [{\"mask\": [], \"value\": \"1\"}]},\n").unwrap();
    let o = run(&["eval", "cross-ratio", "--points", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2 column"), "{}", stderr(&o));

    std::fs::write(&bad, r#"{"points": [{"x": [{"mask": [0], "value": "1"}]}]}"#).unwrap();
    let o = run(&["eval", "cross-ratio", "--points", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("points[0].x[0].mask"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--seed", "x"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "cross-ratio", "--points", "/nonexistent/p.json"]).status.code(), Some(2));
    assert_eq!(run(&["cartan", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn verify_algebra_passes() {
    let o = run(&["verify", "--suite", "algebra", "--field", "rational", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("6/6 checks passed"));
}

#[test]
fn verify_cartan_n2_passes() {
    let o = run(&["verify", "--suite", "cartan", "--n", "2", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn failing_check_exits_1_and_report_keeps_inputs() {
    let out = tmp("fail.json");
    let o = run(&["verify", "--field", "f64", "--only", "cocycles.law_k2.n2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL cocycles.law_k2.n2"));
    let raw: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let inputs = raw["results"][0]["first_failure"]["inputs"].as_array().unwrap().clone();
    assert_eq!(inputs.len(), 2);

    let r = run(&["report", "--input", out.to_str().unwrap(), "--format", "json"]);
    assert_eq!(r.status.code(), Some(0));
    let rep: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(rep["failures"][0]["first_failure"]["inputs"], serde_json::Value::Array(inputs));
}

#[test]
fn report_is_deterministic() {
    let a = tmp("a.json");
    let b = tmp("b.json");
    for p in [&a, &b] {
        let o = run(&["verify", "--suite", "invariants", "--seed", "11", "--trials", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let ra = run(&["report", "--input", a.to_str().unwrap(), "--format", "json"]);
    let rb = run(&["report", "--input", b.to_str().unwrap(), "--format", "json"]);
    assert_eq!(ra.stdout, rb.stdout);
}

#[test]
fn empty_run_gives_empty_summary() {
    let out = tmp("empty.json");
    let o = run(&["verify", "--only", "no.such.check", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = run(&["report", "--input", out.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["summary"]["suites"], serde_json::json!([]));
    assert_eq!(v["failures"], serde_json::json!([]));
}

#[test]
fn cartan_x_squared_matches() {
    let o = run(&["cartan", "--n", "0", "--map", &data("x_squared.json"), "--field", "builtin:dx"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("eps^2: lhs = -1/4\n       rhs = -1/4"), "{s}");
    assert!(s.contains("S0(t1) = -3/2"), "{s}");
    assert!(s.lines().any(|l| l.starts_with("match")), "{s}");
}

#[test]
fn cartan_random_instances_match() {
    for n in ["1", "2"] {
        let o = run(&["cartan", "--n", n, "--seed", "5"]);
        assert_eq!(o.status.code(), Some(0), "N={n}: {}{}", stdout(&o), stderr(&o));
    }
}

#[test]
fn matrix_eval_prints_relation_residual() {
    let o = run(&["eval", "matrix", "--matrix", &data("spo21_matrix.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("relation_residual = 0"), "{}", stdout(&o));
}
