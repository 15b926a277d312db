use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn catalog_file(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("catalog")
        .join(format!("{name}.json"))
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coorbit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const BROKEN: &str = r#"{
  "name": "broken",
  "dim": 3,
  "basis": ["a", "b", "c"],
  "brackets": [
    { "i": 0, "j": 1, "terms": [ { "k": 2, "c": 1 } ] },
    { "i": 0, "j": 2, "terms": [ { "k": 0, "c": 1 } ] }
  ]
}"#;

#[test]
fn classify_su2_is_compact_with_orbit_dim_two() {
    let out = run(&["classify", &catalog_file("su2"), "--covector", "0,0,1", "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = stdout_json(&out);
    assert_eq!(report["output"]["verdict"], "compact");
    assert_eq!(report["output"]["orbit_dim"], 2);
    assert_eq!(report["command"][0], "classify");
    assert_eq!(report["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(report.get("wall_time_s").is_none());
}

#[test]
fn catalog_prefix_resolves_builtin_entries() {
    let out = run(&["classify", "catalog:su2", "--covector", "0,0,1", "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["output"]["verdict"], "compact");
}

#[test]
fn broken_jacobi_exits_one_with_residual_message() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, BROKEN).unwrap();
    let out = run(&["classify", path.to_str().unwrap(), "--covector", "1,0,0"]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("Jacobi"), "{err}");
    assert!(err.contains("residual"), "{err}");
}

#[test]
fn validate_and_structure_succeed_on_catalog_files() {
    let out = run(&["validate", &catalog_file("heisenberg3"), "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["output"]["dim"], 3);

    let out = run(&["structure", &catalog_file("se3"), "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["output"]["radical_dim"], 3);
    assert_eq!(v["output"]["gn_dim"], 3);
    assert_eq!(v["output"]["simple_ideals"][0]["compact"], true);
}

#[test]
fn both_covector_sources_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    std::fs::write(&path, r#"{"f": [0, 0, 1]}"#).unwrap();
    let out = run(&[
        "classify",
        &catalog_file("su2"),
        "--covector",
        "0,0,1",
        "--covector-file",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);

    let out = run(&["classify", &catalog_file("su2"), "--covector-file", path.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["output"]["verdict"], "compact");
}

#[test]
fn malformed_inputs_exit_one() {
    let su2 = catalog_file("su2");
    assert_eq!(code(&run(&["classify", &su2, "--covector", "0,x,1"])), 1);
    assert_eq!(code(&run(&["classify", &su2, "--covector", "0,1"])), 1);
    assert_eq!(code(&run(&["classify", &su2])), 1);
    assert_eq!(code(&run(&["classify", "catalog:nope", "--covector", "1"])), 1);
    assert_eq!(code(&run(&["classify", "/nonexistent/g.json", "--covector", "1"])), 1);
    assert_eq!(code(&run(&["catalog", "show", "nope"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
}

#[test]
fn negative_inline_entries_parse() {
    let out = run(&["classify", &catalog_file("su2"), "--covector", "-1,0,0.5", "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["output"]["verdict"], "compact");
}

#[test]
fn ambiguous_rank_exits_two() {
    let out = run(&["--tol-rank", "0.2", "structure", &catalog_file("su2")]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn unwritable_output_exits_three() {
    let out = run(&["validate", &catalog_file("su2"), "--output", "/nonexistent-dir/out.json"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn output_flag_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = run(&["validate", &catalog_file("su2"), "--json", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["output"]["name"], "su2");
}

#[test]
fn witness_for_sl2r_has_rate_two() {
    let out = run(&["witness", &catalog_file("sl2R"), "--covector", "0,1,1", "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["output"]["verdict"], "unbounded");
    let w = &v["output"]["witness"];
    assert_eq!(w["kind"], "exponential");
    assert!((w["rate"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn witness_for_bounded_orbit_is_null() {
    let out = run(&["witness", &catalog_file("su2"), "--covector", "0,0,1", "--json"]);
    assert_eq!(code(&out), 0);
    assert!(stdout_json(&out)["output"]["witness"].is_null());
}

// The Heisenberg walk is diffusive, so 10^4 steps cannot certify escape.
// The documented behaviour is exit 0 with a non-bounded status.
#[test]
fn sample_heisenberg_runs_and_never_claims_bounded() {
    let h3 = catalog_file("heisenberg3");
    let args = ["sample", h3.as_str(), "--covector", "0,0,1", "--seed", "7", "--steps", "10000", "--json"];
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    let status = v["output"]["status"].as_str().unwrap();
    assert_ne!(status, "bounded");
    assert!(v["output"]["max_norm"].as_f64().unwrap() > 10.0);
    assert_eq!(v["output"]["steps"], 10000);
}

#[test]
fn json_runs_are_byte_identical() {
    let h3 = catalog_file("heisenberg3");
    let args = ["sample", h3.as_str(), "--covector", "1,0,1", "--seed", "3", "--steps", "2000", "--json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn multiple_seeds_keep_their_order() {
    let su2 = catalog_file("su2");
    let out = run(&["sample", &su2, "--covector", "0,0,1", "--seeds", "5,1,3", "--steps", "2000", "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    let seeds: Vec<u64> = v["output"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["seed"].as_u64().unwrap())
        .collect();
    assert_eq!(seeds, [5, 1, 3]);
}

#[test]
fn json_decomposition_reconstructs_the_covector() {
    let f = [0.1, 0.2, 0.3, 0.7, 0.11, 0.0];
    let inline = f.map(|x| x.to_string()).join(",");
    let out = run(&["classify", &catalog_file("su2_plus_heisenberg3"), "--covector", &inline, "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["output"]["verdict"], "compact");
    let f1: Vec<f64> = serde_json::from_value(v["output"]["f1"].clone()).unwrap();
    let h: Vec<f64> = serde_json::from_value(v["output"]["compact_part"]["covector"].clone()).unwrap();
    let embedding: Vec<Vec<f64>> =
        serde_json::from_value(v["output"]["compact_part"]["embedding"].clone()).unwrap();
    assert_eq!(embedding.len(), h.len());
    for i in 0..f.len() {
        let embedded: f64 = embedding.iter().zip(&h).map(|(col, hc)| col[i] * hc).sum();
        assert!((f1[i] + embedded - f[i]).abs() < 1e-12, "coordinate {i}");
    }
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);
}

#[test]
fn catalog_list_and_show() {
    let out = run(&["catalog", "list", "--json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert!(v["output"].as_array().unwrap().len() >= 12);

    let out = run(&["catalog", "show", "aff1", "--json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["output"]["dim"], 2);
    assert_eq!(v["output"]["expected"]["radical_dim"], 2);
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
}
