//! End-to-end runs of the command line front end.

use std::path::Path;

use hyperreg::cli::{run_captured, RunOutput, EXIT_CAP, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, REPORT_SCHEMA};
use serde_json::Value;

fn run(args: &[&str]) -> RunOutput {
    run_captured(std::iter::once("hyperreg").chain(args.iter().copied()))
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn json_of(out: &RunOutput) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", out.stdout))
}

fn assert_valid(v: &Value) {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(v) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{e} at {}", e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "report does not validate: {msgs:?}");
}

#[test]
fn construct_then_measure_vdisc3() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "hp5.3g");
    let out = run(&["construct", "--family", "HP", "--k", "5", "--out", &g, "--json"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v = json_of(&out);
    assert_valid(&v);
    assert_eq!(v["report"]["vertices"], 15);

    let out = run(&["measure", "--metric", "vdisc3", "--in", &g, "--json"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v = json_of(&out);
    assert_valid(&v);
    assert!(v["report"]["deviation"].is_string());
    assert_eq!(v["report"]["exact"], true);
}

#[test]
fn malformed_3g_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "bad.3g");
    std::fs::write(&g, "3graph 5\n0 1 2\n0 1 x\n").unwrap();
    let out = run(&["measure", "--metric", "vdisc3", "--in", &g, "--parts", "1,2,2"]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("line 3"), "{}", out.stderr);
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_input_is_usage() {
    let out = run(&["measure", "--metric", "disc2", "--in", "/nonexistent/graph.bip"]);
    assert_eq!(out.code, EXIT_USAGE);
}

#[test]
fn caps_give_exit_three() {
    let out = run(&["construct", "--family", "U", "--k", "20", "--vertex-cap", "1000"]);
    assert_eq!(out.code, EXIT_CAP, "{}", out.stderr);

    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "hp10.3g");
    assert_eq!(run(&["construct", "--family", "HP", "--k", "10", "--out", &g]).code, EXIT_OK);
    let out = run(&["measure", "--metric", "vdisc3", "--in", &g, "--cap-exact-vdisc3", "8"]);
    assert_eq!(out.code, EXIT_CAP, "{}", out.stderr);
    // sampling lifts the cap
    let out = run(&["measure", "--metric", "vdisc3", "--in", &g, "--cap-exact-vdisc3", "8", "--samples", "50", "--json"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert_eq!(json_of(&out)["report"]["exact"], false);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "hp6.3g");
    let d = path(dir.path(), "d.json");
    let m = path(dir.path(), "manifest.json");
    assert_eq!(run(&["construct", "--family", "HP", "--k", "6", "--out", &g]).code, EXIT_OK);
    let args = ["decompose", "build", "--in", &g, "--t", "3", "--l", "2", "--seed", "11", "--out", &d, "--json", "--manifest", &m];
    let first = run(&args);
    assert_eq!(first.code, EXIT_OK, "{}", first.stderr);
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["input_hashes"].as_object().unwrap().len(), 1);
    let argv: Vec<String> = manifest["command_line"].as_array().unwrap().iter().map(|a| a.as_str().unwrap().to_string()).collect();
    let second = run_captured(argv.clone());
    assert_eq!(first.stdout, second.stdout);
    let third = run_captured(argv.into_iter().chain(["--threads".to_string(), "1".to_string()]));
    assert_eq!(first.stdout, third.stdout);
    assert_valid(&json_of(&first));

    let other = run(&["decompose", "build", "--in", &g, "--t", "3", "--l", "2", "--seed", "12", "--json"]);
    assert_ne!(json_of(&first)["report"]["decomposition"], json_of(&other)["report"]["decomposition"]);
}

#[test]
fn decompose_classify_and_shape() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "w.3g");
    let d = path(dir.path(), "d.json");
    assert_eq!(run(&["construct", "--family", "HP", "--k", "8", "--out", &g]).code, EXIT_OK);
    assert_eq!(run(&["decompose", "build", "--in", &g, "--t", "3", "--l", "2", "--out", &d]).code, EXIT_OK);
    for action in ["classify", "error-shape"] {
        let out = run(&["decompose", action, "--in", &g, "--decomp", &d, "--json"]);
        assert_eq!(out.code, EXIT_OK, "{action}: {}", out.stderr);
        assert_valid(&json_of(&out));
    }
    let d2 = path(dir.path(), "d2.json");
    let r = path(dir.path(), "r.json");
    assert_eq!(run(&["decompose", "build", "--in", &g, "--t", "3", "--l", "2", "--seed", "4", "--out", &d2]).code, EXIT_OK);
    let out = run(&["decompose", "refine", "--decomp", &d, "--with", &d2, "--out", &r, "--json"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert!(Path::new(&r).exists());
}

#[test]
fn detect_half_graph_in_hp() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "h4.bip");
    assert_eq!(run(&["construct", "--family", "H", "--k", "4", "--out", &g]).code, EXIT_OK);
    let out = run(&["detect", "--in", &g, "--pattern", "H:3", "--json"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v = json_of(&out);
    assert_valid(&v);
    assert_eq!(v["report"]["status"], "FOUND");
    let out = run(&["detect", "--in", &g, "--pattern", "H:5", "--json"]);
    assert_eq!(json_of(&out)["report"]["status"], "ABSENT_CERTIFIED");
}

#[test]
fn partition_stable_goodsets1() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "h8.bip");
    assert_eq!(run(&["construct", "--family", "H", "--k", "8", "--out", &g]).code, EXIT_OK);
    let out = run(&["partition-stable", "--alg", "goodsets1", "--in", &g, "--schedule", "f=geometric:0.5", "--d", "4", "--json"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert_valid(&json_of(&out));
    let out = run(&["partition-stable", "--alg", "goodsets1", "--in", &g, "--d", "1"]);
    assert_ne!(out.code, EXIT_OK);
}

#[test]
fn special_verify_gs() {
    let out = run(&["special-verify", "--family", "gs", "--params", "p=3,n=2,rho=1/27", "--axioms", "1-9", "--json"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v = json_of(&out);
    assert_valid(&v);
    assert_eq!(v["report"]["axioms"].as_array().unwrap().len(), 9);
    assert_eq!(run(&["special-verify", "--family", "gs", "--axioms", "10"]).code, EXIT_USAGE);
}

#[test]
fn witnesses() {
    let out = run(&["witness", "--kind", "split", "--family", "gs", "--params", "p=3,n=2", "--r", "1/9", "--x", "0", "--y", "0", "--json"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert_valid(&json_of(&out));
    let out = run(&["witness", "--kind", "hbark", "--n", "30", "--t", "3", "--json"]);
    assert!(out.code == EXIT_OK || out.code == EXIT_VERIFY, "{}", out.stderr);
    assert_eq!(json_of(&out)["report"]["edges_ok"], true);
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "hp30.3g");
    assert_eq!(run(&["construct", "--family", "HP", "--k", "30", "--out", &g]).code, EXIT_OK);
    let out = run(&["witness", "--kind", "mixed", "--in", &g, "--t", "6", "--json"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
}

#[test]
fn suite_fast_tier_passes() {
    let out = run(&["suite", "--tier", "fast", "--json"]);
    assert_eq!(out.code, EXIT_OK, "{}\n{}", out.stdout, out.stderr);
    let v = json_of(&out);
    assert_valid(&v);
    assert_eq!(v["report"]["passed"], v["report"]["total"]);
}

#[test]
fn schema_rejects_malformed_reports() {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    let good = json_of(&run(&["special-verify", "--family", "gs", "--axioms", "1", "--json"]));
    assert!(compiled.is_valid(&good));
    let mut bad = good.clone();
    bad["command"] = Value::String("frobnicate".into());
    assert!(!compiled.is_valid(&bad));
    let mut bad = good.clone();
    bad["report"]["axioms"][0]["axiom"] = Value::from(12);
    assert!(!compiled.is_valid(&bad));
    let mut bad = good;
    bad.as_object_mut().unwrap().remove("version");
    assert!(!compiled.is_valid(&bad));
}
