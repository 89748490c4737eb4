use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symdesign"))
        .args(args)
        .env_remove("SYMDESIGN_THREADS")
        .env("RUST_LOG", "off")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn table_matches_golden_file() {
    let out = run(&["--deterministic", "table"]);
    assert!(out.status.success());
    let golden = std::fs::read(fixture("golden/table.json")).unwrap();
    assert!(
        out.stdout == golden,
        "table output drifted from tests/golden/table.json"
    );
}

#[test]
fn table_cells_agree_with_closed_forms() {
    let v = json(&run(&["--deterministic", "table", "--max-n", "12"]));
    assert_eq!(v["outputs"]["all_agree"], true);
    let cells = v["outputs"]["cells"].as_array().unwrap();
    // three symmetries, k = 2, 3, 4, n = k+1..=12
    assert_eq!(cells.len(), 3 * (10 + 9 + 8));
    let cell = cells
        .iter()
        .find(|c| c["symmetry"] == "su2" && c["n"] == 9 && c["k"] == 2)
        .unwrap();
    assert_eq!(cell["bound"], "48");
    assert_eq!(cell["closed_form"]["regime"], "tight");
    assert_eq!(cell["relation"], "equal");
}

#[test]
fn order_reports_bound_witness_and_record_fields() {
    let out = run(&["--deterministic", "order", "--sym", "u1", "--n", "6", "--k", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["command"], "order");
    assert!(v.get("version").is_some());
    assert!(v.get("timings").is_none());
    let bound = &v["outputs"]["bound"];
    assert_eq!(bound["value"], "10");
    assert_eq!(bound["max_design_order"], "9");
    assert_eq!(bound["optimal"], true);
    assert_eq!(v["outputs"]["certificate"]["saturated"], true);
}

#[test]
fn timings_present_unless_deterministic() {
    let v = json(&run(&["order", "--sym", "z2", "--n", "4", "--k", "2"]));
    assert!(v["timings"]["wall_seconds"].is_number());
}

#[test]
fn shortcut_flag_does_not_change_the_bound() {
    let a = json(&run(&["--deterministic", "order", "--sym", "su2", "--n", "9", "--k", "2"]));
    let b = json(&run(&[
        "--deterministic", "order", "--sym", "su2", "--n", "9", "--k", "2", "--no-shortcut",
    ]));
    assert_eq!(a["outputs"]["bound"]["value"], "48");
    assert_eq!(b["outputs"]["bound"]["value"], "48");
}

#[test]
fn trivial_lattice_reports_infinite() {
    let v = json(&run(&["--deterministic", "order", "--sym", "su2", "--n", "3", "--k", "2"]));
    assert_eq!(v["outputs"]["bound"]["value"], "infinite");
    assert!(v["outputs"]["closed_form"]["unavailable"].is_string());
}

#[test]
fn invalid_locality_exits_with_code_2() {
    let out = run(&["order", "--sym", "u1", "--n", "3", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("locality"));
}

#[test]
fn exhausted_budget_exits_with_code_3_and_marks_upper_bound() {
    let out = run(&[
        "--deterministic", "order", "--sym", "su2", "--n", "20", "--k", "4", "--budget", "10",
        "--no-shortcut",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["outputs"]["status"], "budget_exhausted");
    assert_eq!(v["outputs"]["bound"]["optimal"], false);
}

#[test]
fn custom_file_reproduces_builtin_u1() {
    let path = fixture("fixtures/u1_n4_k2.json");
    let v = json(&run(&[
        "--deterministic", "order", "--sym", "custom", "--custom", path.to_str().unwrap(),
    ]));
    assert_eq!(v["outputs"]["bound"]["value"], "6");
    assert_eq!(v["outputs"]["closed_form"], Value::Null);
    assert!(!v["outputs"]["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn validate_custom_rejects_missing_assertion() {
    let ok = run(&["validate-custom", "--custom", fixture("fixtures/u1_n4_k2.json").to_str().unwrap()]);
    assert!(ok.status.success());
    assert_eq!(json(&ok)["outputs"]["lattice_rank"], 2);
    let bad = run(&[
        "validate-custom", "--custom", fixture("fixtures/not_semi_universal.json").to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn frame_potential_is_reproducible_across_thread_counts() {
    let args = [
        "--deterministic", "frame-potential", "--sym", "u1", "--n", "3", "--t", "2", "--samples", "600",
        "--seed", "7",
    ];
    let one = Command::new(env!("CARGO_BIN_EXE_symdesign"))
        .args(args)
        .env("SYMDESIGN_THREADS", "1")
        .output()
        .unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_symdesign"))
        .args(args)
        .env("SYMDESIGN_THREADS", "4")
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let v = json(&one);
    assert_eq!(v["seeds"]["rng_seed"], 7);
    assert!(v["outputs"]["estimate"]["mean"].as_f64().unwrap() > 1.0);
}

#[test]
fn design_test_out_of_range_is_invalid_input() {
    let out = run(&["design-test", "--sym", "u1", "--n", "9", "--k", "2", "--t", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn design_test_first_moment_is_consistent() {
    let v = json(&run(&[
        "--deterministic", "design-test", "--sym", "z2", "--n", "3", "--k", "2", "--t", "1",
        "--samples", "800",
    ]));
    assert_eq!(v["outputs"]["verdict"], "consistent");
    assert_eq!(v["outputs"]["predicted_bound"], "4");
}

#[test]
fn u1_k5_below_tight_range_is_flagged_upper_bound() {
    let v = json(&run(&[
        "--deterministic", "table", "--syms", "u1", "--ks", "5", "--max-n", "20",
    ]));
    let cell = v["outputs"]["cells"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(cell["n"], 20);
    assert_eq!(cell["closed_form"]["regime"], "upper_bound_only");
    assert!(cell["relation"] == "below" || cell["relation"] == "equal");
    assert_eq!(cell["agrees"], true);
}

#[test]
fn z2_column_constant_in_k() {
    let v = json(&run(&["--deterministic", "table", "--syms", "z2", "--max-n", "9"]));
    let cells = v["outputs"]["cells"].as_array().unwrap();
    for n in 5..=9 {
        let values: Vec<&Value> = cells.iter().filter(|c| c["n"] == n).map(|c| &c["bound"]).collect();
        assert_eq!(values.len(), 3);
        assert!(values.iter().all(|b| **b == Value::String((1u64 << (n - 1)).to_string())));
    }
}

#[test]
fn z2_order_example() {
    let v = json(&run(&["--deterministic", "order", "--sym", "z2", "--n", "5", "--k", "4"]));
    assert_eq!(v["outputs"]["bound"]["value"], "16");
}

/// A record's inputs are enough to reproduce its outputs.
#[test]
fn run_record_round_trip() {
    let first = json(&run(&[
        "--deterministic", "frame-potential", "--ensemble", "circuit", "--sym", "z2", "--n", "3",
        "--depth", "6", "--t", "2", "--samples", "300", "--estimator", "all-pairs", "--seed", "42",
    ]));
    let i = &first["inputs"];
    let seed = first["seeds"]["rng_seed"].to_string();
    let args: Vec<String> = [
        "--deterministic", "frame-potential", "--ensemble", i["ensemble"].as_str().unwrap(),
        "--sym", i["sym"].as_str().unwrap(), "--n", &i["n"].to_string(), "--k", &i["k"].to_string(),
        "--depth", &i["depth"].to_string(), "--t", &i["t"].to_string(),
        "--samples", &i["samples"].to_string(), "--estimator", i["estimator"].as_str().unwrap(),
        "--seed", &seed,
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    assert_eq!(json(&run(&refs)), first);
}
