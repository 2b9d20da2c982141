use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn credal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_credal")).args(args).env_remove("CREDAL_SEED").output().expect("spawn credal")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn repair_projects_symmetric_incoherent_pair_to_the_midpoint() {
    let out = credal(&["dominance", "--repair", "-c", &fixture("c_incoherent.json"), "-m", &fixture("brier.json"), "--mode", "rational"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = stdout_json(&out);
    assert_eq!(r["verdict"], "StronglyDominates");
    assert_eq!(r["case"], "projection");
    assert_eq!(r["pi_c"], serde_json::json!(["1/2", "1/2"]));
    assert_eq!(r["gap"], "2/25");
    assert_eq!(r["pythagorean_worst_slack"].as_f64(), Some(0.0));
}

#[test]
fn repair_in_float_mode_reports_gap_near_008() {
    let out = credal(&["dominance", "--repair", "-c", &fixture("c_incoherent.json"), "-m", &fixture("brier.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    let pi: Vec<f64> = r["pi_c"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(pi.iter().all(|x| (x - 0.5).abs() < 1e-9));
    assert!((r["gap"].as_f64().unwrap() - 0.08).abs() < 1e-9);
}

#[test]
fn compare_two_credences_with_csv() {
    let csv = std::env::temp_dir().join(format!("credal-cli-test-{}.csv", std::process::id()));
    let out = credal(&[
        "dominance", "-c", &fixture("c_incoherent.json"), "-d", &fixture("c_coherent.json"),
        "-m", &fixture("brier.json"), "--mode", "rational", "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verdict"], "StronglyDominates");
    let table = std::fs::read_to_string(&csv).unwrap();
    std::fs::remove_file(&csv).ok();
    assert_eq!(table.lines().next(), Some("atom,world,score_c,score_d,comparison"));
    assert!(table.contains("0,1,29/50,1/2,less"));
}

#[test]
fn reproduce_tails_example_succeeds() {
    let out = credal(&["reproduce", "ex4.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["all_assertions_pass"], true);
}

#[test]
fn unknown_example_is_a_precondition_error() {
    let out = credal(&["reproduce", "ex9.9"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout_json(&out)["error"], "unknown-example");
}

#[test]
fn out_of_range_credence_exits_3() {
    let out = credal(&["coherence", "-c", &fixture("c_out_of_range.json")]);
    assert_eq!(out.status.code(), Some(3));
    let r = stdout_json(&out);
    assert_eq!(r["error"], "invalid-credence");
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid-credence"));
}

#[test]
fn malformed_json_exits_2_with_location() {
    let out = credal(&["coherence", "-c", &fixture("c_malformed.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("c_malformed.json") && err.contains("line"), "{err}");
}

#[test]
fn missing_file_exits_2() {
    let out = credal(&["coherence", "-c", &fixture("does_not_exist.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["stability", "-s", &fixture("tails.json"), "-m", &fixture("generalized_brier.json"), "--budget", "50"];
    let a = credal(&args);
    let b = credal(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let p = ["project", "-c", &fixture("c_incoherent.json"), "-m", &fixture("brier.json")];
    assert_eq!(credal(&p).stdout, credal(&p).stdout);
}

#[test]
fn seed_env_overrides_flag() {
    let args = ["reproduce", "walsh", "--samples", "3", "--seed", "7"];
    let flag = credal(&args);
    let env = Command::new(env!("CARGO_BIN_EXE_credal")).args(args).env("CREDAL_SEED", "0x2a").output().unwrap();
    assert_eq!(stdout_json(&flag)["seed"], 7);
    assert_eq!(stdout_json(&env)["seed"], 42);
}

#[test]
fn coherence_with_partial_measure_oracle_agrees() {
    let out = credal(&["coherence", "-c", &fixture("c_incoherent.json"), "--tarski", "--mode", "rational"]);
    let r = stdout_json(&out);
    assert_eq!(r["status"], "incoherent");
    assert!(r["tarski"]["violations"].as_u64().unwrap() > 0);
    let ok = stdout_json(&credal(&["coherence", "-c", &fixture("c_coherent.json"), "--tarski"]));
    assert_eq!(ok["coherent"], true);
    assert_eq!(ok["tarski"]["violations"], 0);
}

#[test]
fn countable_score_and_quotient_verbs() {
    let s = stdout_json(&credal(&["score", "-c", &fixture("c_inv_sqrt.json"), "-m", &fixture("generalized_brier.json")]));
    let atoms = s["per_atom"].as_array().unwrap();
    assert!(!atoms.is_empty());
    assert!(atoms.iter().all(|a| a["score"]["inf"] == true));

    let q = stdout_json(&credal(&["quotient", "-s", &fixture("initial_segments.json"), "--truncation", "4"]));
    assert_eq!(q["atoms"].as_array().unwrap().len(), 5);

    let c = stdout_json(&credal(&["compactify", "-s", &fixture("tails.json")]));
    assert_eq!(c["compactness"]["verdict"], "non_compact_witness");
    assert_eq!(c["added_points"].as_array().unwrap().len(), 1);
}

fn schema_required(name: &str) -> Vec<String> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    schema["required"].as_array().unwrap().iter().map(|k| k.as_str().unwrap().to_string()).collect()
}

#[test]
fn verb_outputs_carry_schema_required_keys() {
    let cases: &[(&str, Vec<String>)] = &[
        ("coherence_report.schema.json", vec!["coherence".into(), "-c".into(), fixture("c_incoherent.json")]),
        ("score_report.schema.json", vec!["score".into(), "-c".into(), fixture("c_inv_sqrt.json"), "-m".into(), fixture("generalized_brier.json")]),
        ("dominance_report.schema.json", vec!["dominance".into(), "--repair".into(), "-c".into(), fixture("c_incoherent.json"), "-m".into(), fixture("brier.json")]),
        ("compactify_report.schema.json", vec!["compactify".into(), "-s".into(), fixture("tails.json")]),
        ("quotient_report.schema.json", vec!["quotient".into(), "-s".into(), fixture("initial_segments.json")]),
        ("stability_report.schema.json", vec!["stability".into(), "-s".into(), fixture("partition2.json"), "-m".into(), fixture("brier.json")]),
        ("reproduce_report.schema.json", vec!["reproduce".into(), "ex4.2".into()]),
    ];
    for (schema, args) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = credal(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let r = stdout_json(&out);
        for key in schema_required(schema) {
            assert!(r.get(&key).is_some(), "{schema}: missing {key}");
        }
    }
}

#[test]
fn explicit_space_flag_overrides_document_reference() {
    let out = credal(&["coherence", "-c", &fixture("c_incoherent.json"), "-s", &fixture("partition2.json"), "--mode", "rational"]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["status"], "incoherent");
    assert_eq!(r["certificate"]["kind"], "separating");
}
