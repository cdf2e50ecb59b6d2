use std::process::{Command, Output};

fn phcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

#[test]
fn normalize_matches_the_documented_wire() {
    let out = phcalc(&["normalize", "-n", "2", "p1 + (p2 v 0)"]);
    assert!(out.status.success());
    assert_eq!(
        stdout_of(&out).trim(),
        r#"{"n":2,"clauses":[[["1","0"]],[["1","1"]]]}"#
    );
}

#[test]
fn eval_prints_exact_values() {
    let out = phcalc(&["eval", "-n", "3", "p1 v (p2 + p3)", "--at", "1,1/2,1/2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["value"], "1");
    assert_eq!(v["agree"], true);
}

#[test]
fn demo_lex_emits_a_contradiction_certificate() {
    let out = phcalc(&["demo", "lex"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["route_a"], "0");
    assert_eq!(v["route_b"], "1");
    assert_eq!(v["lambda"], "1");
    assert_eq!(v["contradiction"], true);
    assert_eq!(v["forced"]["c1"], "1");
}

#[test]
fn axioms_pass_on_the_honest_lex_oracle() {
    let out = phcalc(&["axioms", "--model", "lex", "--trials", "200", "--seed", "7"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["seed"], 7);
}

#[test]
fn corrupted_axioms_fail_with_exit_one() {
    let out = phcalc(&[
        "axioms", "--model", "finite", "--corrupt", "sum", "--trials", "50", "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["all_pass"], false);
    let refl = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "reflexivity")
        .unwrap();
    assert_eq!(refl["pass"], false);
    assert!(refl["witness"].is_array());
}

#[test]
fn same_seed_gives_byte_identical_reports() {
    let args = ["axioms", "--model", "pl", "--trials", "60", "--seed", "11"];
    let a = phcalc(&args);
    let b = phcalc(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_two() {
    let out = phcalc(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn operational_errors_exit_one_with_a_json_error() {
    let out = phcalc(&["calculus", "--model", "finite", "--x", "(1,0)", "--g", "euclid"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert!(v["error"].is_string());
}

#[test]
fn probe_exact_agrees_with_interval() {
    let out = phcalc(&["probe", "-n", "2", "p1 + (p2 v 0)", "--exact"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["exact"], "2");
    assert_eq!(v["lower"], "2");
}

#[test]
fn verify_comp_passes_on_an_exact_instance() {
    let out = phcalc(&[
        "verify-comp",
        "--model",
        "finite",
        "--x",
        "[1,2];[3,-1]",
        "--g",
        "p1 ^ p2",
        "--fs",
        "p1 v p2; p1 + p2",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["discrepancy"], "0");
}

#[test]
fn certificates_roundtrip_through_replay() {
    let dir = std::env::temp_dir().join(format!("phcalc-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cert = dir.join("euclid.json");
    let cert_str = cert.to_str().unwrap();

    let out = phcalc(&[
        "approx", "--target", "euclid", "-n", "2", "--eps", "0.1", "--out", cert_str,
    ]);
    assert!(out.status.success(), "{}", stdout_of(&out));

    let out = phcalc(&["approx", "--replay", cert_str]);
    assert!(out.status.success(), "{}", stdout_of(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["matches"], true);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn germ_calculus_runs_through_the_quotient() {
    let out = phcalc(&[
        "calculus",
        "--model",
        "germ",
        "--x",
        "0:0,1:1;0:1,1:1",
        "--g",
        "p1 ^ p2",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["mode"], "exact");
}

#[test]
fn demo_sweep_reports_zero_survivors() {
    let out = phcalc(&["demo", "sweep", "--per-face", "10"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["survivors"], 0);
}
