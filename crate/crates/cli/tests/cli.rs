//! End-to-end tests of the `lform` binary: verdicts, exit codes, JSON output
//! and determinism.

use std::process::{Command, Output};

use serde_json::Value;

fn lform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lform"))
        .args(args)
        .output()
        .expect("run lform")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON output")
}

/// The prompt of the standard space on (1, μ) over the given field.
fn standard_prompt(field: &str) -> String {
    let o = lform(&["--field", field, "--json", "standard", "--basis", r#"["1","mu"]"#]);
    assert_eq!(code(&o), 0);
    json(&o)["prompt"].to_string()
}

#[test]
fn standard_space_over_f4() {
    let o = lform(&["--field", "2^2", "standard", "--basis", r#"["1","mu"]"#]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("poles 3"));
    let o = lform(&["--field", "2^2", "--json", "standard", "--basis", r#"["1","mu"]"#]);
    let v = json(&o);
    assert_eq!(v["pole_count"], 3);
    assert_eq!(v["lambda"], 1);
}

#[test]
fn verify_verdicts() {
    let q = standard_prompt("3^2");
    let o = lform(&["verify", "--Q", &q]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("holds: true"));

    // A scaled copy no longer satisfies the criterion.
    let o = lform(&["--field", "3^2", "verify", "--Q", r#"[["1","0","1"],["0","0","mu"]]"#]);
    assert_eq!(code(&o), 1);
}

#[test]
fn build_with_scaling() {
    let o = lform(&["--field", "3^2", "build", "--scale", "--Q", r#"[["2","0","1"],["1+mu","0","mu"]]"#]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("poles 8"));
}

#[test]
fn residues_verdicts() {
    let ok = lform(&["--field", "5", "residues", "--num", "[1]", "--den", "[0,-1,0,0,0,1]"]);
    assert_eq!(code(&ok), 0);
    let bad = lform(&["--field", "5", "residues", "--num", "[1]", "--den", "[-2,0,1]"]);
    assert_eq!(code(&bad), 1);
}

#[test]
fn twist_pullback_and_equivalence() {
    let q = standard_prompt("3^2");
    let o = lform(&["twist", "--Q", &q, "--iterate", "2"]);
    assert_eq!(code(&o), 0);
    let o = lform(&["--json", "pullback", "--Q", &q, "--S", r#"["1","2"]"#]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["pole_count"], 8);
    let o = lform(&["--json", "equiv", "--Q1", &q, "--Q2", &q]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["equivalent"], true);
    // Non-étale S is an input error.
    let o = lform(&["pullback", "--Q", &q, "--S", r#"["0","0","1"]"#]);
    assert_eq!(code(&o), 2);
}

#[test]
fn char2_construction() {
    let o = lform(&["--field", "2^2", "--json", "char2", "--W", r#"[["1"],["mu"]]"#, "--R", "[]"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["lambda"], 1);
    assert_eq!(v["predicted_lambda"], 1);
}

#[test]
fn replays_succeed() {
    for target in ["l15-f27", "l15-f81", "l20"] {
        let o = lform(&["--json", "replay", target]);
        assert_eq!(code(&o), 0, "{target}");
    }
    let o = lform(&["--json", "replay", "l15-f27"]);
    assert_eq!(json(&o)["table_exact"], true);
    let o = lform(&["--field", "3^4", "--json", "replay", "l12"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["all_consistent"], true);
}

#[test]
fn search_is_deterministic_across_job_counts() {
    let args = |jobs: &'static str| {
        lform(&["--field", "3^2", "--json", "--jobs", jobs, "search", "--lambda", "4", "--normalization", "biquadratic"])
    };
    let a = args("1");
    let b = args("3");
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["hits"].as_array().map(Vec::len), Some(24));
}

#[test]
fn search_guards() {
    let o = lform(&["--field", "3^3", "--max-space", "10", "search", "--lambda", "2"]);
    assert_eq!(code(&o), 2);
    let o = lform(&["--field", "3^3", "search", "--p", "2", "--lambda", "1"]);
    assert_eq!(code(&o), 2);
    let o = lform(&["--field", "3^3", "search", "--lambda", "1", "--normalization", "bogus"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn identities_are_seed_deterministic() {
    let run = |seed: &str| lform(&["--field", "2^4", "--seed", seed, "--trials", "20", "--json", "identities"]);
    let a = run("5");
    let b = run("5");
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let o = lform(&["--field", "2^4", "identities", "--sizes", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn input_errors_exit_2() {
    let cases: [&[&str]; 4] = [
        &["--field", "4", "standard", "--basis", "[]"],
        &["standard", "--basis", r#"["1"]"#],
        &["verify", "--Q", "{not json"],
        &["verify", "--Q", "@/nonexistent/prompt.json"],
    ];
    for args in cases {
        let o = lform(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn no_command_reports_an_internal_error() {
    // Exit code 3 is reserved for internal inconsistencies; none of the
    // documented workflows may produce it.
    let q = standard_prompt("5^2");
    for args in [
        vec!["verify", "--Q", q.as_str()],
        vec!["--field", "2^2", "search", "--lambda", "1"],
        vec!["--field", "5^2", "--trials", "10", "identities"],
        vec!["replay", "l15-classes"],
    ] {
        assert_ne!(code(&lform(&args)), 3, "{args:?}");
    }
}

#[test]
fn file_inputs_and_manifest() {
    let dir = std::env::temp_dir().join(format!("lform-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let qfile = dir.join("q.json");
    std::fs::write(&qfile, standard_prompt("3^2")).unwrap();
    let manifest = dir.join("manifest.json");
    let qarg = format!("@{}", qfile.display());
    let with = lform(&["--manifest", manifest.to_str().unwrap(), "verify", "--Q", &qarg]);
    let without = lform(&["verify", "--Q", &qarg]);
    assert_eq!(code(&with), 0);
    // The manifest carries timing, so it is kept out of stdout.
    assert_eq!(with.stdout, without.stdout);
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["verdict"], true);
    assert_eq!(m["exit_code"], 0);
    assert!(m["elapsed_ms"].is_u64());
    std::fs::remove_dir_all(&dir).ok();
}
