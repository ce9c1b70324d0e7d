use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn posetdim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posetdim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn error_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr carries a JSON error")
}

#[test]
fn standard_example_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = posetdim(&["gen", "--type", "standard:3", "--seed", "1", "-o", "s3.poset"], d);
    assert!(gen.status.success());

    let dim = posetdim(&["dim", "s3.poset", "--exact"], d);
    assert!(dim.status.success());
    assert_eq!(stdout(&dim).trim(), "dimension 3");

    let detect = posetdim(&["detect", "s3.poset", "--k", "3"], d);
    assert_eq!(detect.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&detect)).unwrap();
    assert_eq!(v["contains"], true);
    assert_eq!(v["embedding"]["a_elems"], serde_json::json!([0, 1, 2]));
    assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn dim_json_realizer_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    posetdim(&["gen", "--type", "random:7,0.3", "--seed", "4", "-o", "p.poset"], d);
    let out = posetdim(&["dim", "p.poset", "--json"], d);
    assert!(out.status.success());
    std::fs::write(d.join("dim.json"), stdout(&out)).unwrap();
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["result"]["optimal"], true);
    let check = posetdim(&["dim", "p.poset", "--verify", "dim.json"], d);
    assert!(check.status.success(), "{}", String::from_utf8_lossy(&check.stderr));
}

#[test]
fn peel_certificate_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = posetdim(&["gen", "--type", "skfree:10,10,0.2,3", "--seed", "5", "-o", "sf.poset"], d);
    assert!(gen.status.success());
    let peel = posetdim(
        &["peel", "sf.poset", "--k", "3", "--q", "2", "--threshold", "8", "--seed", "3", "--json", "cert.json"],
        d,
    );
    assert!(peel.status.success(), "{}", String::from_utf8_lossy(&peel.stderr));
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(d.join("cert.json")).unwrap()).unwrap();
    assert_eq!(cert["seed"], 3);
    assert_eq!(cert["parameters"]["q"], 2);
    assert!(cert["certificate"]["total_size"].as_u64().unwrap() > 0);

    let verify = posetdim(&["dim", "sf.poset", "--verify", "cert.json"], d);
    assert!(verify.status.success());
    assert!(stdout(&verify).starts_with("valid realizer"));

    // Same inputs, same certificate.
    posetdim(
        &["peel", "sf.poset", "--k", "3", "--q", "2", "--threshold", "8", "--seed", "3", "--json", "again.json"],
        d,
    );
    assert_eq!(
        std::fs::read(d.join("cert.json")).unwrap(),
        std::fs::read(d.join("again.json")).unwrap()
    );
}

#[test]
fn general_peel_and_split() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("chain.poset"), "poset 3\nrel 0 1\nrel 1 2\n").unwrap();
    let split = posetdim(&["split", "chain.poset", "-o", "split.poset"], d);
    assert!(split.status.success());
    let text = std::fs::read_to_string(d.join("split.poset")).unwrap();
    assert!(text.starts_with("poset 6\n"));
    assert!(text.contains("A: 0 1 2\nB: 3 4 5\n"));

    let refuse = posetdim(&["peel", "chain.poset"], d);
    assert_eq!(refuse.status.code(), Some(1));
    assert_eq!(error_json(&refuse)["error"], "ArgumentError");

    let general = posetdim(&["peel", "chain.poset", "--general", "--threshold", "6"], d);
    assert!(general.status.success());
    let v: Value = serde_json::from_str(&stdout(&general)).unwrap();
    assert_eq!(v["realizer"]["extensions"], serde_json::json!([[0, 1, 2]]));
}

#[test]
fn domain_errors_are_json_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    posetdim(&["gen", "--type", "standard:3", "-o", "s3.poset"], d);
    let peel = posetdim(&["peel", "s3.poset", "--k", "3"], d);
    assert_eq!(peel.status.code(), Some(1));
    let e = error_json(&peel);
    assert_eq!(e["error"], "ContainsSk");
    assert_eq!(e["module"], "skfree");

    let exhausted = posetdim(&["gen", "--type", "skfree:10,10,0.5,2", "--max-tries", "3"], d);
    assert_eq!(exhausted.status.code(), Some(1));
    assert_eq!(error_json(&exhausted)["error"], "GenerationExhausted");

    std::fs::write(d.join("bad.poset"), "poset 2\nrel 0 5\n").unwrap();
    let bad = posetdim(&["dim", "bad.poset"], d);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(error_json(&bad)["error"], "FormatError");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["gen", "--type", "foo:1"],
        vec!["gen", "--type", "random:5"],
        vec!["frobnicate"],
        vec!["dim", "x", "--exact", "--budget", "5"],
    ] {
        assert_eq!(posetdim(&args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn prob_lemma_and_scans() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = posetdim(&["prob-lemma", "--t", "2", "--q", "4", "--r", "12", "--trials", "2000", "--seed", "7"], d);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["empirical_freq"].as_f64().unwrap() >= 0.59);
    assert_eq!(v["seed"], 7);

    let scan = posetdim(&["experiment", "hiraguchi", "--count", "50", "--seed", "2"], d);
    assert!(scan.status.success());
    let v: Value = serde_json::from_str(&stdout(&scan)).unwrap();
    assert_eq!(v["violations"], serde_json::json!([]));
}

#[test]
fn growth_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = [
        "experiment", "growth", "--k", "3", "--sizes", "12,24", "--samples", "3", "--q", "2", "--edge-prob", "0.1",
        "--seed", "9", "--csv", "a.csv", "--json", "a.json",
    ];
    assert!(posetdim(&args, d).status.success());
    let mut again = args;
    again[15] = "b.csv";
    again[17] = "b.json";
    assert!(posetdim(&again, d).status.success());
    let a = std::fs::read_to_string(d.join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read_to_string(d.join("b.csv")).unwrap());
    assert!(a.starts_with("n,samples,mean_bound,max_bound,mean_exact,bound_over_n\n12,"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(d.join("a.json")).unwrap()).unwrap();
    assert_eq!(v["seed"], 9);
    assert_eq!(v["records"].as_array().unwrap().len(), 2);
}
