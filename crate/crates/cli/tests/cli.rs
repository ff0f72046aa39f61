use assert_cmd::Command;
use predicates::prelude::*;

fn dimkit() -> Command {
    Command::cargo_bin("dimkit").unwrap()
}

#[test]
fn dim_thresholds_prints_value() {
    let dir = tempfile::tempdir().unwrap();
    let class = dir.path().join("th10.json");
    dimkit()
        .args(["gen", "thresholds", "--n", "10", "--out", class.to_str().unwrap()])
        .assert()
        .success();
    // a manifest lands next to the output
    assert!(dir.path().join("th10.json.manifest.json").exists());
    dimkit()
        .args(["dim", "--class", class.to_str().unwrap(), "--measure", "edim", "--ref", "col:10"])
        .assert()
        .success()
        .stdout(predicate::str::diff("10\n"));
}

#[test]
fn unknown_flag_is_usage_error() {
    dimkit().args(["dim", "--nonsense"]).assert().code(2);
}

#[test]
fn unknown_suite_is_usage_error() {
    dimkit().args(["repro", "nonsense"]).assert().code(2);
}

#[test]
fn scale_dim_with_eps_and_witness_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let class = dir.path().join("cx.json");
    let witness = dir.path().join("w.json");
    dimkit()
        .args(["gen", "counterexample", "--n", "4", "--eps", "0.5", "--out", class.to_str().unwrap()])
        .assert()
        .success();
    dimkit()
        .args([
            "dim",
            "--class",
            class.to_str().unwrap(),
            "--measure",
            "edim",
            "--ref",
            "zeros",
            "--eps",
            "0.5",
            "--witness-out",
            witness.to_str().unwrap(),
        ])
        .assert()
        .success()
        .stdout(predicate::str::diff("4\n"));
    dimkit()
        .args([
            "witness",
            "verify",
            "--class",
            class.to_str().unwrap(),
            "--witness",
            witness.to_str().unwrap(),
        ])
        .assert()
        .success()
        .stdout(predicate::str::contains("valid"));
}

#[test]
fn tampered_witness_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let class = dir.path().join("th4.json");
    let witness = dir.path().join("w.json");
    dimkit()
        .args(["gen", "thresholds", "--n", "4", "--out", class.to_str().unwrap()])
        .assert()
        .success();
    dimkit()
        .args([
            "dim", "--class", class.to_str().unwrap(), "--measure", "edim", "--ref", "col:4",
            "--witness-out", witness.to_str().unwrap(),
        ])
        .assert()
        .success();
    // swap the first two entries: the prefix-agreement condition breaks
    let text = std::fs::read_to_string(&witness).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let entries = v["entries"].as_array_mut().unwrap();
    entries.swap(0, 1);
    std::fs::write(&witness, v.to_string()).unwrap();
    dimkit()
        .args([
            "witness", "verify", "--class", class.to_str().unwrap(), "--witness",
            witness.to_str().unwrap(),
        ])
        .assert()
        .code(1)
        .stdout(predicate::str::contains("invalid"));
}

#[test]
fn rank_forster_and_search() {
    let dir = tempfile::tempdir().unwrap();
    let class = dir.path().join("par2.json");
    let cert = dir.path().join("cert.json");
    dimkit()
        .args(["gen", "parities", "--d", "2", "--out", class.to_str().unwrap()])
        .assert()
        .success();
    dimkit()
        .args(["rank", "forster", "--class", class.to_str().unwrap()])
        .assert()
        .success()
        .stdout(predicate::str::starts_with("2.0000000"));
    dimkit()
        .args([
            "rank", "search", "--class", class.to_str().unwrap(), "--d", "4", "--activation",
            "identity", "--out", cert.to_str().unwrap(),
        ])
        .assert()
        .success();
    dimkit()
        .args([
            "rank", "verify", "--class", class.to_str().unwrap(), "--cert", cert.to_str().unwrap(),
        ])
        .assert()
        .success()
        .stdout(predicate::str::contains("valid"));
}

#[test]
fn ramsey_color_clique_extract_audit() {
    let dir = tempfile::tempdir().unwrap();
    let class = dir.path().join("th6.json");
    let witness = dir.path().join("w.json");
    let coloring = dir.path().join("c.json");
    dimkit()
        .args(["gen", "thresholds", "--n", "6", "--out", class.to_str().unwrap()])
        .assert()
        .success();
    dimkit()
        .args([
            "dim", "--class", class.to_str().unwrap(), "--measure", "edim", "--ref", "col:6",
            "--witness-out", witness.to_str().unwrap(),
        ])
        .assert()
        .success();
    dimkit()
        .args([
            "ramsey", "color", "--class", class.to_str().unwrap(), "--witness",
            witness.to_str().unwrap(), "--out", coloring.to_str().unwrap(),
        ])
        .assert()
        .success();
    // the threshold witness colors all-blue, so the largest clique is blue
    // and spans every vertex
    dimkit()
        .args(["ramsey", "clique", "--coloring", coloring.to_str().unwrap()])
        .assert()
        .success()
        .stdout(predicate::str::diff("blue 0,1,2,3,4,5\n"));
    dimkit()
        .args([
            "ramsey", "extract", "--class", class.to_str().unwrap(), "--witness",
            witness.to_str().unwrap(), "--vertices", "0,2,4", "--color", "blue",
        ])
        .assert()
        .success()
        .stdout(predicate::str::contains("\"threshold\""));
    dimkit()
        .args(["ramsey", "audit", "--class", class.to_str().unwrap(), "--ref", "col:6"])
        .assert()
        .success()
        .stdout(predicate::str::contains("sandwich=true"));
}

#[test]
fn randcon_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let class = dir.path().join("e.json");
    dimkit()
        .args(["randcon", "e-sample", "--n", "6", "--seed", "1", "--out", class.to_str().unwrap()])
        .assert()
        .success();
    dimkit()
        .args(["randcon", "count", "--class", class.to_str().unwrap(), "--k", "2"])
        .assert()
        .success()
        .stdout(predicate::str::contains("\"exact\": true"));
    dimkit()
        .args(["dim", "--class", class.to_str().unwrap(), "--measure", "edim", "--ref", "ones"])
        .assert()
        .success()
        .stdout(predicate::str::diff("6\n"));
}

#[test]
fn repro_suite_csv_output() {
    dimkit()
        .args(["repro", "counterexample", "--format", "csv"])
        .assert()
        .success()
        .stdout(predicate::str::contains("N,edim,sdim,tdim"));
}

#[test]
fn resource_limit_is_exit_three() {
    dimkit()
        .args(["randcon", "e-search", "--n", "40", "--trials", "1"])
        .assert()
        .code(3);
}
