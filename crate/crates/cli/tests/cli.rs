use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_exotic-metrics"));
    cmd.env_remove("EXOTIC_METRICS_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn dist_prints_exact_rationals() {
    let o = run(&["dist", "--space", "cobweb", "0", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2/1\n");

    let o = run(&["dist", "--space", "cobweb", "(0, 1, 1/2)", "(1, 0, 3/2)"]);
    assert_eq!(stdout(&o), "0/1\n");

    let o = run(&["dist", "--space", "hedgehog", "--set", "eps=1", "(0, 1)", "(1, 1/5)"]);
    assert_eq!(stdout(&o), "6/5\n");
}

#[test]
fn dist_witness_route() {
    let o = run(&["dist", "--space", "cobweb", "--witness", "(0, 1, 19/10)", "(0, 2, 19/10)"]);
    assert_eq!(stdout(&o), "11/5\n(0, 1, 19/10) -> 1 -> 2 -> (0, 2, 19/10)\n");
}

#[test]
fn dist_error_codes() {
    let o = run(&["dist", "--space", "cobweb", "(0, 1", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));

    let o = run(&["dist", "--space", "cobweb", "9", "1"]);
    assert_eq!(o.status.code(), Some(3));

    let o = run(&["dist", "--space", "hedgehog", "(0, 3)", "(0, 1)"]);
    assert_eq!(o.status.code(), Some(3));

    let o = run(&["dist", "--space", "blob", "0", "1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["dist", "0", "1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["dist", "--space", "cobweb", "--set", "colour=red", "0", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn audit_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let c = dir.path().join("c.json");
    let args = ["audit", "metric", "--space", "hedgehog", "--samples", "2000", "--seed", "11"];
    let o = bin().args(args).arg("--out").arg(&a).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    bin().args(args).arg("--out").arg(&b).output().unwrap();
    bin().args(args).args(["--workers", "4", "--out"]).arg(&c).output().unwrap();
    let first = std::fs::read(&a).unwrap();
    assert_eq!(first, std::fs::read(&b).unwrap());
    assert_eq!(first, std::fs::read(&c).unwrap());

    let report = read_json(&a);
    assert_eq!(report["audit"], "metric");
    assert_eq!(report["seed"], 11);
    assert_eq!(report["attempted"], 2000);
    assert_eq!(report["passed"], 2000);
    assert_eq!(report["violations"], Value::Array(vec![]));
    assert_eq!(report["config"]["kind"], "hedgehog");
}

#[test]
fn reports_rerun_from_their_embedded_config() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let o = bin()
        .args(["audit", "lipschitz", "--space", "zcon", "--samples", "300", "--seed", "3", "--out"])
        .arg(&first)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let report = read_json(&first);
    let config: String = report["config"]
        .as_object()
        .unwrap()
        .iter()
        .filter(|(k, _)| k.as_str() != "audit")
        .map(|(k, v)| format!("{k} = {}\n", v.as_str().unwrap()))
        .collect();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, config).unwrap();
    let second = dir.path().join("second.json");
    let o = bin()
        .args(["audit", "lipschitz", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&second)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn audit_exit_codes() {
    let o = run(&["audit", "ultrametric", "--space", "unit", "--samples", "500"]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!report["violations"].as_array().unwrap().is_empty());

    let o = run(&["audit", "threads", "--space", "hedgehog"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["audit", "metric", "--space", "hedgehog", "--samples", "5", "--out", "/nonexistent/dir/r.json"]);
    assert_eq!(o.status.code(), Some(4));

    let o = run(&["audit", "metric", "--config", "/nonexistent/run.cfg"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn corrupted_table_audit_fails() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.csv");
    std::fs::write(&table, "0,1,3\n1,0,1\n3,1,0\n").unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, format!("kind = discrete\ntable_file = {}\n", table.display())).unwrap();
    let o = bin().args(["audit", "metric", "--samples", "50", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(3), "validated tables reject the corruption up front");

    std::fs::write(&cfg, format!("kind = discrete\ntable_file = {}\nvalidate = false\n", table.display())).unwrap();
    let o = bin().args(["audit", "metric", "--samples", "200", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn seed_precedence() {
    let seed_of = |extra: &[&str], env: Option<&str>| {
        let mut cmd = bin();
        cmd.args(["audit", "metric", "--space", "unit", "--samples", "3"]).args(extra);
        if let Some(e) = env {
            cmd.env("EXOTIC_METRICS_SEED", e);
        }
        let o = cmd.output().unwrap();
        let report: Value = serde_json::from_slice(&o.stdout).unwrap();
        report["seed"].as_u64().unwrap()
    };
    assert_eq!(seed_of(&[], None), 0);
    assert_eq!(seed_of(&[], Some("7")), 7);
    assert_eq!(seed_of(&["--seed", "9"], Some("7")), 9);
    assert_eq!(seed_of(&["--set", "seed=5"], Some("7")), 5);
}

#[test]
fn suite_list_and_subsets() {
    let o = run(&["suite", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    let ids: Vec<String> = stdout(&o).lines().map(|l| l.split('\t').next().unwrap().to_string()).collect();
    assert_eq!(ids, (1..=11).map(|i| format!("C{i}")).collect::<Vec<_>>());

    let o = run(&["suite", "--only", "C5,C9"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("C5  PASS") && out.contains("C9  PASS"), "{out}");

    let o = run(&["suite", "--only", "C99"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn suite_fails_under_injected_corruption() {
    let o = run(&["suite", "--only", "C2", "--inject-corruption"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("C2  FAIL"));
}
