//! The `spinh` binary end to end: outputs, exit codes and the cache.

use std::process::Command;

fn spinh(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_spinh"))
        .args(args)
        .env_remove("SPINH_CACHE_DIR")
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn documented_commands() {
    assert_eq!(
        spinh(&["potential", "small", "--r", "3"]),
        (0, "1/2*x0^2*x1 + 1/72*x1^4\n".into(), String::new())
    );
    assert_eq!(
        spinh(&["correlator", "--r", "3", "--genus", "0", "--insertions", "tau(0,1)^4"]).1,
        "1/3\n"
    );
    let (code, out, _) = spinh(&["check", "kdv", "--r", "2", "--flow", "1,0", "--max-deg", "5"]);
    assert_eq!((code, out.as_str()), (0, "residual: 0\n"));
}

#[test]
fn checks_pass() {
    for args in [
        vec!["check", "wdvv", "--r", "5"],
        vec!["check", "string", "--r", "3", "--max-deg", "4"],
        vec!["check", "dilaton", "--r", "3", "--max-deg", "4"],
        vec!["check", "l0", "--r", "3", "--max-deg", "4"],
        vec!["check", "grading", "--r", "3", "--max-deg", "4"],
        vec!["check", "fourpoint", "--r", "7"],
        vec!["check", "mu1", "--r", "5"],
        vec!["psdo", "root", "--r", "3"],
    ] {
        let (code, out, err) = spinh(&args);
        assert_eq!(code, 0, "{args:?}: {out}{err}");
    }
}

#[test]
fn json_output_and_graphs() {
    let (code, out, _) = spinh(&[
        "graphs",
        "enumerate",
        "--r",
        "3",
        "--marks",
        "1,1,1,1",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["graphs"].as_array().unwrap().len(), 4);
    let graph = r#"{"vertices":[0,0],"edges":[{"v1":0,"v2":1,"mplus":2,"mminus":2}],"tails":[]}"#;
    assert_eq!(
        spinh(&["graphs", "aut", "--r", "3", "--graph", graph]).1.lines().next(),
        Some("3")
    );
}

#[test]
fn usage_errors_exit_two() {
    let (code, _, err) = spinh(&["potential", "small", "--r", "x"]);
    assert_eq!(code, 2);
    assert!(err.contains("--r"));
    assert_eq!(
        spinh(&["check", "kdv", "--r", "2", "--flow", "1", "--max-deg", "3"]).0,
        2
    );
    assert_eq!(
        spinh(&["correlator", "--r", "3", "--genus", "2", "--insertions", "tau(1,0)"]).0,
        2
    );
}

#[test]
fn cache_directory_from_env() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_spinh"))
            .args(["potential", "large", "--r", "3", "--max-deg", "4"])
            .env("SPINH_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
}
