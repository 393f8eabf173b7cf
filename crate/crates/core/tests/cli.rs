use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fano-degree")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn goldens() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("goldens").display().to_string()
}

#[test]
fn diff_against_goldens_passes() {
    let out = run(&["diff", "--golden", &goldens()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(stdout(&out).lines().filter(|l| l.starts_with("PASS")).count(), 10);
}

#[test]
fn perturbed_constant_is_detected() {
    let out = run(&["diff", "--golden", &goldens(), "--weak-fano-bound", "130"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL TABLE2"), "{text}");
    assert!(text.contains("FAIL COROLLARY"), "{text}");
}

#[test]
fn empty_golden_dir_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["diff", "--golden", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).lines().all(|l| l.starts_with("FAIL")));
}

#[test]
fn out_dir_round_trips_through_diff() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    assert!(run(&["tables", "--format", "csv", "--out", path]).status.success());
    assert!(run(&["classify", "--format", "csv", "--out", path]).status.success());
    let out = run(&["diff", "--golden", path]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn invalid_inputs_exit_2() {
    for args in [
        &["wps", "1", "2", "4", "6"][..],
        &["tables", "--window", "72", "66"],
        &["tables", "--format", "xml"],
        &["reid-tai", "0", "1", "1", "1"],
        &["classify", "--terminal-index-bound", "0"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn wps_reports_strata() {
    let text = stdout(&run(&["wps", "2", "2", "3", "5"]));
    assert!(text.contains("NOT-SUPPORTED"), "{text}");
    let out = run(&["wps", "1", "1", "3", "5", "--basket", "(2,1)"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("consistent=false"));
}

#[test]
fn reid_tai_and_curve_search() {
    assert!(stdout(&run(&["reid-tai", "5", "1", "1", "3"])).contains("CANONICAL_NOT_TERMINAL"));
    assert!(stdout(&run(&["reid-tai", "2", "1", "1", "1"])).contains("TERMINAL"));
    let text = stdout(&run(&["curve-search", "211/21", "--lcm-divisor", "21", "--nonempty"]));
    assert!(text.contains("{(A2,1),(A6,1)}") && text.contains("1 configuration(s)"), "{text}");
}

#[test]
fn emit_excluded_adds_reasons() {
    let text = stdout(&run(&["classify", "--format", "csv", "--emit-excluded"]));
    assert!(text.contains("CURVE-PROP41"), "{text}");
    assert!(text.contains("TORSION-PROP42"), "{text}");
}

#[test]
fn json_output_parses() {
    let out = run(&["classify", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["classification"]["corollary"]["max_degree"], "200/3");
}
