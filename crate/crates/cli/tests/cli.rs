use std::path::Path;
use std::process::{Command, Output};

fn ccl(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccl")).args(args).current_dir(dir).env_remove("CCL_JOBS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    v.sort();
    v
}

const STRICT: &str = r#"
name = "strict-cycle"
[space]
kind = "cycle"
n = 6

[[checks]]
property = "gcc"
e = 1
c = 0
"#;

#[test]
fn list_and_describe() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ccl(&["list"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for name in ["tree-sanity", "six-cycle", "f2xz-coned", "amalgam-f2", "spherical-cone"] {
        assert!(text.contains(name), "{name} missing from list");
    }
    let out = ccl(&["describe", "six-cycle"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("kind = \"cycle\""));
}

#[test]
fn certify_writes_outputs_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ccl(&["certify", "six-cycle", "--out-dir", "out", "--jobs", "2"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("wrote"));
    assert_eq!(files(&tmp.path().join("out")), ["six-cycle.graph", "six-cycle.report.json", "six-cycle.sweeps.csv"]);
}

#[test]
fn failed_certification_exits_one_with_witnesses() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("strict.toml"), STRICT).unwrap();
    let out = ccl(&["certify", "--config", "strict.toml", "--out-dir", "out"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAILED"));
    assert!(files(&tmp.path().join("out")).iter().any(|f| f.starts_with("strict-cycle.witness-")));
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(ccl(&["certify", "no-such-scenario"], tmp.path()).status.code(), Some(2));
    assert_eq!(ccl(&["certify"], tmp.path()).status.code(), Some(2));
    assert_eq!(ccl(&["certify", "--config", "missing.toml"], tmp.path()).status.code(), Some(2));
    std::fs::write(tmp.path().join("bad.toml"), "name = \"x\"\n[space]\nkind = \"cycle\"\nn = 1\n").unwrap();
    assert_eq!(ccl(&["build", "--config", "bad.toml"], tmp.path()).status.code(), Some(2));
    assert_eq!(ccl(&["build", "six-cycle", "--radius", "3"], tmp.path()).status.code(), Some(2));
    let out = ccl(&["describe", "no-such-scenario"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn build_errors_exit_three() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"
name = "wrong-constructor"
[space]
kind = "coalescence"
core_radius = 1
spec = { kind = "amalgam", left = { group = { kind = "free-abelian", rank = 1 } }, right = { group = { kind = "free-abelian", rank = 1 } } }
"#;
    std::fs::write(tmp.path().join("w.toml"), text).unwrap();
    assert_eq!(ccl(&["build", "--config", "w.toml"], tmp.path()).status.code(), Some(3));
}

#[test]
fn jobs_from_the_environment_give_identical_reports() {
    let tmp = tempfile::tempdir().unwrap();
    for (dir, jobs) in [("a", "1"), ("b", "4")] {
        let out = Command::new(env!("CARGO_BIN_EXE_ccl"))
            .args(["certify", "tree-sanity", "--out-dir", dir])
            .env("CCL_JOBS", jobs)
            .current_dir(tmp.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(files(&a), files(&b));
    for f in files(&a) {
        assert_eq!(std::fs::read(a.join(&f)).unwrap(), std::fs::read(b.join(&f)).unwrap(), "{f}");
    }
}

#[test]
fn seed_override_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ccl(&["certify", "tree-sanity", "--seed", "42", "--out-dir", "out"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let report = std::fs::read_to_string(tmp.path().join("out/tree-sanity.report.json")).unwrap();
    assert!(report.contains("\"seed\": 42"), "{report}");
}
