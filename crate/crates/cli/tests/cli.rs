use std::process::{Command, Output};

fn splitlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitlab")).args(args).output().expect("spawn splitlab")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report on stdout")
}

#[test]
fn count_mixed_fields_passes() {
    let out = splitlab(&["count", "--a", "1", "--b", "1", "--p", "3", "--q", "3,5,7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["data"]["degrees"]["(1,1)"], 1);
    assert_eq!(r["config"]["seed"], 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("count:"));
}

#[test]
fn seed_is_echoed_and_output_is_reproducible() {
    let args = ["hasse", "--n", "1", "--q", "4", "--budget", "200", "--min-accepted", "1", "--seed", "17"];
    let (x, y) = (splitlab(&args), splitlab(&args));
    assert_eq!(x.status.code(), Some(0));
    assert_eq!(x.stdout, y.stdout);
    assert_eq!(json(&x)["config"]["seed"], 17);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(splitlab(&["nonsense"]).status.code(), Some(2));
    assert_eq!(splitlab(&["count", "--a", "two"]).status.code(), Some(2));
    assert_eq!(splitlab(&["count", "--a", "2", "--b", "1"]).status.code(), Some(2));
    assert_eq!(splitlab(&["count", "--q", "6"]).status.code(), Some(2));
    assert_eq!(splitlab(&["tangent", "--q", "3", "--case", "char2-case1"]).status.code(), Some(2));
}

#[test]
fn budget_exceeded_exits_3() {
    let out = splitlab(&["count", "--a", "2", "--b", "2", "--q", "5", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn insufficient_acceptance_exits_1() {
    let out = splitlab(&["hasse", "--n", "1", "--q", "2", "--budget", "5", "--min-accepted", "100"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("failures"));
}

#[test]
fn config_file_with_flag_override() {
    let path = std::env::temp_dir().join(format!("splitlab-cli-test-{}.cfg", std::process::id()));
    std::fs::write(&path, "a=1\nb=1\nq=3,5\nformat=csv\n").unwrap();
    let out = splitlab(&["chart", "--config", path.to_str().unwrap(), "--q", "3,5,7"]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 4);
    assert!(text.contains('7'));
}

#[test]
fn every_subcommand_runs() {
    for args in [
        vec!["closure", "--a", "1", "--b", "1", "--N", "4", "--sweep", "50", "--budget", "50"],
        vec!["tangent", "--a", "1", "--b", "2", "--q", "3", "--format", "text"],
        vec!["char2", "--a", "1", "--b", "1", "--q", "2"],
        vec!["weights", "--a", "1", "--b", "1", "--range", "1"],
        vec!["cmindex", "--legs", "1x1,1x2"],
        vec!["chart", "--a", "1", "--b", "1"],
    ] {
        let out = splitlab(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
