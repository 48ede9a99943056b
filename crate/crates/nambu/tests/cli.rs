use std::fs;
use std::process::{Command, Output};

fn nambu(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_nambu")).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn lines(out: &Output) -> Vec<String> {
    String::from_utf8(out.stdout.clone()).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn expand_counts() {
    assert_eq!(lines(&nambu(&["expand", "--dim", "2", "--no-dedupe"])).len(), 3);
    assert_eq!(lines(&nambu(&["expand", "--dim", "2"])).len(), 2);
    assert_eq!(lines(&nambu(&["expand", "--dim", "3", "--no-dedupe"])).len(), 48);
    assert_eq!(lines(&nambu(&["expand", "--dim", "3"])).len(), 42);
    assert_eq!(lines(&nambu(&["expand", "--dim", "4", "--limit", "5"])).len(), 5);
}

#[test]
fn expand_output_feeds_back_in() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("enc.txt");
    let first = nambu(&["expand", "--dim", "3"]);
    fs::write(&path, &first.stdout).unwrap();
    let again = nambu(&["expand", "--dim", "3", "--encodings", path.to_str().unwrap()]);
    assert_eq!(first.stdout, again.stdout);
}

#[test]
fn tetrahedron_class() {
    let out = lines(&nambu(&["cohomology", "4", "6"]));
    assert!(out[0].starts_with("# 1 cohomology classes"), "{out:?}");
    assert_eq!(out[1], "# class 0");
}

#[test]
fn two_dimensional_solve_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    nambu(&["solve", "--dim", "2", "--builtin", "sunflower", "--jobs", "1", "--out", a.to_str().unwrap()]);
    nambu(&["solve", "--dim", "2", "--builtin", "sunflower", "--out", b.to_str().unwrap()]);
    let (ra, rb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ra, rb);
    let v: serde_json::Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(v["solvable"], true);
    assert_eq!(v["verification"], "true");
    assert_eq!(v["coefficients"], serde_json::json!(["8/1", "16/1"]));
    assert!(dir.path().join("a.timings.json").exists());
}

#[test]
fn shifts_at_three_dimensions() {
    let out = lines(&nambu(&["shifts", "--dim", "3"]));
    assert_eq!(out.len(), 3);
    assert!(out.iter().all(|l| l.ends_with("poisson_closed=true")), "{out:?}");
}

#[test]
fn bad_cocycle_fails_cleanly() {
    let out = Command::new(env!("CARGO_BIN_EXE_nambu")).args(["solve", "--dim", "2", "--cocycle", "4,6", "--out", "/dev/null"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--cocycle"));
}
