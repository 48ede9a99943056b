use std::fs;

use nambu::checkpoint::Checkpoint;
use nambu::pipeline::{run, ProblemSpec, RunOptions, Stage};

#[test]
fn store_then_load() {
    let dir = tempfile::tempdir().unwrap();
    let c = Checkpoint::open(dir.path(), "problem A").unwrap();
    assert_eq!(c.load("flows").unwrap(), None);
    c.store("flows", "body\nlines\n").unwrap();
    assert_eq!(c.load("flows").unwrap().as_deref(), Some("body\nlines\n"));
    assert!(!dir.path().join("flows.txt.partial").exists());
}

#[test]
fn other_fingerprint_is_ignored() {
    let dir = tempfile::tempdir().unwrap();
    Checkpoint::open(dir.path(), "problem A").unwrap().store("flows", "old").unwrap();
    let b = Checkpoint::open(dir.path(), "problem B").unwrap();
    assert_ne!(b.fingerprint(), Checkpoint::open(dir.path(), "problem A").unwrap().fingerprint());
    assert_eq!(b.load("flows").unwrap(), None);
}

#[test]
fn headless_file_is_ignored() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("system.txt"), "no header here").unwrap();
    assert_eq!(Checkpoint::open(dir.path(), "x").unwrap().load("system").unwrap(), None);
}

#[test]
fn resumed_run_matches_fresh_run() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ProblemSpec::new(3);
    let opts = |stop| RunOptions { jobs: 1, checkpoint: Some(dir.path().to_path_buf()), stop_after: stop };
    let fresh = run(&spec, &RunOptions { jobs: 1, checkpoint: None, stop_after: None }).unwrap();
    let partial = run(&spec, &opts(Some(Stage::Flows))).unwrap();
    assert!(partial.report.solvable.is_none());
    let resumed = run(&spec, &opts(None)).unwrap();
    assert!(!resumed.resumed.is_empty());
    assert_eq!(resumed.report.to_json().unwrap(), fresh.report.to_json().unwrap());
}

#[test]
fn changed_problem_recomputes() {
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions { jobs: 1, checkpoint: Some(dir.path().to_path_buf()), stop_after: None };
    run(&ProblemSpec::new(2), &opts).unwrap();
    let mut other = ProblemSpec::new(2);
    other.dedupe = false;
    let second = run(&other, &opts).unwrap();
    assert!(second.resumed.is_empty());
    assert_eq!(second.report.counts.encodings, 3);
}
