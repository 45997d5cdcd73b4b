//! Black-box checks of the command-line interface: exit codes, machine file
//! loading, and the shape of the human-readable output.

use std::path::PathBuf;
use std::process::{Command, Output};

fn catsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn machine_file(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../machines")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn validate_passes_on_a_corpus_machine() {
    let out = catsim(&["validate", "--corpus", "m_flip", "--cat-bits", "3", "--tau", "all"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("valid: 8/8"));
}

#[test]
fn validate_fails_on_a_broken_machine() {
    let out = catsim(&["validate", "--corpus", "invalid_loop", "--cat-bits", "3", "--tau", "all"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    assert!(stdout(&out).contains("valid: 0/8"));
}

#[test]
fn run_and_transform_agree() {
    let args_tail = [
        "--corpus",
        "nd_stconn",
        "--cat-bits",
        "3",
        "--input",
        "110011",
        "--tau",
        "all",
    ];
    let run = catsim(&[&["run"], &args_tail[..]].concat());
    let transform = catsim(&[&["transform"], &args_tail[..]].concat());
    assert_eq!(run.status.code(), Some(0), "{run:?}");
    assert_eq!(transform.status.code(), Some(0), "{transform:?}");
    assert!(stdout(&run).contains("Accept"));
    assert!(stdout(&transform).contains("Accept"));
    assert!(stdout(&transform).contains("tape restored: 8/8"));
}

#[test]
fn transform_loads_machine_files() {
    let out = catsim(&[
        "transform",
        "--machine",
        &machine_file("m_flip.ctm"),
        "--tau",
        "all",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("tape restored: 16/16"));
}

#[test]
fn promise_violation_sets_its_exit_code() {
    let out = catsim(&[
        "run",
        "--corpus",
        "maj3",
        "--cat-bits",
        "3",
        "--input",
        "000000",
        "--tau",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(4), "{out:?}");
}

#[test]
fn verify_passes_and_flags_lemma_failures() {
    let ok = catsim(&["verify", "--corpus", "m_flip", "--cat-bits", "3"]);
    assert_eq!(ok.status.code(), Some(0), "{ok:?}");
    let bad = catsim(&["verify", "--corpus", "invalid_flip", "--cat-bits", "3"]);
    assert_eq!(bad.status.code(), Some(3), "{bad:?}");
    assert!(stdout(&bad).contains("FAIL"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(catsim(&["run"]).status.code(), Some(1));
    assert_eq!(
        catsim(&["run", "--corpus", "no_such_machine"]).status.code(),
        Some(1)
    );
    assert_eq!(
        catsim(&["transform", "--corpus", "m_id", "--set-B", "999"]).status.code(),
        Some(1)
    );
    assert_eq!(catsim(&["--help"]).status.code(), Some(0));
}

#[test]
fn export_dot_emits_a_digraph() {
    let out = catsim(&[
        "export-dot",
        "--corpus",
        "m_flip",
        "--cat-bits",
        "3",
        "--tau",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("digraph"));
    assert!(text.contains("doublecircle"));
}

#[test]
fn transform_emits_oracle_queries() {
    let out = catsim(&[
        "transform",
        "--corpus",
        "coin",
        "--cat-bits",
        "3",
        "--tau",
        "2",
        "--format",
        "query",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("mode unbounded-random"));
    assert!(text.contains("edges"));
}

#[test]
fn stats_prints_component_sizes() {
    let out = catsim(&["stats", "--corpus", "dec", "--cat-bits", "3", "--tau", "all"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("accept"));
}
