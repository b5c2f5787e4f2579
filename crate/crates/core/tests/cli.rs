//! The binary's subcommands, files and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use cancov::experiment::ExperimentConfig;
use cancov::io::{load_cover, load_pack, write_json};
use cancov::metric::Tolerances;

fn cancov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cancov")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn pack_cover_render_chain() {
    let dir = tempfile::tempdir().unwrap();
    let pack = dir.path().join("pack.json");
    let out = cancov(&["pack", "gen", "--kind", "interval_cylinder", "--base-points", "17", "--levels", "6", "--out", path(&pack)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let loaded = load_pack(&pack, &Tolerances::default()).unwrap();
    assert_eq!(loaded.boundary().len(), 17);
    assert_eq!(loaded.len(), 17 * 7);

    let cover = dir.path().join("cover.json");
    let out = cancov(&["cover", "build", "--pack", path(&pack), "--kind", "canonical", "--out", path(&cover)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let alpha = load_cover(&cover, &loaded).unwrap();
    assert!(alpha.covers());

    let svg = dir.path().join("cover.svg");
    let out = cancov(&["render", "--pack", path(&pack), "--cover", path(&cover), "--out", path(&svg)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<polygon").count(), alpha.len());
}

#[test]
fn experiment_writes_report_and_drawing() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.json");
    write_json(&config, &ExperimentConfig::for_tag("finite_cylinder").unwrap()).unwrap();
    let (report, svg) = (dir.path().join("report.json"), dir.path().join("report.svg"));
    let out = cancov(&["experiment", "--config", path(&config), "--out", path(&report), "--svg", path(&svg)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["summary"]["achieved"], 2);
    assert_eq!(v["summary"]["all_pass"], true);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    // rerunning gives the same bytes
    let again = dir.path().join("again.json");
    assert!(cancov(&["experiment", "--config", path(&config), "--out", path(&again)]).status.success());
    assert_eq!(std::fs::read(&report).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn failing_verdicts_give_a_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.json");
    write_json(&config, &ExperimentConfig::for_tag("cube_face").unwrap()).unwrap();
    let out = cancov(&["experiment", "--config", path(&config), "--out", path(&dir.path().join("r.json"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_passes_and_writes_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let out = cancov(&["verify", "--seed", "3", "--out", path(&summary)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(v["seed"], 3);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["failures"] == 0));
}

#[test]
fn bad_input_is_an_error() {
    let out = cancov(&["pack", "gen", "--kind", "torus", "--out", "/nonexistent/p.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown pack kind"));
}
