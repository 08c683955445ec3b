//! End-to-end tests that drive the compiled binary the way an operator would.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn xlc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xlc"))
        .current_dir(dir)
        .env_remove("XLC_LLM_ENDPOINT")
        .env_remove("XLC_LLM_KEY")
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = xlc(dir, args);
    assert!(
        out.status.success(),
        "`xlc {}` failed\nstdout: {}\nstderr: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
    out
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn line_count(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().filter(|l| !l.trim().is_empty()).count()
}

fn gen_small(dir: &Path) {
    ok(
        dir,
        &[
            "synth", "gen", "--seed", "11", "--services", "8", "--incidents", "20",
            "--monitors", "12",
        ],
    );
}

#[test]
fn full_pipeline_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    gen_small(dir);

    let out = ok(dir, &["ingest"]);
    assert!(stderr_of(&out).contains("20 incidents"), "ingest should report the corpus shape");

    ok(dir, &["index", "build"]);
    assert!(dir.join("out/index.bin").exists());

    ok(dir, &["rca", "run", "--strategy", "inc-dep"]);
    let runs = dir.join("out/rca_runs.jsonl");
    assert_eq!(line_count(&runs), 20);

    // A second strategy lands in the same file without clobbering the first.
    ok(dir, &["rca", "run", "--strategy", "nodep"]);
    assert_eq!(line_count(&runs), 40);

    // Resume sees every incident already recorded and runs nothing.
    let out = ok(dir, &["rca", "run", "--strategy", "inc-dep", "--resume"]);
    assert!(
        stderr_of(&out).contains("0 to run"),
        "resume should be a no-op: {}",
        stderr_of(&out)
    );
    assert_eq!(line_count(&runs), 40);

    ok(dir, &["monitor", "run", "--task", "resource", "--case", "c1"]);
    ok(dir, &["monitor", "run", "--task", "slo", "--case", "c3"]);
    let monitor_runs = dir.join("out/monitor_runs.jsonl");
    assert_eq!(line_count(&monitor_runs), 24);

    let out = ok(dir, &["monitor", "run", "--task", "resource", "--case", "c1", "--resume"]);
    assert!(stderr_of(&out).contains("already recorded"));
    assert_eq!(line_count(&monitor_runs), 24);

    let out = ok(dir, &["eval", "rca", "--runs", "out/rca_runs.jsonl"]);
    assert!(stdout_of(&out).contains("InC DEP"));
    assert!(dir.join("out/eval_rca.json").exists());

    let out = ok(dir, &["eval", "monitor", "--runs", "out/monitor_runs.jsonl"]);
    assert!(stdout_of(&out).contains("Resource class assignment"));
    assert!(stdout_of(&out).contains("SLO class assignment"));

    let first = ok(dir, &["report"]);
    let first_text = fs::read(dir.join("out/report.txt")).unwrap();
    let second = ok(dir, &["report"]);
    let second_text = fs::read(dir.join("out/report.txt")).unwrap();
    assert_eq!(first_text, second_text, "report must be byte-stable across runs");
    assert_eq!(stdout_of(&first), stdout_of(&second));
    assert!(dir.join("out/report.json").exists());
}

#[test]
fn unknown_strategy_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = xlc(tmp.path(), &["rca", "run", "--strategy", "bogus"]);
    assert_eq!(out.status.code(), Some(2), "clap rejects bad values with exit 2");
    assert!(stderr_of(&out).contains("bogus"));
}

#[test]
fn eval_names_the_incident_missing_dependency_truth() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    gen_small(dir);
    ok(dir, &["rca", "run", "--strategy", "nodep"]);

    // Drop the label from the first incident and re-score.
    let incidents_path = dir.join("corpus/incidents.jsonl");
    let raw = fs::read_to_string(&incidents_path).unwrap();
    let mut lines: Vec<String> = raw.lines().map(String::from).collect();
    let mut first: serde_json::Value = serde_json::from_str(&lines[0]).unwrap();
    let id = first["id"].as_str().unwrap().to_string();
    first["is_dependency_failure"] = serde_json::Value::Null;
    lines[0] = serde_json::to_string(&first).unwrap();
    fs::write(&incidents_path, lines.join("\n") + "\n").unwrap();

    let out = xlc(dir, &["eval", "rca", "--runs", "out/rca_runs.jsonl"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr_of(&out).contains(&id),
        "error should name incident {id}: {}",
        stderr_of(&out)
    );
}

#[test]
fn summarize_reuses_the_cache_on_a_second_pass() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    gen_small(dir);

    let out = ok(dir, &["summarize"]);
    assert!(stderr_of(&out).contains("reused 0 cached entries"), "{}", stderr_of(&out));

    let services = fs::read_to_string(dir.join("corpus/services.jsonl")).unwrap();
    assert!(
        !services.contains("\"summarized_description\":null"),
        "every service should gain a summary"
    );

    let out = ok(dir, &["summarize"]);
    assert!(
        stderr_of(&out).contains("summarized 0 services and 0 incidents"),
        "second pass should be all cache hits: {}",
        stderr_of(&out)
    );
}

#[test]
fn report_without_runs_is_an_operational_error() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    gen_small(dir);
    let out = xlc(dir, &["report"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("no run records"));
}

#[test]
fn config_file_redirects_the_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    gen_small(dir);
    fs::write(dir.join("xlc.toml"), "out = \"results\"\n").unwrap();
    ok(dir, &["index", "build"]);
    assert!(dir.join("results/index.bin").exists());
    assert!(!dir.join("out").exists());
}
