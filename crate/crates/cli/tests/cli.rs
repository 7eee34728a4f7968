//! Drives the `junta` binary: golden outputs for one pinned config per
//! command, exit codes, and the config and output plumbing.
//!
//! Set `UPDATE_GOLDEN=1` to rewrite the golden files.

use std::path::PathBuf;
use std::process::{Command, Output};

use junta_cli::output::strip_wall_time;

fn junta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_junta"))
        .args(args)
        .env_remove("JUNTA_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Values of `column` in a `# config:`-prefixed CSV.
fn column(text: &str, column: &str) -> Vec<String> {
    let body: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == column).expect("column exists");
    r.records().map(|rec| rec.unwrap()[idx].to_string()).collect()
}

fn golden(name: &str, args: &[&str]) {
    let got = strip_wall_time(&stdout(&junta(args)));
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(got, want, "output of {args:?} drifted from {name}");
}

#[test]
fn golden_gen() {
    golden("gen.json", &["gen", "--type", "junta", "--n", "16", "--k", "3", "--seed", "9"]);
}

#[test]
fn golden_learn() {
    golden(
        "learn.csv",
        &["learn", "--n", "12", "--k", "2", "--eps", "0.2", "--plant", "junta", "--trials", "4", "--seed", "1"],
    );
}

#[test]
fn golden_test() {
    golden("test.csv", &["test", "--d", "3", "--distance", "0.5", "--trials", "5", "--seed", "2"]);
}

#[test]
fn golden_reduce_lpn_to_ljd() {
    golden(
        "lpn_to_ljd.csv",
        &["reduce", "lpn-to-ljd", "--n", "8", "--S", "2,5", "--trials", "2", "--seed", "3"],
    );
}

#[test]
fn golden_reduce_ljd_to_lpn() {
    golden(
        "ljd_to_lpn.csv",
        &["reduce", "ljd-to-lpn", "--n", "6", "--eps", "0.2", "--solver", "scan", "--trials", "2", "--seed", "4"],
    );
}

#[test]
fn golden_reduce_lpdn_to_lpn() {
    golden(
        "lpdn_to_lpn.csv",
        &["reduce", "lpdn-to-lpn", "--n", "8", "--eta", "0.1", "--trials", "3", "--seed", "5"],
    );
}

#[test]
fn golden_bench() {
    golden(
        "bench.csv",
        &["bench", "--ns", "8,16", "--ks", "1", "--epss", "0.3", "--trials", "10", "--seed", "6"],
    );
}

/// The shipped constants are exactly what `calibrate` produces, and a
/// rerun reproduces them.
#[test]
fn calibration_is_reproducible() {
    let shipped = include_str!("../calibrated.json");
    let first = stdout(&junta(&["calibrate", "--seed", "2024"]));
    assert_eq!(first, shipped);
    assert_eq!(stdout(&junta(&["calibrate", "--seed", "2024"])), first);
}

#[test]
fn exit_codes() {
    assert_eq!(junta(&[]).status.code(), Some(1));
    assert_eq!(junta(&["--help"]).status.code(), Some(0));
    assert_eq!(junta(&["learn", "--bogus"]).status.code(), Some(1));
    // seed is mandatory for randomized commands
    assert_eq!(junta(&["learn", "--trials", "1"]).status.code(), Some(1));
    assert_eq!(junta(&["gen", "--type", "junta", "--n", "8", "--k", "2"]).status.code(), Some(1));
    assert_eq!(junta(&["gen", "--type", "uniform", "--n", "8"]).status.code(), Some(0));
    // below the learner budget
    let o = junta(&["learn", "--trials", "1", "--seed", "1", "--samples", "100"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let base = ["learn", "--n", "8", "--k", "1", "--eps", "0.3", "--trials", "3", "--seed", "1"];
    assert_eq!(junta(&base).status.code(), Some(0));
    let mut strict = base.to_vec();
    strict.extend(["--assert", "--min-rate", "1.5"]);
    assert_eq!(junta(&strict).status.code(), Some(3));
    let mut bad = base.to_vec();
    bad.extend(["--config", "/nonexistent/constants.json"]);
    assert_eq!(junta(&bad).status.code(), Some(1));
}

#[test]
fn halved_budget_is_a_contract_error() {
    let full = stdout(&junta(&["learn", "--trials", "1", "--seed", "3"]));
    let budget: usize = column(&full, "budget")[0].parse().unwrap();
    let half = (budget / 2).to_string();
    let o = junta(&["learn", "--trials", "1", "--seed", "3", "--samples", &half]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("samples"));
}

#[test]
fn config_file_env_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let mut c = junta_cli::Constants::calibrated();
    c.c_learner *= 2.0;
    std::fs::write(&cfg, serde_json::to_string(&c).unwrap()).unwrap();
    let args = ["learn", "--n", "8", "--k", "1", "--eps", "0.3", "--trials", "2", "--seed", "4"];
    let budget = |text: &str| column(text, "budget")[0].parse::<usize>().unwrap();

    let default = stdout(&junta(&args));
    let mut with_flag = args.to_vec();
    with_flag.extend(["--config", cfg.to_str().unwrap()]);
    let flagged = stdout(&junta(&with_flag));
    assert!(budget(&flagged) > budget(&default));
    assert!(flagged.starts_with("# config: "));
    assert!(flagged.lines().next().unwrap().contains(&format!("\"c_learner\":{}", c.c_learner)));

    let via_env = Command::new(env!("CARGO_BIN_EXE_junta")).args(args).env("JUNTA_CONFIG", &cfg).output().unwrap();
    assert_eq!(budget(&stdout(&via_env)), budget(&flagged));

    let out = dir.path().join("r.csv");
    let log = dir.path().join("t.jsonl");
    let o = junta(&[
        "reduce", "lpn-to-ljd", "--n", "8", "--S", "3", "--trials", "2", "--seed", "5", "--out",
        out.to_str().unwrap(), "--transcript", log.to_str().unwrap(),
    ]);
    assert!(stdout(&o).is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let lines: Vec<serde_json::Value> =
        std::fs::read_to_string(&log).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["truth"], "{3}");
    assert!(lines[0]["rounds"].as_array().is_some_and(|r| !r.is_empty()));
}

#[test]
fn thread_count_does_not_change_rows() {
    let args = ["learn", "--n", "10", "--k", "2", "--eps", "0.2", "--trials", "6", "--seed", "8"];
    let one = stdout(&junta(&[&args[..], &["--threads", "1"]].concat()));
    let four = stdout(&junta(&[&args[..], &["--threads", "4"]].concat()));
    assert_eq!(strip_wall_time(&one), strip_wall_time(&four));
}

#[test]
fn spec_files_round_trip_through_learn() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("p.json");
    let o = junta(&["gen", "--type", "noisy-parity", "--n", "12", "--J", "2,7", "--eta", "0.1", "--out", spec.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&junta(&["learn", "--k", "2", "--eps", "0.2", "--spec", spec.to_str().unwrap(), "--trials", "3", "--seed", "2"]));
    assert_eq!(column(&text, "truth"), vec!["{2,7}"; 3]);
    assert_eq!(column(&text, "learned"), vec!["{2,7}"; 3]);
}
