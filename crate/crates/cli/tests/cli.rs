//! End-to-end tests of the `psca` binary: exit codes, output shapes, and
//! the construct -> verify round trip.

use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_psca");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("PSCA_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Lines of a permutation file with the timestamp comment stripped.
fn stable_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .expect("file readable")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

#[test]
fn construct_then_verify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q3.psca");
    let built = run(&[
        "construct",
        "--q",
        "3",
        "--t",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&built), 0, "stderr: {}", stderr(&built));
    assert!(stdout(&built).contains("lambda=234"));
    assert!(stdout(&built).contains("count=5616"));

    let header = fs::read_to_string(&out).unwrap();
    assert!(header.starts_with("psca v=4 t=4 lambda=234 count=5616\n"));

    let verified = run(&["verify", out.to_str().unwrap()]);
    assert_eq!(code(&verified), 0, "stderr: {}", stderr(&verified));
    assert!(stdout(&verified).contains("lambda=234"));
}

#[test]
fn verify_emits_json_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q3.psca");
    run(&[
        "construct",
        "--q",
        "3",
        "--t",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    let verified = run(&["verify", out.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&verified), 0);
    let v: Value = serde_json::from_str(&stdout(&verified)).expect("valid json");
    assert_eq!(v["perfect"], Value::Bool(true));
    assert_eq!(v["lambda"], 234);
    assert_eq!(v["rows"], 5616);
    assert_eq!(v["histogram"]["234"], 24);
}

#[test]
fn verify_supports_lower_strengths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q3.psca");
    run(&[
        "construct",
        "--q",
        "3",
        "--t",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    let at3 = run(&[
        "verify",
        out.to_str().unwrap(),
        "--t",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(code(&at3), 0);
    let v: Value = serde_json::from_str(&stdout(&at3)).unwrap();
    assert_eq!(v["lambda"], 936);
}

#[test]
fn construct_rejects_a_field_too_small_for_the_strength() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("no.psca");
    let res = run(&[
        "construct",
        "--q",
        "2",
        "--t",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 2);
    assert!(stderr(&res).contains("error"));
    assert!(!out.exists(), "no partial file on refusal");
}

#[test]
fn construct_guards_huge_runs_behind_heavy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("big.psca");
    // PGL(4,4) has 987033600 elements; without --heavy the row guard fires.
    let res = run(&[
        "construct",
        "--q",
        "4",
        "--t",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 3);
    assert!(stderr(&res).contains("--heavy"));
}

#[test]
fn verify_flags_an_imperfect_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("identity.psca");
    fs::write(&path, "psca v=3 t=2 lambda=? count=1\n0 1 2\n").unwrap();
    let res = run(&["verify", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&res), 1);
    let v: Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert_eq!(v["perfect"], Value::Bool(false));
    // The identity covers exactly the ascending pairs: 3 covered once,
    // 3 not at all.
    assert_eq!(v["histogram"]["0"], 3);
    assert_eq!(v["histogram"]["1"], 3);
    assert!(!v["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn verify_rejects_malformed_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.psca");
    fs::write(&path, "psca v=3 t=2 lambda=? count=1\n0 1 1\n").unwrap();
    let res = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&res), 2, "repeated symbol in a row");

    let missing = dir.path().join("nope.psca");
    let res = run(&["verify", missing.to_str().unwrap()]);
    assert_eq!(code(&res), 2, "unreadable file");
}

#[test]
fn thm2_reports_perfect_coverage_on_the_fano_plane() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("asc2.json");
    let res = run(&[
        "thm2",
        "--q",
        "2",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 0, "stderr: {}", stderr(&res));
    let v: Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert_eq!(v["rows"], 168);
    assert_eq!(v["lambda_star"], 7);
    assert_eq!(v["census"]["frame"], 168);
    assert_eq!(v["histogram"]["7"], 840);
    assert_eq!(v["perfect_fraction"], 1.0);
    let on_disk: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(on_disk, v, "file and stdout reports agree");
}

#[test]
fn thm2_guards_heavy_orders() {
    let res = run(&["thm2", "--q", "5"]);
    assert_eq!(code(&res), 3);
    assert!(stderr(&res).contains("--heavy"));
}

#[test]
fn bound_prints_exact_integers() {
    let res = run(&["bound", "--v", "4", "--t", "4"]);
    assert_eq!(code(&res), 0);
    let text = stdout(&res);
    assert!(text.contains("q* = 3"));
    assert!(text.contains("234"));
    assert!(text.contains("798915"));

    let res = run(&["bound", "--v", "5", "--t", "4", "--format", "json"]);
    assert_eq!(code(&res), 0);
    let v: Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert_eq!(v["q_star"], 4);
    assert_eq!(v["constructive"], 2520);
}

#[test]
fn bound_requires_strength_at_least_four() {
    let res = run(&["bound", "--v", "4", "--t", "3"]);
    assert_eq!(code(&res), 2);
    let res = run(&["bound", "--v", "3", "--t", "4"]);
    assert_eq!(code(&res), 2);
}

#[test]
fn singer_computes_and_validates_sets() {
    let res = run(&["singer", "--q", "3", "--format", "json"]);
    assert_eq!(code(&res), 0);
    let v: Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert_eq!(v["r"], 13);
    assert_eq!(v["D"], serde_json::json!([0, 1, 3, 9]));
    assert_eq!(v["lines"].as_array().unwrap().len(), 13);

    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("shifted.txt");
    // A translate of {0, 1, 3}: validation normalizes it back.
    fs::write(&set, "# a shifted set\n1, 2, 4\n").unwrap();
    let res = run(&[
        "singer",
        "--q",
        "2",
        "--difference-set",
        set.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&res), 0, "stderr: {}", stderr(&res));
    let v: Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert_eq!(v["D"], serde_json::json!([0, 1, 3]));
}

#[test]
fn singer_rejects_defective_sets() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("bad.txt");
    fs::write(&set, "0 1 2\n").unwrap();
    let res = run(&[
        "singer",
        "--q",
        "2",
        "--difference-set",
        set.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 2, "0 1 2 misses the difference 3 mod 7");

    fs::write(&set, "0 1\n").unwrap();
    let res = run(&[
        "singer",
        "--q",
        "2",
        "--difference-set",
        set.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 2, "wrong entry count");

    fs::write(&set, "0 1 x\n").unwrap();
    let res = run(&[
        "singer",
        "--q",
        "2",
        "--difference-set",
        set.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 2, "non-integer token");
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.psca");
    let b = dir.path().join("b.psca");
    let ra = run(&[
        "construct",
        "--q",
        "3",
        "--t",
        "4",
        "--out",
        a.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    let rb = run(&[
        "construct",
        "--q",
        "3",
        "--t",
        "4",
        "--out",
        b.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert_eq!(code(&ra), 0);
    assert_eq!(code(&rb), 0);
    assert_eq!(stable_lines(&a), stable_lines(&b));

    // The analytics report is byte-identical including across thread counts.
    let ja = run(&["thm2", "--q", "3", "--format", "json", "--threads", "1"]);
    let jb = run(&["thm2", "--q", "3", "--format", "json", "--threads", "2"]);
    assert_eq!(stdout(&ja), stdout(&jb));
}
