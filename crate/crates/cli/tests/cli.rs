//! End-to-end runs of the `tacc` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SUM: &str = "\
var int n in;
var int k;
var int s out;
var int dead;
begin
  dead := n * 3;
  for k := 1 to n do
    s := s + k;
  end
end
";

fn tacc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tacc")).args(args).output().expect("spawn tacc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn compile_then_run() {
    let dir = TempDir::new().unwrap();
    let src = write(&dir, "sum.knl", SUM);
    let tac = dir.path().join("sum.tac").to_string_lossy().into_owned();
    let o = tacc(&["compile", &src, "-o", &tac]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(&tac).unwrap().contains("halt"));

    let o = tacc(&["run", &tac, "--input", "n=4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "halted s=10");
}

#[test]
fn run_reports_faults_and_fuel_with_exit_one() {
    let dir = TempDir::new().unwrap();
    let src = write(
        &dir,
        "div.knl",
        "var int d in; var int q out; begin q := 10 / d; end",
    );
    let o = tacc(&["run", &src, "--input", "d=0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("DivByZero"), "{}", stdout(&o));

    let src = write(&dir, "sum.knl", SUM);
    let o = tacc(&["run", &src, "--input", "n=1000", "--fuel", "50"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn run_rejects_missing_or_malformed_inputs() {
    let dir = TempDir::new().unwrap();
    let src = write(&dir, "sum.knl", SUM);
    assert_eq!(tacc(&["run", &src]).status.code(), Some(2));
    assert_eq!(tacc(&["run", &src, "--input", "n=x"]).status.code(), Some(2));
    assert_eq!(tacc(&["run", &src, "--input", "zz=1"]).status.code(), Some(2));
}

#[test]
fn corpus_kernels_match_expected_outputs() {
    for entry in fs::read_dir(corpus()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "knl") {
            continue;
        }
        let want = fs::read_to_string(path.with_extension("expected")).unwrap();
        let o = tacc(&["run", path.to_str().unwrap()]);
        assert_eq!(stdout(&o).trim(), want.trim(), "{}", path.display());
    }
}

#[test]
fn opt_emits_certificates_that_check() {
    let dir = TempDir::new().unwrap();
    let src = write(&dir, "sum.knl", SUM);
    let certs = dir.path().join("certs");
    let out = dir.path().join("sum.opt.tac");
    let o = tacc(&[
        "opt",
        &src,
        "--passes",
        "cp,uce,dae",
        "--emit-cert",
        certs.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stderr(&o).matches("accepted").count(), 3, "{}", stderr(&o));
    assert!(!fs::read_to_string(&out).unwrap().contains("dead :="));

    for stem in ["00_cp", "01_uce", "02_dae"] {
        let s = certs.join(format!("{stem}.src.tac"));
        let t = certs.join(format!("{stem}.tgt.tac"));
        let c = certs.join(format!("{stem}.cert"));
        let o = tacc(&[
            "check",
            s.to_str().unwrap(),
            t.to_str().unwrap(),
            c.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{stem}: {}{}", stdout(&o), stderr(&o));
        assert_eq!(stdout(&o).trim(), "accepted");
    }

    let o = tacc(&["run", out.to_str().unwrap(), "--input", "n=5"]);
    assert_eq!(stdout(&o).trim(), "halted s=15");
}

#[test]
fn check_rejects_a_tampered_certificate() {
    let dir = TempDir::new().unwrap();
    let src = write(&dir, "sum.knl", SUM);
    let certs = dir.path().join("certs");
    let o = tacc(&["opt", &src, "--passes", "dae", "--emit-cert", certs.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = certs.join("00_dae.src.tac");
    let t = certs.join("00_dae.tgt.tac");
    let c = certs.join("00_dae.cert");

    // Drop the program hashes so the checker judges the entries alone,
    // then remove the entry for the loop body.
    let text = fs::read_to_string(&c).unwrap();
    let kept: Vec<String> = text
        .lines()
        .filter(|l| !l.starts_with("map 3 2"))
        .map(|l| match l.strip_prefix("cert v1 stutter=") {
            Some(rest) => format!("cert v1 stutter={}", rest.split(' ').next().unwrap()),
            None => l.to_string(),
        })
        .collect();
    assert!(kept.len() < text.lines().count());
    let bad = write(&dir, "bad.cert", &(kept.join("\n") + "\n"));
    let o = tacc(&["check", s.to_str().unwrap(), t.to_str().unwrap(), &bad]);
    assert_eq!(o.status.code(), Some(1), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).starts_with("rejected"), "{}", stdout(&o));
}

#[test]
fn check_refuses_certificates_for_other_programs() {
    let dir = TempDir::new().unwrap();
    let src = write(&dir, "sum.knl", SUM);
    let certs = dir.path().join("certs");
    assert!(tacc(&["opt", &src, "--passes", "dae", "--emit-cert", certs.to_str().unwrap()]).status.success());
    let t = certs.join("00_dae.tgt.tac");
    let c = certs.join("00_dae.cert");
    // Source and target swapped.
    let o = tacc(&["check", t.to_str().unwrap(), t.to_str().unwrap(), c.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("different programs"), "{}", stderr(&o));
}

#[test]
fn plain_mode_runs_without_certificates() {
    let dir = TempDir::new().unwrap();
    let src = write(&dir, "sum.knl", SUM);
    let o = tacc(&["opt", &src, "--mode", "plain"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("ran"));
    let certs = dir.path().join("certs");
    let o = tacc(&["opt", &src, "--mode", "plain", "--emit-cert", certs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_json_has_statistics_per_phase() {
    let dir = TempDir::new().unwrap();
    fs::copy(corpus().join("k03_dot.knl"), dir.path().join("k03_dot.knl")).unwrap();
    let o = tacc(&["bench", dir.path().to_str().unwrap(), "--reps", "3", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let records: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let records = records.as_array().unwrap();
    assert_eq!(records.len(), 8);
    for r in records {
        for key in ["kernel", "pass", "phase", "mean_ms", "stddev_ms", "rsd_pct", "reps", "retained"] {
            assert!(r.get(key).is_some(), "missing {key} in {r}");
        }
        assert_eq!(r["retained"], 1);
    }
    assert!(records.iter().any(|r| r["phase"] == "chk" && r["chk_dominates"].is_boolean()));
}

#[test]
fn bench_table_and_small_reps() {
    let dir = TempDir::new().unwrap();
    fs::copy(corpus().join("k12_first_diff.knl"), dir.path().join("k12.knl")).unwrap();
    let o = tacc(&["bench", dir.path().to_str().unwrap(), "--reps", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("k12"));
    assert_eq!(tacc(&["bench", dir.path().to_str().unwrap(), "--reps", "2"]).status.code(), Some(2));
}

#[test]
fn fuzz_clean_build_passes_and_canary_fails() {
    let o = tacc(&["fuzz", "--trials", "40", "--seed", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["soundnessViolations"], 0);
    assert_eq!(report["trials"], 40);

    let o = tacc(&["fuzz", "--trials", "300", "--seed", "1", "--canary"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("soundness violations"));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(tacc(&[]).status.code(), Some(2));
    assert_eq!(tacc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(tacc(&["opt", "x.knl", "--passes", "nope"]).status.code(), Some(2));
    let bad = write(&dir, "bad.knl", "var int x out; begin x := ; end");
    let o = tacc(&["compile", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.knl"));
    assert_eq!(tacc(&["compile", "/nonexistent/file.knl"]).status.code(), Some(2));
    assert!(tacc(&["--help"]).status.success());
}
