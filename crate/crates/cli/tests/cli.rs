use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

const G4: &str = "c four vertices\np sp 4 5\na 1 2 1\na 2 3 1\na 3 4 1\na 1 3 5\na 2 4 5\n";
const G5: &str = "p sp 5 5\na 1 2 1\na 2 3 1\na 3 4 1\na 4 5 1\na 1 5 10\n";

fn dso() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dso"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let out = cmd.output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn query(oracle: &Path, input: &str, extra: &[&str]) -> Output {
    let mut child = dso().arg("query").arg(oracle).args(extra).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stat(report: &str, name: &str) -> usize {
    let line = report.lines().find(|l| l.starts_with(&format!("{name}:"))).unwrap_or_else(|| panic!("no {name} in {report}"));
    line.rsplit(' ').next().unwrap().parse().unwrap()
}

fn built(dir: &TempDir, graph: &str, args: &[&str]) -> PathBuf {
    let g = write(dir, "g.gr", graph);
    let out = dir.path().join("g.dso");
    let (code, _, err) = run(dso().arg("build").arg(&g).args(args).arg("-o").arg(&out));
    assert_eq!(code, 0, "{err}");
    out
}

#[test]
fn build_reports_counts_and_time() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g5.gr", G5);
    let out = dir.path().join("g5.dso");
    let (code, report, _) = run(dso().args(["build", "--mode", "full"]).arg(&g).arg("-o").arg(&out));
    assert_eq!(code, 0);
    assert!(out.exists());
    assert!(stat(&report, "level-2 entries") > 0, "{report}");
    assert!(report.contains("wall time:"));
    let (code, stats, _) = run(dso().arg("stats").arg(&out));
    assert_eq!(code, 0);
    assert_eq!(stat(&stats, "total entries"), stat(&report, "total entries"));
}

#[test]
fn baseline_on_two_vertices_has_no_interior_entries() {
    let dir = TempDir::new().unwrap();
    let out = built(&dir, "p sp 2 1\na 1 2 3\n", &["--mode", "baseline"]);
    let (_, stats, _) = run(dso().arg("stats").arg(&out));
    assert_eq!(stat(&stats, "sparse table entries"), 0);
    let o = query(&out, "1 2 1\n2 1 1\n", &[]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "err\nerr\n");
}

#[test]
fn conflicting_lengths_are_rejected() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g4.gr", G4);
    let out = dir.path().join("x.dso");
    let (code, _, err) = run(dso().args(["build", "--L", "3", "--Lp", "8"]).arg(&g).arg("-o").arg(&out));
    assert_eq!(code, 1);
    assert!(err.contains("exceeds"), "{err}");
    assert!(!out.exists());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(dso().arg("frobnicate")).0, 1);
    assert_eq!(run(dso().args(["build", "--mode", "quadratic", "g", "-o", "x"])).0, 1);
    assert_eq!(run(dso().arg("--help")).0, 0);
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "bad.gr", "p sp 2 1\na 1 3 1\n");
    assert_eq!(run(dso().arg("build").arg(&g).arg("-o").arg(dir.path().join("x"))).0, 1);
}

#[test]
fn every_command_has_help() {
    for cmd in ["build", "query", "verify", "bench", "stats"] {
        let (code, out, _) = run(dso().args([cmd, "--help"]));
        assert_eq!(code, 0, "{cmd}");
        assert!(out.starts_with(|c: char| c.is_uppercase()), "{cmd}: {out}");
    }
}

#[test]
fn queries_are_one_based() {
    let dir = TempDir::new().unwrap();
    for mode in ["baseline", "loglog", "full"] {
        let out = built(&dir, G4, &["--mode", mode]);
        let o = query(&out, "1 4 3\n1 4 1\n1 2 4\n\n7 1 2\n1 4\nx y z\n4 1 2\n", &[]);
        assert!(o.status.success());
        assert_eq!(String::from_utf8(o.stdout).unwrap(), "6\nerr\n1\nerr\nerr\nerr\ninf\n", "{mode}");
    }
}

#[test]
fn paths_are_appended() {
    let dir = TempDir::new().unwrap();
    let out = built(&dir, G4, &["--mode", "full", "--provider", "naive"]);
    let o = query(&out, "1 4 3\n1 4 2\n4 1 2\n", &["--path"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "6\t1 2 4\n6\t1 3 4\ninf\n");
}

#[test]
fn queries_from_file() {
    let dir = TempDir::new().unwrap();
    let out = built(&dir, G5, &["--mode", "loglog"]);
    let q = write(&dir, "q.txt", "1 5 3\n1 3 5\n");
    let (code, answers, _) = run(dso().arg("query").arg(&out).arg(&q));
    assert_eq!(code, 0);
    assert_eq!(answers, "10\n2\n");
}

#[test]
fn verify_passes_and_catches_corruption() {
    let (code, out, _) = run(dso().args(["verify", "--seeds", "1", "--sizes", "12"]));
    assert_eq!(code, 0, "{out}");
    assert!(out.ends_with("PASS\n"));
    let (code, out, _) = run(dso().args(["verify", "--seeds", "1", "--sizes", "12", "--mode", "full", "--L", "4", "--Lp", "2", "--corrupt"]));
    assert_eq!(code, 2);
    assert!(out.contains("MISMATCH") && out.ends_with("FAIL\n"), "{out}");
}

#[test]
fn verify_one_graph() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g4.gr", G4);
    let (code, out, _) = run(dso().arg("verify").arg(&g).args(["--mode", "loglog", "--provider", "naive"]));
    assert_eq!(code, 0, "{out}");
}

#[test]
fn bench_writes_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("b.csv");
    let (code, _, err) = run(dso().args(["bench", "--sizes", "16,25", "--family", "grid"]).arg("-o").arg(&csv).env("DSO_THREADS", "2"));
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,mode,entries,entries_per_n2,build_ms,mean_probes,mean_query_ns"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows.iter().map(|r| r[1]).collect::<Vec<_>>(), ["baseline", "loglog", "full", "baseline", "loglog", "full"]);
    assert!(rows.iter().all(|r| r.len() == 7 && r[2].parse::<u64>().unwrap() > 0));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let (code, _, err) = run(dso().args(["verify", "--seeds", "1", "--sizes", "12"]).env("DSO_THREADS", "lots"));
    assert_eq!(code, 1);
    assert!(err.contains("DSO_THREADS"));
}
