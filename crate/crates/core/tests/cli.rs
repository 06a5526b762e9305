mod common;

use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::corpus_dir;

fn hammer() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hammer"));
    c.env_remove("HAMMER_PROVER");
    c
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn corpus(stem: &str) -> PathBuf {
    corpus_dir().join(format!("{stem}.sx"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn script(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = write(dir, name, &format!("#!/bin/sh\n{body}\n"));
    std::fs::set_permissions(&p, std::fs::Permissions::from_mode(0o755)).unwrap();
    p
}

fn axiom_count(tptp: &str) -> usize {
    tptp.lines()
        .filter(|l| l.starts_with("fof(") && !l.contains(", conjecture,"))
        .count()
}

const TOY: &str = "fof(a0, axiom, a).\nfof(a1, axiom, (a => b)).\nfof(goal, conjecture, b).\n";
const OPEN: &str = "fof(a0, axiom, a).\nfof(goal, conjecture, b).\n";

#[test]
fn translate_writes_tptp() {
    let o = hammer()
        .arg("translate")
        .arg(corpus("logic"))
        .args(["--conjecture", "and_comm"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("fof(and_comm, conjecture,"));
    assert!(text.contains("% origin"));
}

#[test]
fn translate_depth_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let premises = write(dir.path(), "premises.json", "[\"plus_S_n\"]");
    let count = |depth: &str| {
        let o = hammer()
            .arg("translate")
            .arg(corpus("nat"))
            .args(["--conjecture", "plus_S_comm", "--depth", depth, "--premises"])
            .arg(&premises)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        axiom_count(&stdout(&o))
    };
    let (d0, d1, d2) = (count("0"), count("1"), count("2"));
    assert!(d0 > 0 && d0 <= d1 && d1 <= d2, "{d0} {d1} {d2}");

    let plain = write(dir.path(), "premises.txt", "plus_S_n\nplus_O_n");
    let o = hammer()
        .arg("translate")
        .arg(corpus("nat"))
        .args(["--conjecture", "plus_S_comm", "--depth", "0", "--premises"])
        .arg(&plain)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(axiom_count(&stdout(&o)) >= d0);
}

#[test]
fn translate_options_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.p");
    let diag = dir.path().join("diag.txt");
    let o = hammer()
        .arg("translate")
        .arg(corpus("arith"))
        .args(["--conjecture", "one_plus_one", "--arity-opt", "-o"])
        .arg(&out)
        .arg("--diag")
        .arg(&diag)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().contains("conjecture"));
    assert!(diag.exists());

    let unknown = hammer()
        .arg("translate")
        .arg(corpus("arith"))
        .args(["--conjecture", "no_such"])
        .output()
        .unwrap();
    assert_eq!(unknown.status.code(), Some(2));

    let not_prop = hammer()
        .arg("translate")
        .arg(corpus("arith"))
        .args(["--conjecture", "plus"])
        .output()
        .unwrap();
    assert_eq!(not_prop.status.code(), Some(1));

    let missing = hammer()
        .arg("translate")
        .arg(dir.path().join("absent.sx"))
        .args(["--conjecture", "x"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn prove_reports_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let toy = write(dir.path(), "toy.p", TOY);
    let o = hammer().arg("prove").arg(&toy).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("% SZS status Theorem for goal"));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["status"], "Theorem");
    let labels: Vec<&str> = report["labels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(labels.contains(&"a0") && labels.contains(&"a1"));

    let o = hammer()
        .arg("prove")
        .arg(&toy)
        .args(["--timeout", "0"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(stderr(&o).contains("% SZS status Timeout"));

    let open = write(dir.path(), "open.p", OPEN);
    let o = hammer().arg("prove").arg(&open).output().unwrap();
    assert!(o.status.success());
    assert!(stderr(&o).contains("% SZS status CounterSatisfiable"));

    let bad = write(dir.path(), "bad.p", "fof(goal, conjecture, (a & ).\n");
    assert_eq!(hammer().arg("prove").arg(&bad).output().unwrap().status.code(), Some(1));
}

#[test]
fn prove_drives_external_provers() {
    let dir = tempfile::tempdir().unwrap();
    let toy = write(dir.path(), "toy.p", TOY);
    let fake = script(
        dir.path(),
        "fake_prover",
        "echo \"% SZS status Theorem for $1\"\necho '% SZS output start CNFRefutation'\necho \"fof(a1, axiom, (a => b), file('$1', a1)).\"\necho '% SZS output end CNFRefutation'",
    );
    let o = hammer()
        .arg("prove")
        .arg(&toy)
        .arg("--prover")
        .arg(format!("{} {{file}}", fake.display()))
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["status"], "Theorem");
    assert_eq!(report["labels"], serde_json::json!(["a1"]));

    let o = hammer()
        .arg("prove")
        .arg(&toy)
        .env("HAMMER_PROVER", fake.display().to_string())
        .output()
        .unwrap();
    assert!(stderr(&o).contains("Theorem"));

    let slow = script(dir.path(), "slow_prover", "sleep 20");
    let o = hammer()
        .arg("prove")
        .arg(&toy)
        .arg("--prover")
        .arg(slow.display().to_string())
        .args(["--timeout", "1"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(stderr(&o).contains("% SZS status Timeout"));

    let o = hammer()
        .arg("prove")
        .arg(&toy)
        .args(["--prover", "/nonexistent/prover {file}"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn reconstruct_paths() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("p.p");
    let o = hammer()
        .arg("translate")
        .arg(corpus("nat"))
        .args(["--conjecture", "plus_S_comm", "-o"])
        .arg(&problem)
        .output()
        .unwrap();
    assert!(o.status.success());
    let hints = dir.path().join("hints.json");
    let o = hammer().arg("prove").arg(&problem).output().unwrap();
    std::fs::write(&hints, &o.stdout).unwrap();

    let trace = dir.path().join("trace.json");
    let o = hammer()
        .arg("reconstruct")
        .arg(corpus("nat"))
        .args(["--conjecture", "plus_S_comm", "--hints"])
        .arg(&hints)
        .arg("-o")
        .arg(&trace)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let t: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(t.is_object());

    let o = hammer()
        .arg("reconstruct")
        .arg(corpus("nat"))
        .args(["--conjecture", "plus_S_comm"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));

    let o = hammer()
        .arg("reconstruct")
        .arg(corpus("logic"))
        .args(["--conjecture", "peirce", "--depth", "0", "--timeout", "5"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));

    let bogus = write(dir.path(), "bogus.json", "{\"lemmas\": [\"no_such_lemma\"]}");
    let o = hammer()
        .arg("reconstruct")
        .arg(corpus("nat"))
        .args(["--conjecture", "plus_S_comm", "--hints"])
        .arg(&bogus)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));

    let o = hammer()
        .arg("reconstruct")
        .arg(corpus("nat"))
        .args(["--conjecture", "no_such"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_tables_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = hammer().arg("bench").arg(dir.path()).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("(0 problems)"));

    let data = dir.path().join("data");
    std::fs::create_dir(&data).unwrap();
    std::fs::copy(corpus("nat"), data.join("nat.sx")).unwrap();
    std::fs::copy(corpus_dir().join("nat.problems.json"), data.join("nat.problems.json")).unwrap();
    let csv = dir.path().join("out.csv");
    let o = hammer()
        .arg("bench")
        .arg(&data)
        .args(["--reconstruct", "--csv"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let tables = stdout(&o);
    assert!(tables.contains("builtin") && tables.contains("with hints"), "{tables}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "file,conjecture,prover,status,axioms,labels,lemmas,unfolds,rec_hints,rec_no_hints,atp_ms,rec_ms"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("nat,plus_S_comm,builtin,Theorem,"), "{row}");
    assert!(row.contains(",ok,"));
    assert!(lines.next().is_none());
}

#[test]
fn self_check_quick_passes() {
    let o = hammer().args(["self-check", "--quick"]).output().unwrap();
    assert!(o.status.success(), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS ")).count(), 4, "{out}");
}
