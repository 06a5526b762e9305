//! End-to-end acceptance criteria. Each test prints one `[criterion N]`
//! line with its verdict before asserting.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hammer_core::folir::{parse_tptp, to_tptp, AtpStatus};
use hammer_core::kernel::{is_prop, Context, Declaration, Environment};
use hammer_core::miniatp::{prove_builtin, run_external, ExternalOptions, Limits};
use hammer_core::pipeline::{golden_tptp, load_corpus, read_csv, reconstruct, ProveReport};
use hammer_core::reconstruct::{Budget, Hints};
use hammer_core::selfcheck::{cc_sweep, classical_leak_check, clausify_sweep, ipc_sweep};
use hammer_core::translate::{build_problem, Premises};

use common::{canonical_text, corpus_dir, corpus_env, proof_sites, replace_with_opaque, STEMS};

fn report(n: u32, ok: bool, detail: impl std::fmt::Display) {
    println!("[criterion {n}] {} {detail}", if ok { "PASS" } else { "FAIL" });
}

fn hammer() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hammer"))
}

#[test]
fn criterion_1_encoding_golden() {
    let start = Instant::now();
    let bless = std::env::var_os("HAMMER_BLESS").is_some();
    let mut decls = 0;
    let mut mismatched = Vec::new();
    let mut all = String::new();
    for stem in STEMS {
        let env = corpus_env(stem);
        decls += env.len();
        let text = golden_tptp(&env).unwrap();
        let path = corpus_dir().join("golden").join(format!("{stem}.p"));
        if bless {
            std::fs::write(&path, &text).unwrap();
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_default();
        if expected != text {
            mismatched.push(stem);
        }
        all.push_str(&text);
    }
    let elapsed = start.elapsed();
    let covered = [
        "% origin pi_0 lifted",
        "% origin lam_0 lifted",
        "% origin case_0 lifted",
        " injectivity ",
        " discrimination ",
        " inversion ",
    ]
    .iter()
    .all(|k| all.contains(k));
    let ok = mismatched.is_empty() && decls >= 30 && covered && elapsed < Duration::from_secs(5);
    report(
        1,
        ok,
        format!("{decls} declarations, mismatched {mismatched:?}, all constructs covered: {covered}, {elapsed:.2?}"),
    );
    assert!(ok);
}

/// First proposition declared after `decl`, or `decl` itself when it is
/// one and nothing follows.
fn conjecture_after(env: &Environment, decl: usize) -> Option<String> {
    let props: Vec<(usize, &Declaration)> = env
        .decls()
        .enumerate()
        .filter(|(_, d)| match d {
            Declaration::Definition { ty, .. } | Declaration::Typing { ty, .. } => is_prop(env, &Context::new(), ty),
            Declaration::Inductive(_) => false,
        })
        .collect();
    props
        .iter()
        .find(|(i, _)| *i > decl)
        .or_else(|| props.iter().find(|(i, _)| *i == decl))
        .map(|(_, d)| d.name().to_string())
}

#[test]
fn criterion_2_proof_irrelevance() {
    let envs: Vec<(&str, Environment)> = STEMS.iter().map(|s| (*s, corpus_env(s))).collect();
    let mut sites = Vec::new();
    for (k, (_, env)) in envs.iter().enumerate() {
        for s in proof_sites(env) {
            if let Some(c) = conjecture_after(env, s.decl) {
                sites.push((k, s, c));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e1e);
    let mut violations = Vec::new();
    let trials = 100;
    for t in 0..trials {
        let (k, site, conj) = &sites[rng.gen_range(0..sites.len())];
        let (stem, env) = &envs[*k];
        let fresh = format!("opaque_proof_{t}");
        let env2 = replace_with_opaque(env, site, &fresh);
        let before = build_problem(env, conj, &Premises::all(), 2).unwrap();
        let after = build_problem(&env2, conj, &Premises::all(), 2).unwrap();
        if canonical_text(&before.problem, &fresh) != canonical_text(&after.problem, &fresh) {
            let name = env.decls().nth(site.decl).unwrap().name().to_string();
            violations.push(format!("{stem}:{name} at {:?} ({:?})", site.path, site.part));
        }
    }
    let ok = violations.is_empty();
    report(
        2,
        ok,
        format!(
            "{trials} replacements over {} proof sites, {} violations {violations:?}",
            sites.len(),
            violations.len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_3_clausification_soundness() {
    let o = clausify_sweep(2, 2);
    let ok = o.passed() && o.elapsed < Duration::from_secs(60);
    report(3, ok, &o);
    assert!(ok, "{:?}", o.failures);
}

#[test]
fn criterion_4_hammer_loop() {
    let start = Instant::now();
    let corpus = load_corpus(&corpus_dir()).unwrap();
    let budget = Budget::default();
    let mut subset = 0;
    let (mut with, mut without) = (0, 0);
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    for file in &corpus {
        for spec in file.specs.iter().filter(|s| s.acceptance) {
            subset += 1;
            let t0 = Instant::now();
            let built = build_problem(&file.env, &spec.conjecture, &spec.premises, spec.depth).unwrap();
            let limits = Limits {
                max_seconds: 30.0,
                ..Limits::default()
            };
            let result = prove_builtin(&built.problem, &limits);
            if result.status != AtpStatus::Theorem {
                failures.push(format!("{}: ATP {}", spec.conjecture, result.status.as_str()));
                continue;
            }
            let report = ProveReport::new(&built.problem, &result);
            let hints = Hints {
                lemmas: report.lemmas,
                unfolds: report.unfolds,
            };
            match reconstruct(&file.env, &spec.conjecture, &hints, &budget) {
                Ok(_) => with += 1,
                Err(e) => failures.push(format!("{}: {e}", spec.conjecture)),
            }
            let elapsed = t0.elapsed();
            slowest = slowest.max(elapsed);
            if elapsed > Duration::from_secs(30) {
                failures.push(format!("{}: took {elapsed:.2?}", spec.conjecture));
            }
            if reconstruct(&file.env, &spec.conjecture, &Hints::default(), &budget).is_ok() {
                without += 1;
            }
        }
    }
    let total = start.elapsed();
    let ok =
        subset == 20 && with == subset && failures.is_empty() && total < Duration::from_secs(300) && with > without;
    report(
        4,
        ok,
        format!(
            "{with}/{subset} reconstructed with hints, {without}/{subset} without; slowest {slowest:.2?}, total {total:.2?} {failures:?}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_5_ipc_oracle() {
    let sweep = ipc_sweep(3, 4);
    let leak = classical_leak_check();
    let ok = sweep.passed() && leak.passed() && sweep.checked == 1_462_868 && leak.checked == 11;
    report(5, ok, format!("{sweep}; {leak}"));
    assert!(ok, "{:?} {:?}", sweep.failures, leak.failures);
}

#[test]
fn criterion_6_congruence_oracle() {
    let (o, positive) = cc_sweep(1000, 0);
    let ok = o.passed() && o.checked == 1000;
    report(6, ok, format!("{o} ({positive} entailed)"));
    assert!(ok, "{:?}", o.failures);
}

fn run_ok(cmd: &mut Command) -> Vec<u8> {
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn normalized_csv(path: &Path) -> Vec<Vec<(String, String)>> {
    let rows = read_csv(std::fs::File::open(path).unwrap()).unwrap();
    let mut rows: Vec<Vec<(String, String)>> = rows
        .into_iter()
        .map(|r| r.into_iter().filter(|(k, _)| !k.ends_with("_ms")).collect())
        .collect();
    rows.sort();
    rows
}

#[test]
fn criterion_7_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let arith = corpus_dir().join("arith.sx");
    let translate = |out: &PathBuf| {
        run_ok(
            hammer()
                .arg("translate")
                .arg(&arith)
                .args(["--conjecture", "one_plus_one", "-o"])
                .arg(out),
        );
        std::fs::read(out).unwrap()
    };
    let t1 = translate(&dir.path().join("a.p"));
    let t2 = translate(&dir.path().join("b.p"));

    let hints = dir.path().join("hints.json");
    std::fs::write(&hints, run_ok(hammer().arg("prove").arg(dir.path().join("a.p")))).unwrap();
    let rec = |out: &PathBuf| {
        run_ok(
            hammer()
                .arg("reconstruct")
                .arg(&arith)
                .args(["--conjecture", "one_plus_one", "--depth", "8", "--hints"])
                .arg(&hints)
                .arg("-o")
                .arg(out),
        );
        std::fs::read(out).unwrap()
    };
    let r1 = rec(&dir.path().join("r1.json"));
    let r2 = rec(&dir.path().join("r2.json"));

    let bench = |workers: &str, out: &PathBuf| {
        run_ok(
            hammer()
                .arg("bench")
                .arg(corpus_dir())
                .args(["--workers", workers, "--reconstruct", "--csv"])
                .arg(out),
        );
        normalized_csv(out)
    };
    let b1 = bench("1", &dir.path().join("w1.csv"));
    let b8 = bench("8", &dir.path().join("w8.csv"));

    let ok = t1 == t2 && r1 == r2 && b1 == b8 && !b1.is_empty();
    report(
        7,
        ok,
        format!(
            "translate identical: {}, reconstruct identical: {}, bench CSV identical across 1/8 workers: {} ({} rows)",
            t1 == t2,
            r1 == r2,
            b1 == b8,
            b1.len()
        ),
    );
    assert!(ok);
}

fn on_path(program: &str) -> bool {
    std::env::var_os("PATH")
        .map(|p| std::env::split_paths(&p).any(|d| d.join(program).is_file()))
        .unwrap_or(false)
}

/// `$HAMMER_PROVER`, else E or Vampire when installed.
fn external_prover() -> Option<String> {
    if let Ok(cmd) = std::env::var("HAMMER_PROVER") {
        if cmd != "builtin" {
            return Some(cmd);
        }
    }
    if on_path("eprover") {
        return Some("eprover --auto --tstp-format --proof-object --cpu-limit={t} {file}".to_string());
    }
    if on_path("vampire") {
        return Some("vampire --mode casc --proof tptp -t {t} {file}".to_string());
    }
    None
}

#[test]
fn criterion_8_external_prover() {
    let Some(cmd) = external_prover() else {
        report(8, true, "SKIP: no external prover installed");
        return;
    };
    let corpus = load_corpus(&corpus_dir()).unwrap();
    let (mut total, mut proved) = (0, 0);
    let mut bad_labels = Vec::new();
    for file in &corpus {
        for spec in &file.specs {
            total += 1;
            let built = build_problem(&file.env, &spec.conjecture, &spec.premises, spec.depth).unwrap();
            let p = parse_tptp(&to_tptp(&built.problem).unwrap()).unwrap();
            let result = match run_external(&p, &cmd, Duration::from_secs(30), &ExternalOptions::default()) {
                Ok((r, _)) => r,
                Err(e) => {
                    report(8, false, format!("prover failed to run: {e}"));
                    panic!("{e}");
                }
            };
            if result.status != AtpStatus::Theorem {
                continue;
            }
            proved += 1;
            let cited: Vec<String> = result
                .used_labels
                .iter()
                .filter(|l| p.find(l).is_some())
                .cloned()
                .collect();
            let again = prove_builtin(&p.restrict(&cited), &Limits::default());
            if again.status != AtpStatus::Theorem {
                bad_labels.push(spec.conjecture.clone());
            }
        }
    }
    let ok = proved * 100 >= total * 95 && bad_labels.is_empty();
    report(
        8,
        ok,
        format!("{proved}/{total} proved by `{cmd}`, label sets not re-proved: {bad_labels:?}"),
    );
    assert!(ok);
}
