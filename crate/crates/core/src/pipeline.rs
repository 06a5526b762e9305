//! The full loop over a corpus: translate, prove, extract hints,
//! reconstruct, and the summary tables of a bench run.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::encoder::EncoderState;
use crate::folir::{axioms_to_tptp, simplify, AtpResult, AtpStatus, FolError, Problem};
use crate::kernel::{is_prop, parse_env, Context, Declaration, Environment, KernelError};
use crate::miniatp::{prove_builtin, run_external, ExternalOptions, Limits, MiniAtpError};
use crate::reconstruct::{
    check_trace, flatten_named, hints_from_labels, prove_seq, Budget, Fail, Hints, ProofTrace, ReconstructError,
    TraceError,
};
use crate::translate::{build_problem, translate_decl, Premises, ProblemSpec, TranslateError};

/// Environment variable holding the default prover command template.
pub const PROVER_ENV: &str = "HAMMER_PROVER";

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: KernelError },
    #[error("{path}: bad problem manifest: {source}")]
    Manifest { path: PathBuf, source: serde_json::Error },
}

/// One `.sx` file with the problems posed on it.
#[derive(Clone, Debug)]
pub struct CorpusFile {
    pub stem: String,
    pub path: PathBuf,
    pub env: Environment,
    pub specs: Vec<ProblemSpec>,
}

/// Every declaration whose type is a proposition, with all earlier
/// declarations as premises.
pub fn default_specs(env: &Environment) -> Vec<ProblemSpec> {
    env.decls()
        .filter_map(|d| match d {
            Declaration::Definition { name, ty, .. } | Declaration::Typing { name, ty }
                if is_prop(env, &Context::new(), ty) =>
            {
                Some(ProblemSpec {
                    conjecture: name.clone(),
                    premises: Premises::all(),
                    depth: 2,
                    acceptance: false,
                })
            }
            _ => None,
        })
        .collect()
}

/// Axioms of every declaration, each translated on its own, as TPTP with
/// a `% declaration NAME` line before each group.
pub fn golden_tptp(env: &Environment) -> Result<String, GoldenError> {
    let mut out = String::new();
    for d in env.decls() {
        let mut st = EncoderState::new(env);
        let mut axioms = translate_decl(&mut st, d)?;
        for ax in &mut axioms {
            ax.formula = simplify(&ax.formula);
        }
        let _ = writeln!(out, "% declaration {}", d.name());
        out.push_str(&axioms_to_tptp(&axioms)?);
    }
    Ok(out)
}

#[derive(Debug, thiserror::Error)]
pub enum GoldenError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Fol(#[from] FolError),
}

pub fn load_file(path: &Path) -> Result<CorpusFile, PipelineError> {
    let io = |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    };
    let text = std::fs::read_to_string(path).map_err(io)?;
    let env = parse_env(&text).map_err(|source| PipelineError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_default();
    let manifest = path.with_file_name(format!("{stem}.problems.json"));
    let specs = if manifest.exists() {
        let text = std::fs::read_to_string(&manifest).map_err(|source| PipelineError::Io {
            path: manifest.clone(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| PipelineError::Manifest {
            path: manifest.clone(),
            source,
        })?
    } else {
        default_specs(&env)
    };
    Ok(CorpusFile {
        stem,
        path: path.to_path_buf(),
        env,
        specs,
    })
}

/// The `.sx` files of a directory, sorted by name, each with its
/// `<stem>.problems.json` manifest or the default problems.
pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusFile>, PipelineError> {
    let entries = std::fs::read_dir(dir).map_err(|source| PipelineError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "sx"))
        .collect();
    paths.sort();
    paths.iter().map(|p| load_file(p)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prover {
    Builtin,
    /// Command template with `{file}` and `{t}` placeholders.
    External(String),
}

impl Prover {
    /// `builtin` or anything else as a command template.
    pub fn parse(s: &str) -> Self {
        if s == "builtin" {
            Prover::Builtin
        } else {
            Prover::External(s.to_string())
        }
    }

    /// `$HAMMER_PROVER` if set, else the builtin prover.
    pub fn from_env() -> Self {
        std::env::var(PROVER_ENV)
            .map(|s| Prover::parse(&s))
            .unwrap_or(Prover::Builtin)
    }

    pub fn name(&self) -> String {
        match self {
            Prover::Builtin => "builtin".to_string(),
            Prover::External(cmd) => shlex::split(cmd)
                .and_then(|w| w.into_iter().next())
                .map(|w| {
                    Path::new(&w)
                        .file_name()
                        .map(|n| n.to_string_lossy().to_string())
                        .unwrap_or(w)
                })
                .unwrap_or_else(|| cmd.clone()),
        }
    }

    pub fn run(&self, p: &Problem, timeout: Duration, opts: &ExternalOptions) -> Result<AtpResult, MiniAtpError> {
        match self {
            Prover::Builtin => Ok(prove_builtin(
                p,
                &Limits {
                    max_seconds: timeout.as_secs_f64(),
                    ..Limits::default()
                },
            )),
            Prover::External(cmd) => run_external(p, cmd, timeout, opts).map(|(r, _)| r),
        }
    }
}

/// What `prove` prints and `reconstruct` reads: the status, the cited
/// labels and the hints derived from them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProveReport {
    pub status: String,
    pub labels: Vec<String>,
    pub lemmas: Vec<String>,
    pub unfolds: Vec<String>,
}

impl ProveReport {
    pub fn new(problem: &Problem, result: &AtpResult) -> Self {
        let hints = if result.status == AtpStatus::Theorem {
            hints_from_labels(problem, &result.used_labels)
        } else {
            Hints::default()
        };
        ProveReport {
            status: result.status.as_str().to_string(),
            labels: result.used_labels.clone(),
            lemmas: hints.lemmas,
            unfolds: hints.unfolds,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReconstructFailure {
    #[error(transparent)]
    Setup(#[from] ReconstructError),
    #[error(transparent)]
    Search(#[from] Fail),
    #[error("trace rejected by the checker: {0}")]
    Replay(#[from] TraceError),
}

/// Flattens the named statement with the hints, searches, and replays the
/// trace before returning it.
pub fn reconstruct(
    env: &Environment,
    name: &str,
    hints: &Hints,
    budget: &Budget,
) -> Result<ProofTrace, ReconstructFailure> {
    let seq = flatten_named(env, name, hints)?;
    let trace = prove_seq(&seq, budget)?;
    check_trace(&seq, &trace)?;
    Ok(trace)
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub provers: Vec<Prover>,
    pub timeout: Duration,
    pub workers: usize,
    /// Reconstruction budget; `None` skips reconstruction.
    pub reconstruct: Option<Budget>,
    pub external: ExternalOptions,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            provers: vec![Prover::Builtin],
            timeout: Duration::from_secs(30),
            workers: 1,
            reconstruct: None,
            external: ExternalOptions::default(),
        }
    }
}

/// Outcome of reconstructing one goal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecStatus {
    Ok,
    Fail,
    Skipped,
}

impl RecStatus {
    fn of<T, E>(r: &Result<T, E>) -> Self {
        if r.is_ok() {
            RecStatus::Ok
        } else {
            RecStatus::Fail
        }
    }
}

/// One CSV row: a conjecture attacked by one prover.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub file: String,
    pub conjecture: String,
    pub prover: String,
    pub status: String,
    pub axioms: usize,
    pub labels: usize,
    pub lemmas: usize,
    pub unfolds: usize,
    pub rec_hints: RecStatus,
    pub rec_no_hints: RecStatus,
    pub atp_ms: u128,
    pub rec_ms: u128,
}

impl BenchRow {
    pub fn solved(&self) -> bool {
        self.status == AtpStatus::Theorem.as_str()
    }

    /// Everything except the timing columns.
    pub fn reproducible(&self) -> BenchRow {
        BenchRow {
            atp_ms: 0,
            rec_ms: 0,
            ..self.clone()
        }
    }
}

fn run_spec(file: &CorpusFile, spec: &ProblemSpec, opts: &BenchOptions) -> Vec<BenchRow> {
    let row = |prover: &Prover, status: &str| BenchRow {
        file: file.stem.clone(),
        conjecture: spec.conjecture.clone(),
        prover: prover.name(),
        status: status.to_string(),
        axioms: 0,
        labels: 0,
        lemmas: 0,
        unfolds: 0,
        rec_hints: RecStatus::Skipped,
        rec_no_hints: RecStatus::Skipped,
        atp_ms: 0,
        rec_ms: 0,
    };
    let built = match build_problem(&file.env, &spec.conjecture, &spec.premises, spec.depth) {
        Ok(b) => b,
        Err(e) => {
            let tag = match e {
                TranslateError::UnknownName(_) => "UnknownName",
                _ => "TranslateError",
            };
            return opts.provers.iter().map(|p| row(p, tag)).collect();
        }
    };
    let no_hints = opts.reconstruct.map(|b| {
        let start = Instant::now();
        let r = reconstruct(&file.env, &spec.conjecture, &Hints::default(), &b);
        (RecStatus::of(&r), start.elapsed())
    });
    opts.provers
        .iter()
        .map(|prover| {
            let mut r = row(prover, "");
            r.axioms = built.problem.axioms.len();
            let result = prover
                .run(&built.problem, opts.timeout, &opts.external)
                .unwrap_or_else(|_| AtpResult::new(AtpStatus::Error));
            r.atp_ms = result.wall_time.as_millis();
            r.status = result.status.as_str().to_string();
            let report = ProveReport::new(&built.problem, &result);
            r.labels = report.labels.len();
            r.lemmas = report.lemmas.len();
            r.unfolds = report.unfolds.len();
            if let (Some(budget), Some((status, elapsed))) = (opts.reconstruct, no_hints) {
                r.rec_no_hints = status;
                r.rec_ms = elapsed.as_millis();
                if r.solved() {
                    let hints = Hints {
                        lemmas: report.lemmas,
                        unfolds: report.unfolds,
                    };
                    let start = Instant::now();
                    r.rec_hints = RecStatus::of(&reconstruct(&file.env, &spec.conjecture, &hints, &budget));
                    r.rec_ms += start.elapsed().as_millis();
                }
            }
            r
        })
        .collect()
}

/// Runs every problem of the corpus on a pool of `opts.workers` threads,
/// one problem per task. Rows come back in corpus order (files by name,
/// then manifest order), one per prover in the order given.
pub fn bench(corpus: &[CorpusFile], opts: &BenchOptions) -> Vec<BenchRow> {
    let jobs: Vec<(&CorpusFile, &ProblemSpec)> = corpus
        .iter()
        .flat_map(|f| f.specs.iter().map(move |s| (f, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| jobs.par_iter().map(|(f, s)| run_spec(f, s, opts)).collect::<Vec<_>>())
        .into_iter()
        .flatten()
        .collect()
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<BTreeMap<String, String>>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

fn pct(n: usize, d: usize) -> String {
    if d == 0 {
        "-".to_string()
    } else {
        format!("{:.1}", 100.0 * n as f64 / d as f64)
    }
}

/// Per-prover solved counts, problems only that prover solved, and the
/// union as a `Sum` row.
pub fn prover_table(rows: &[BenchRow]) -> String {
    let mut provers: Vec<&str> = Vec::new();
    let mut solved: BTreeMap<&str, Vec<(&str, &str)>> = BTreeMap::new();
    let mut problems: Vec<(&str, &str)> = Vec::new();
    for r in rows {
        if !provers.contains(&r.prover.as_str()) {
            provers.push(&r.prover);
        }
        let key = (r.file.as_str(), r.conjecture.as_str());
        if !problems.contains(&key) {
            problems.push(key);
        }
        let entry = solved.entry(&r.prover).or_default();
        if r.solved() {
            entry.push(key);
        }
    }
    let total = problems.len();
    let mut out = format!("{:<16} {:>8} {:>8} {:>8}\n", "Prover", "Solved%", "Solved", "Unique");
    let mut union: Vec<(&str, &str)> = Vec::new();
    for p in &provers {
        let mine = &solved[p];
        let unique = mine
            .iter()
            .filter(|k| provers.iter().filter(|q| *q != p).all(|q| !solved[q].contains(k)))
            .count();
        for k in mine {
            if !union.contains(k) {
                union.push(*k);
            }
        }
        let _ = writeln!(
            out,
            "{:<16} {:>8} {:>8} {:>8}",
            p,
            pct(mine.len(), total),
            mine.len(),
            unique
        );
    }
    let _ = writeln!(
        out,
        "{:<16} {:>8} {:>8} {:>8}",
        "Sum",
        pct(union.len(), total),
        union.len(),
        ""
    );
    let _ = writeln!(out, "({total} problems)");
    out
}

/// Reconstruction success over the problems some prover solved, with the
/// hints of the first such prover and with no hints at all.
pub fn reconstruction_table(rows: &[BenchRow]) -> String {
    let mut seen: Vec<(&str, &str)> = Vec::new();
    let (mut with, mut without, mut base) = (0, 0, 0);
    for r in rows {
        let key = (r.file.as_str(), r.conjecture.as_str());
        if !r.solved() || r.rec_hints == RecStatus::Skipped || seen.contains(&key) {
            continue;
        }
        seen.push(key);
        base += 1;
        with += usize::from(r.rec_hints == RecStatus::Ok);
        without += usize::from(r.rec_no_hints == RecStatus::Ok);
    }
    let mut out = format!("{:<16} {:>8} {:>8}\n", "Reconstruction", "Success%", "Solved");
    let _ = writeln!(out, "{:<16} {:>8} {:>8}", "with hints", pct(with, base), with);
    let _ = writeln!(out, "{:<16} {:>8} {:>8}", "without hints", pct(without, base), without);
    let _ = writeln!(out, "({base} problems proved by an ATP)");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(file: &str, conj: &str, prover: &str, status: &str) -> BenchRow {
        BenchRow {
            file: file.into(),
            conjecture: conj.into(),
            prover: prover.into(),
            status: status.into(),
            axioms: 1,
            labels: 1,
            lemmas: 0,
            unfolds: 0,
            rec_hints: RecStatus::Skipped,
            rec_no_hints: RecStatus::Skipped,
            atp_ms: 5,
            rec_ms: 0,
        }
    }

    #[test]
    fn unique_and_sum() {
        let rows = vec![
            row("f", "a", "p", "Theorem"),
            row("f", "a", "q", "Theorem"),
            row("f", "b", "p", "Theorem"),
            row("f", "b", "q", "Timeout"),
            row("f", "c", "p", "GaveUp"),
            row("f", "c", "q", "Theorem"),
        ];
        let t = prover_table(&rows);
        let lines: Vec<Vec<&str>> = t.lines().map(|l| l.split_whitespace().collect()).collect();
        assert_eq!(lines[1], vec!["p", "66.7", "2", "1"]);
        assert_eq!(lines[2], vec!["q", "66.7", "2", "1"]);
        assert_eq!(lines[3], vec!["Sum", "100.0", "3"]);
    }

    #[test]
    fn empty_tables() {
        assert!(prover_table(&[]).contains("(0 problems)"));
        assert!(reconstruction_table(&[]).contains("(0 problems"));
    }

    #[test]
    fn prover_names() {
        assert_eq!(Prover::parse("builtin"), Prover::Builtin);
        assert_eq!(Prover::parse("/usr/bin/eprover --auto {file}").name(), "eprover");
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        write_csv(&[row("f", "a", "p", "Theorem")], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("file,conjecture,prover,status,"));
        let back = read_csv(text.as_bytes()).unwrap();
        assert_eq!(back[0]["rec_hints"], "skipped");
    }
}
