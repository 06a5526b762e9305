use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use hammer_core::encoder::arity_optimize;
use hammer_core::folir::{parse_tptp, to_tptp};
use hammer_core::kernel::{parse_env, Environment};
use hammer_core::miniatp::{ExternalOptions, MiniAtpError};
use hammer_core::pipeline::{
    bench, load_corpus, prover_table, reconstruct, reconstruction_table, write_csv, BenchOptions, ProveReport, Prover,
    ReconstructFailure,
};
use hammer_core::reconstruct::{Budget, Hints, ReconstructError};
use hammer_core::selfcheck;
use hammer_core::translate::{build_problem, Premises, TranslateError};

const EXIT_ERROR: u8 = 1;
const EXIT_UNKNOWN_NAME: u8 = 2;
const EXIT_SPAWN: u8 = 3;
const EXIT_RECONSTRUCT: u8 = 4;
const EXIT_CHECK: u8 = 5;

#[derive(Parser)]
#[command(
    name = "hammer",
    version,
    about = "Translate, prove and reconstruct goals of a dependently typed development"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the first-order problem for one conjecture as TPTP.
    Translate {
        input: PathBuf,
        #[arg(long)]
        conjecture: String,
        /// `ALL`, or a file of premise names (JSON array or whitespace separated).
        #[arg(long, default_value = "ALL")]
        premises: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Drop arity arguments where every use of a symbol agrees.
        #[arg(long)]
        arity_opt: bool,
        /// Write encoder diagnostics, one per line, to this file.
        #[arg(long)]
        diag: Option<PathBuf>,
    },
    /// Run a prover on a TPTP problem and print status and hints as JSON.
    Prove {
        problem: PathBuf,
        /// `builtin` or a command template with `{file}` and `{t}`; defaults to $HAMMER_PROVER, then builtin.
        #[arg(long)]
        prover: Option<String>,
        #[arg(long, default_value_t = 30.0)]
        timeout: f64,
        #[arg(long)]
        keep_files: bool,
    },
    /// Re-prove a conjecture intuitionistically from hints and write the trace.
    Reconstruct {
        input: PathBuf,
        #[arg(long)]
        conjecture: String,
        /// JSON with `lemmas` and `unfolds`, such as the output of `prove`.
        #[arg(long)]
        hints: Option<PathBuf>,
        /// Bound on non-invertible steps; 0 searches without a bound.
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 10.0)]
        timeout: f64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Translate and prove every problem of a corpus directory.
    Bench {
        dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = 30.0)]
        timeout: f64,
        /// Provers to compare; repeatable. Defaults to $HAMMER_PROVER, then builtin.
        #[arg(long)]
        prover: Vec<String>,
        /// Also reconstruct, with and without the cited hints.
        #[arg(long)]
        reconstruct: bool,
        #[arg(long, default_value_t = 10.0)]
        rec_timeout: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compare the prover-side procedures with the brute-force oracles.
    SelfCheck {
        #[arg(long)]
        quick: bool,
    },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn load_env(path: &Path) -> Result<Environment, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", path.display())))?;
    parse_env(&text).map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", path.display())))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), ExitCode> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| fail(EXIT_ERROR, e)),
    }
}

fn read_premises(arg: &str) -> Result<Premises, ExitCode> {
    if arg == "ALL" {
        return Ok(Premises::all());
    }
    let text = std::fs::read_to_string(arg).map_err(|e| fail(EXIT_ERROR, format!("{arg}: {e}")))?;
    if text.trim_start().starts_with('[') {
        let names: Vec<String> = serde_json::from_str(&text).map_err(|e| fail(EXIT_ERROR, format!("{arg}: {e}")))?;
        return Ok(Premises::Names(names));
    }
    Ok(Premises::Names(text.split_whitespace().map(str::to_string).collect()))
}

fn translate_error(e: TranslateError) -> ExitCode {
    match e {
        TranslateError::UnknownName(_) => fail(EXIT_UNKNOWN_NAME, e),
        _ => fail(EXIT_ERROR, e),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_translate(
    input: &Path,
    conjecture: &str,
    premises: &str,
    depth: usize,
    out: Option<&Path>,
    arity_opt: bool,
    diag: Option<&Path>,
) -> Result<(), ExitCode> {
    let env = load_env(input)?;
    let premises = read_premises(premises)?;
    let built = build_problem(&env, conjecture, &premises, depth).map_err(translate_error)?;
    let problem = if arity_opt {
        arity_optimize(&built.problem)
    } else {
        built.problem
    };
    let text = to_tptp(&problem).map_err(|e| fail(EXIT_ERROR, e))?;
    write_out(out, &text)?;
    if let Some(d) = diag {
        let lines: String = built.diagnostics.iter().map(|d| format!("{d}\n")).collect();
        std::fs::write(d, lines).map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", d.display())))?;
    }
    Ok(())
}

fn cmd_prove(problem: &Path, prover: Option<&str>, timeout: f64, keep_files: bool) -> Result<(), ExitCode> {
    let text = std::fs::read_to_string(problem).map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", problem.display())))?;
    let p = parse_tptp(&text).map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", problem.display())))?;
    let prover = prover.map(Prover::parse).unwrap_or_else(Prover::from_env);
    let result = prover
        .run(
            &p,
            Duration::from_secs_f64(timeout.max(0.0)),
            &ExternalOptions { keep_files },
        )
        .map_err(|e| match e {
            MiniAtpError::SpawnFailed(_) => fail(EXIT_SPAWN, e),
            _ => fail(EXIT_ERROR, e),
        })?;
    eprintln!("% SZS status {} for {}", result.status.as_str(), p.conjecture.label);
    let report = ProveReport::new(&p, &result);
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_out(None, &format!("{json}\n"))
}

fn cmd_reconstruct(
    input: &Path,
    conjecture: &str,
    hints: Option<&Path>,
    budget: Budget,
    out: Option<&Path>,
) -> Result<(), ExitCode> {
    let env = load_env(input)?;
    let hints = match hints {
        None => Hints::default(),
        Some(h) => {
            let text = std::fs::read_to_string(h).map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", h.display())))?;
            serde_json::from_str(&text).map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", h.display())))?
        }
    };
    match reconstruct(&env, conjecture, &hints, &budget) {
        Ok(trace) => {
            write_out(out, &format!("{}\n", trace.to_json()))?;
            eprintln!("reconstructed {conjecture}: {} steps, trace replayed", trace.size());
            Ok(())
        }
        Err(ReconstructFailure::Setup(e @ ReconstructError::UnknownLemma(_))) => Err(fail(EXIT_UNKNOWN_NAME, e)),
        Err(ReconstructFailure::Setup(ReconstructError::Translate(e))) => Err(translate_error(e)),
        Err(ReconstructFailure::Search(f)) => {
            eprintln!("reconstruction of {conjecture} failed: {}", f.reason);
            Err(ExitCode::from(EXIT_RECONSTRUCT))
        }
        Err(e) => Err(fail(EXIT_RECONSTRUCT, e)),
    }
}

fn cmd_bench(dir: &Path, opts: &BenchOptions, csv: Option<&Path>) -> Result<(), ExitCode> {
    let corpus = load_corpus(dir).map_err(|e| fail(EXIT_ERROR, e))?;
    let rows = bench(&corpus, opts);
    let mut text = prover_table(&rows);
    if opts.reconstruct.is_some() {
        text.push('\n');
        text.push_str(&reconstruction_table(&rows));
    }
    write_out(None, &text)?;
    if let Some(path) = csv {
        let file = std::fs::File::create(path).map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", path.display())))?;
        write_csv(&rows, file).map_err(|e| fail(EXIT_ERROR, e))?;
    }
    Ok(())
}

fn cmd_self_check(quick: bool) -> Result<(), ExitCode> {
    let outcomes = selfcheck::run_all(quick);
    for o in &outcomes {
        println!("{o}");
        for f in &o.failures {
            println!("    {f}");
        }
    }
    if outcomes.iter().all(|o| o.passed()) {
        Ok(())
    } else {
        Err(ExitCode::from(EXIT_CHECK))
    }
}

fn run(cli: Cli) -> Result<(), ExitCode> {
    match cli.command {
        Command::Translate {
            input,
            conjecture,
            premises,
            depth,
            out,
            arity_opt,
            diag,
        } => cmd_translate(
            &input,
            &conjecture,
            &premises,
            depth,
            out.as_deref(),
            arity_opt,
            diag.as_deref(),
        ),
        Command::Prove {
            problem,
            prover,
            timeout,
            keep_files,
        } => cmd_prove(&problem, prover.as_deref(), timeout, keep_files),
        Command::Reconstruct {
            input,
            conjecture,
            hints,
            depth,
            timeout,
            out,
        } => {
            let budget = Budget {
                depth: (depth > 0).then_some(depth),
                seconds: timeout,
                ..Budget::default()
            };
            cmd_reconstruct(&input, &conjecture, hints.as_deref(), budget, out.as_deref())
        }
        Command::Bench {
            dir,
            workers,
            timeout,
            prover,
            reconstruct,
            rec_timeout,
            csv,
        } => {
            let provers = if prover.is_empty() {
                vec![Prover::from_env()]
            } else {
                prover.iter().map(|p| Prover::parse(p)).collect()
            };
            let opts = BenchOptions {
                provers,
                timeout: Duration::from_secs_f64(timeout.max(0.0)),
                workers,
                reconstruct: reconstruct.then(|| Budget {
                    seconds: rec_timeout,
                    ..Budget::default()
                }),
                external: ExternalOptions::default(),
            };
            cmd_bench(&dir, &opts, csv.as_deref())
        }
        Command::SelfCheck { quick } => cmd_self_check(quick),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
