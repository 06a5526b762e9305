//! C interface to the hammer.
//!
//! Environments and problems are opaque handles owned by the caller and
//! released with their `_free` functions. Every fallible call returns a
//! [`HammerStatus`]; on failure [`hammer_last_error`] describes the cause.
//! Strings handed out through out-parameters are NUL-terminated, owned by
//! the caller and released with [`hammer_string_free`]. Structured results
//! (prover reports, hints, traces) travel as JSON.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use hammer_core::folir::{to_tptp, AtpStatus, Problem};
use hammer_core::kernel::{parse_env, Environment};
use hammer_core::miniatp::ExternalOptions;
use hammer_core::pipeline::{reconstruct, ProveReport, Prover, ReconstructFailure};
use hammer_core::reconstruct::{Budget, Hints, ReconstructError};
use hammer_core::translate::{build_problem, Premises, TranslateError};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HammerStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    UnknownName = 4,
    NotAProp = 5,
    Translate = 6,
    InvalidJson = 7,
    Prover = 8,
    ReconstructFailed = 9,
    Panic = 10,
}

/// Prover verdict.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HammerAtpStatus {
    Theorem = 0,
    CounterSatisfiable = 1,
    Timeout = 2,
    GaveUp = 3,
    Error = 4,
}

impl From<AtpStatus> for HammerAtpStatus {
    fn from(s: AtpStatus) -> Self {
        match s {
            AtpStatus::Theorem => HammerAtpStatus::Theorem,
            AtpStatus::CounterSatisfiable => HammerAtpStatus::CounterSatisfiable,
            AtpStatus::Timeout => HammerAtpStatus::Timeout,
            AtpStatus::GaveUp => HammerAtpStatus::GaveUp,
            AtpStatus::Error => HammerAtpStatus::Error,
        }
    }
}

/// A parsed development.
pub struct HammerEnv {
    env: Environment,
}

/// A translated first-order problem.
pub struct HammerProblem {
    problem: Problem,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(HammerStatus, String);

type FfiResult<T> = Result<T, Failure>;

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> HammerStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            HammerStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HammerStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure(HammerStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(HammerStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref()
        .ok_or_else(|| Failure(HammerStatus::NullArgument, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(Failure(HammerStatus::NullArgument, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn translate_failure(e: TranslateError) -> Failure {
    let status = match e {
        TranslateError::UnknownName(_) => HammerStatus::UnknownName,
        TranslateError::NotAProp(_) => HammerStatus::NotAProp,
        _ => HammerStatus::Translate,
    };
    Failure(status, e.to_string())
}

fn json_failure(what: &str) -> impl Fn(serde_json::Error) -> Failure + '_ {
    move |e| Failure(HammerStatus::InvalidJson, format!("{what}: {e}"))
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn hammer_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn hammer_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a development in the export syntax.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hammer_env_parse(source: *const c_char, out: *mut *mut HammerEnv) -> HammerStatus {
    guard(|| {
        let src = str_arg(source, "source")?;
        put(out, ptr::null_mut(), "out")?;
        let env = parse_env(src).map_err(|e| Failure(HammerStatus::Parse, e.to_string()))?;
        put(out, Box::into_raw(Box::new(HammerEnv { env })), "out")
    })
}

/// Number of declarations; 0 for a null handle.
///
/// # Safety
/// `env` must be null or a live handle from [`hammer_env_parse`].
#[no_mangle]
pub unsafe extern "C" fn hammer_env_len(env: *const HammerEnv) -> usize {
    env.as_ref().map_or(0, |e| e.env.len())
}

/// # Safety
/// `env` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hammer_env_free(env: *mut HammerEnv) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

/// Builds the first-order problem for `conjecture`. `premises_json` is a
/// JSON array of declaration names, or null for every earlier declaration.
///
/// # Safety
/// `env` must be a live handle, strings NUL-terminated or null where
/// allowed, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hammer_translate(
    env: *const HammerEnv,
    conjecture: *const c_char,
    premises_json: *const c_char,
    depth: usize,
    out: *mut *mut HammerProblem,
) -> HammerStatus {
    guard(|| {
        let env = handle(env, "env")?;
        let conjecture = str_arg(conjecture, "conjecture")?;
        put(out, ptr::null_mut(), "out")?;
        let premises = match opt_str_arg(premises_json, "premises")? {
            None => Premises::all(),
            Some(text) => Premises::Names(serde_json::from_str(text).map_err(json_failure("premises"))?),
        };
        let built = build_problem(&env.env, conjecture, &premises, depth).map_err(translate_failure)?;
        put(
            out,
            Box::into_raw(Box::new(HammerProblem { problem: built.problem })),
            "out",
        )
    })
}

/// Number of axioms, the conjecture excluded; 0 for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hammer_problem_axiom_count(problem: *const HammerProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.problem.axioms.len())
}

/// The problem as TPTP text.
///
/// # Safety
/// `problem` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hammer_problem_tptp(problem: *const HammerProblem, out: *mut *mut c_char) -> HammerStatus {
    guard(|| {
        let p = handle(problem, "problem")?;
        let text = to_tptp(&p.problem).map_err(|e| Failure(HammerStatus::Translate, e.to_string()))?;
        put(out, c_string(text), "out")
    })
}

/// # Safety
/// `problem` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hammer_problem_free(problem: *mut HammerProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Runs a prover: null `prover` or `"builtin"` for the built-in one,
/// otherwise a command template with `{file}` and `{t}`. Writes the verdict
/// and a JSON report with `status`, `labels`, `lemmas` and `unfolds`; the
/// report doubles as hints for [`hammer_reconstruct`].
///
/// # Safety
/// `problem` must be a live handle, `prover` NUL-terminated or null, the
/// out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn hammer_prove(
    problem: *const HammerProblem,
    prover: *const c_char,
    timeout_seconds: f64,
    status: *mut HammerAtpStatus,
    report_json: *mut *mut c_char,
) -> HammerStatus {
    guard(|| {
        let p = handle(problem, "problem")?;
        let prover = opt_str_arg(prover, "prover")?.map_or(Prover::Builtin, Prover::parse);
        if status.is_null() || report_json.is_null() {
            return Err(Failure(HammerStatus::NullArgument, "out-pointer is null".into()));
        }
        let timeout = Duration::from_secs_f64(if timeout_seconds.is_finite() {
            timeout_seconds.max(0.0)
        } else {
            0.0
        });
        let result = prover
            .run(&p.problem, timeout, &ExternalOptions::default())
            .map_err(|e| Failure(HammerStatus::Prover, e.to_string()))?;
        let report = serde_json::to_string(&ProveReport::new(&p.problem, &result)).expect("report serializes");
        put(status, result.status.into(), "status")?;
        put(report_json, c_string(report), "report_json")
    })
}

/// Re-proves `conjecture` intuitionistically and writes the replayed proof
/// trace as JSON. `hints_json` has optional `lemmas` and `unfolds` arrays,
/// or is null; `depth` 0 searches without a bound.
///
/// # Safety
/// `env` must be a live handle, strings NUL-terminated or null where
/// allowed, `trace_json` writable.
#[no_mangle]
pub unsafe extern "C" fn hammer_reconstruct(
    env: *const HammerEnv,
    conjecture: *const c_char,
    hints_json: *const c_char,
    depth: usize,
    timeout_seconds: f64,
    trace_json: *mut *mut c_char,
) -> HammerStatus {
    guard(|| {
        let env = handle(env, "env")?;
        let conjecture = str_arg(conjecture, "conjecture")?;
        let hints: Hints = match opt_str_arg(hints_json, "hints")? {
            None => Hints::default(),
            Some(text) => serde_json::from_str(text).map_err(json_failure("hints"))?,
        };
        if trace_json.is_null() {
            return Err(Failure(HammerStatus::NullArgument, "trace_json is null".into()));
        }
        let budget = Budget {
            depth: (depth > 0).then_some(depth),
            seconds: timeout_seconds,
            ..Budget::default()
        };
        let trace = reconstruct(&env.env, conjecture, &hints, &budget).map_err(|e| match e {
            ReconstructFailure::Setup(ReconstructError::UnknownLemma(n)) => {
                Failure(HammerStatus::UnknownName, format!("unknown lemma or constant '{n}'"))
            }
            ReconstructFailure::Setup(ReconstructError::NotAProp(n)) => {
                Failure(HammerStatus::NotAProp, format!("'{n}' is not a proposition"))
            }
            ReconstructFailure::Setup(ReconstructError::Translate(t)) => translate_failure(t),
            other => Failure(HammerStatus::ReconstructFailed, other.to_string()),
        })?;
        put(trace_json, c_string(trace.to_json()), "trace_json")
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn hammer_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
