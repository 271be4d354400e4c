//! C interface to the crips toolkit.
//!
//! Configurations are built from the same `key = value` pairs the command
//! line accepts and are held behind opaque handles. Every fallible call
//! returns a [`CripsStatus`]; the message of the most recent failure on the
//! calling thread is available from [`crips_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use crips_core::experiment::{run_experiment, ExperimentSpec};
use crips_core::objectives::{build_objective, ObjectiveOptions};
use crips_core::{Error, RunTrace};

/// Result of a call across the C boundary.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CripsStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Io = 3,
    Argument = 4,
    Panic = 5,
}

/// Accumulated `key = value` settings. Opaque to C.
pub struct CripsConfig {
    entries: Vec<(String, String)>,
}

/// A completed run. Opaque to C.
pub struct CripsTrace {
    trace: RunTrace,
}

/// One iteration of a run as seen from C.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CripsRecord {
    pub iteration: u64,
    pub best_fitness: f64,
    pub metric: f64,
    pub omega: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(message).ok());
}

fn status_of(error: &Error) -> CripsStatus {
    match error {
        Error::Config { .. } => CripsStatus::Config,
        Error::Io { .. } | Error::Format { .. } => CripsStatus::Io,
        _ => CripsStatus::Argument,
    }
}

fn fail(error: Error) -> CripsStatus {
    set_last_error(error.to_string());
    status_of(&error)
}

fn guarded(f: impl FnOnce() -> CripsStatus) -> CripsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            CripsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, CripsStatus> {
    if p.is_null() {
        set_last_error(format!("{what} is null"));
        return Err(CripsStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_last_error(format!("{what} is not valid UTF-8"));
        CripsStatus::Argument
    })
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Message describing the last failed call on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn crips_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates an empty configuration. Free it with [`crips_config_free`].
#[no_mangle]
pub extern "C" fn crips_config_new() -> *mut CripsConfig {
    Box::into_raw(Box::new(CripsConfig {
        entries: Vec::new(),
    }))
}

/// # Safety
/// `config` must come from [`crips_config_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn crips_config_free(config: *mut CripsConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Records one setting. Keys are checked when the configuration is used,
/// except that unknown keys are rejected immediately.
///
/// # Safety
/// `config` must be a live handle; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn crips_config_set(
    config: *mut CripsConfig,
    key: *const c_char,
    value: *const c_char,
) -> CripsStatus {
    guarded(|| {
        let Some(config) = config.as_mut() else {
            set_last_error("config is null");
            return CripsStatus::NullPointer;
        };
        let key = try_status!(str_arg(key, "key"));
        let value = try_status!(str_arg(value, "value"));
        if !crips_core::experiment::KEYS.contains(&key.trim()) {
            return fail(Error::config(key.trim(), "unknown key"));
        }
        config.entries.push((key.to_owned(), value.to_owned()));
        CripsStatus::Ok
    })
}

unsafe fn spec_of(config: *const CripsConfig) -> Result<ExperimentSpec, CripsStatus> {
    let Some(config) = config.as_ref() else {
        set_last_error("config is null");
        return Err(CripsStatus::NullPointer);
    };
    ExperimentSpec::from_entries(&config.entries).map_err(fail)
}

/// Validates the configuration without running anything.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn crips_config_validate(config: *const CripsConfig) -> CripsStatus {
    guarded(|| {
        try_status!(spec_of(config));
        CripsStatus::Ok
    })
}

/// Runs the first configured algorithm once, seeded with the `seed` setting,
/// and stores the trace in `*out`. Free it with [`crips_trace_free`].
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn crips_run(
    config: *const CripsConfig,
    out: *mut *mut CripsTrace,
) -> CripsStatus {
    guarded(|| {
        if out.is_null() {
            set_last_error("out is null");
            return CripsStatus::NullPointer;
        }
        let spec = try_status!(spec_of(config));
        let (_, run_config) = spec.expanded_runs().swap_remove(0);
        match crips_core::run(&run_config) {
            Ok(trace) => {
                *out = Box::into_raw(Box::new(CripsTrace { trace }));
                CripsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Runs the whole experiment and writes traces and `summary.json` to the
/// configured output directory.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn crips_run_experiment(config: *const CripsConfig) -> CripsStatus {
    guarded(|| {
        let spec = try_status!(spec_of(config));
        match run_experiment(&spec) {
            Ok(_) => CripsStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `trace` must come from [`crips_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn crips_trace_free(trace: *mut CripsTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Number of recorded iterations; 0 for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn crips_trace_len(trace: *const CripsTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.trace.records.len())
}

/// Number of improvement events; 0 for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn crips_trace_event_count(trace: *const CripsTrace) -> usize {
    trace
        .as_ref()
        .map_or(0, |t| t.trace.improvement_events.len())
}

/// 1 if the run ended early because a swarm update overflowed, else 0.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn crips_trace_diverged(trace: *const CripsTrace) -> i32 {
    trace.as_ref().map_or(0, |t| i32::from(t.trace.diverged()))
}

/// Copies record `index` into `*out`.
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn crips_trace_record(
    trace: *const CripsTrace,
    index: usize,
    out: *mut CripsRecord,
) -> CripsStatus {
    let (Some(trace), false) = (trace.as_ref(), out.is_null()) else {
        set_last_error("trace or out is null");
        return CripsStatus::NullPointer;
    };
    let Some(r) = trace.trace.records.get(index) else {
        set_last_error(format!("record {index} out of range"));
        return CripsStatus::Argument;
    };
    *out = CripsRecord {
        iteration: r.iteration,
        best_fitness: r.best_fitness,
        metric: r.metric,
        omega: r.omega,
        alpha1: r.alpha1,
        alpha2: r.alpha2,
    };
    CripsStatus::Ok
}

/// Evaluates the named objective at the `n` coordinates in `x`.
///
/// # Safety
/// `name` must be a NUL-terminated string, `x` must point to `n` doubles and
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn crips_objective_evaluate(
    name: *const c_char,
    x: *const f64,
    n: usize,
    out: *mut f64,
) -> CripsStatus {
    guarded(|| {
        let name = try_status!(str_arg(name, "name"));
        if x.is_null() || out.is_null() {
            set_last_error("x or out is null");
            return CripsStatus::NullPointer;
        }
        if n == 0 {
            return fail(Error::Argument("dimension must be positive".into()));
        }
        let x = std::slice::from_raw_parts(x, n);
        match build_objective(name, n, &ObjectiveOptions::default()) {
            Ok(objective) => {
                *out = objective.evaluate(x);
                CripsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
