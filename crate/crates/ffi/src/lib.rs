//! C ABI over the `edgesched` solvers.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free`. Every function returns an [`EsStatus`] or a
//! plain value, never unwinds, and records a message for
//! [`es_last_error_message`] on failure.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use edgesched::amdp::DEFAULT_DELTA;
use edgesched::io::instance_from_json;
use edgesched::solve::{solve, SolveError};
use edgesched::{Algorithm, Instance, SolveReport};

/// Problem instance.
pub struct EsInstance(Instance);

/// Result of one solve.
pub struct EsReport(SolveReport);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsStatus {
    Ok = 0,
    /// No schedule meets the deadline.
    Infeasible = 1,
    /// Malformed arguments or instance data.
    InvalidInput = 2,
    /// The algorithm does not apply to this instance.
    Precondition = 3,
    Internal = 4,
    NullPointer = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsAlgorithm {
    Amr2 = 0,
    Amdp = 1,
    AmdpHetero = 2,
    Greedy = 3,
    Exact = 4,
}

impl From<EsAlgorithm> for Algorithm {
    fn from(a: EsAlgorithm) -> Self {
        match a {
            EsAlgorithm::Amr2 => Algorithm::Amr2,
            EsAlgorithm::Amdp => Algorithm::Amdp,
            EsAlgorithm::AmdpHetero => Algorithm::AmdpHetero,
            EsAlgorithm::Greedy => Algorithm::Greedy,
            EsAlgorithm::Exact => Algorithm::Exact,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: EsStatus, message: impl Into<String>) -> EsStatus {
    set_error(message);
    status
}

fn guard(body: impl FnOnce() -> EsStatus) -> EsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(EsStatus::Panic, format!("panic: {msg}"))
        }
    }
}

/// Message for the last failure on the calling thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn es_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds an instance from `m + 1` accuracies, a row-major `(m + 1) x n`
/// time matrix (last row is the ES) and optional `n` communication times.
#[no_mangle]
pub unsafe extern "C" fn es_instance_new(
    m: usize,
    n: usize,
    accuracies: *const f64,
    times: *const f64,
    comm_times: *const f64,
    deadline: f64,
    out: *mut *mut EsInstance,
) -> EsStatus {
    guard(|| {
        if out.is_null() || accuracies.is_null() || times.is_null() {
            return fail(EsStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let models = m + 1;
        let Some(cells) = models.checked_mul(n) else {
            return fail(EsStatus::InvalidInput, "dimensions overflow");
        };
        let acc = std::slice::from_raw_parts(accuracies, models).to_vec();
        let flat = std::slice::from_raw_parts(times, cells);
        let rows = flat.chunks(n.max(1)).take(models).map(<[f64]>::to_vec).collect();
        let comm = (!comm_times.is_null()).then(|| std::slice::from_raw_parts(comm_times, n).to_vec());
        match Instance::new(acc, rows, comm, deadline) {
            Ok(inst) => {
                *out = Box::into_raw(Box::new(EsInstance(inst)));
                EsStatus::Ok
            }
            Err(e) => fail(EsStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Parses an instance from a NUL-terminated JSON document.
#[no_mangle]
pub unsafe extern "C" fn es_instance_from_json(json: *const c_char, out: *mut *mut EsInstance) -> EsStatus {
    guard(|| {
        if out.is_null() || json.is_null() {
            return fail(EsStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(EsStatus::InvalidInput, "JSON is not valid UTF-8");
        };
        match instance_from_json(text) {
            Ok(inst) => {
                *out = Box::into_raw(Box::new(EsInstance(inst)));
                EsStatus::Ok
            }
            Err(e) => fail(EsStatus::InvalidInput, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn es_instance_free(instance: *mut EsInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Number of jobs, or 0 for null.
#[no_mangle]
pub unsafe extern "C" fn es_instance_jobs(instance: *const EsInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.0.n())
}

/// Number of ED models, or 0 for null.
#[no_mangle]
pub unsafe extern "C" fn es_instance_models(instance: *const EsInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.0.m())
}

/// Runs `algorithm`. A `delta` of 0 selects the default AMDP grid (1 ms).
#[no_mangle]
pub unsafe extern "C" fn es_solve(
    instance: *const EsInstance,
    algorithm: EsAlgorithm,
    delta: f64,
    out: *mut *mut EsReport,
) -> EsStatus {
    guard(|| {
        if out.is_null() {
            return fail(EsStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let Some(inst) = instance.as_ref() else {
            return fail(EsStatus::NullPointer, "null instance");
        };
        let delta = if delta == 0.0 { DEFAULT_DELTA } else { delta };
        match solve(&inst.0, algorithm.into(), delta) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(EsReport(report)));
                EsStatus::Ok
            }
            Err(e) => {
                let status = match e {
                    SolveError::Infeasible(_) => EsStatus::Infeasible,
                    SolveError::Precondition(_) => EsStatus::Precondition,
                    SolveError::Internal(_) => EsStatus::Internal,
                };
                fail(status, e.to_string())
            }
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn es_report_free(report: *mut EsReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Total accuracy, or NaN for null.
#[no_mangle]
pub unsafe extern "C" fn es_report_total_accuracy(report: *const EsReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.metrics.total_accuracy)
}

#[no_mangle]
pub unsafe extern "C" fn es_report_makespan(report: *const EsReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.metrics.makespan)
}

#[no_mangle]
pub unsafe extern "C" fn es_report_ed_load(report: *const EsReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.metrics.ed_load)
}

#[no_mangle]
pub unsafe extern "C" fn es_report_es_load(report: *const EsReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.metrics.es_load)
}

/// Percentage by which the makespan exceeds the deadline.
#[no_mangle]
pub unsafe extern "C" fn es_report_violation_pct(report: *const EsReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.metrics.violation_pct)
}

/// LP relaxation value, or NaN when the algorithm does not solve one.
#[no_mangle]
pub unsafe extern "C" fn es_report_lp_objective(report: *const EsReport) -> f64 {
    report.as_ref().and_then(|r| r.0.lp_objective).unwrap_or(f64::NAN)
}

#[no_mangle]
pub unsafe extern "C" fn es_report_fractional_jobs(report: *const EsReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.fractional_job_count)
}

#[no_mangle]
pub unsafe extern "C" fn es_report_runtime_ms(report: *const EsReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.runtime_ms)
}

/// Copies the model index of every job into `buffer` (ES is index `m`).
/// `len` must be at least the job count.
#[no_mangle]
pub unsafe extern "C" fn es_report_assignment(report: *const EsReport, buffer: *mut usize, len: usize) -> EsStatus {
    guard(|| {
        let Some(r) = report.as_ref() else {
            return fail(EsStatus::NullPointer, "null report");
        };
        let assignment = &r.0.schedule.assignment;
        if assignment.is_empty() {
            return EsStatus::Ok;
        }
        if buffer.is_null() {
            return fail(EsStatus::NullPointer, "null buffer");
        }
        if len < assignment.len() {
            return fail(EsStatus::BufferTooSmall, format!("need {} slots, got {len}", assignment.len()));
        }
        std::slice::from_raw_parts_mut(buffer, assignment.len()).copy_from_slice(assignment);
        EsStatus::Ok
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn es_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
