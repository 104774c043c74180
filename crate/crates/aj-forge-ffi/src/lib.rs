//! C ABI over the JSON job layer of `aj-forge`.
//!
//! The surface is deliberately narrow: a job is described by a JSON
//! config document (see `aj_forge::jobs::JobConfig`), and running it
//! yields a JSON report plus an exit-style status code. Handles are
//! opaque; strings returned through out-parameters are owned by the
//! caller and must be released with [`aj_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::{c_char, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};

use aj_forge::jobs::{self, JobConfig};

/// Job executed, property verified.
pub const AJ_OK: c_int = 0;
/// Job executed, property checked and found false.
pub const AJ_CHECK_FAILED: c_int = 1;
/// Job could not be executed (parse or domain error); see
/// [`aj_last_error`].
pub const AJ_ERROR: c_int = 2;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn string_out(out: *mut *mut c_char, text: &str) {
    if out.is_null() {
        return;
    }
    let c = CString::new(text.replace('\0', " ")).unwrap();
    unsafe { *out = c.into_raw() };
}

/// An opaque, parsed job description.
pub struct AjJob {
    config: JobConfig,
}

/// Parses a JSON job config. Returns null on error; the message is
/// available through [`aj_last_error`]. The handle must be released
/// with [`aj_job_free`].
#[no_mangle]
pub extern "C" fn aj_job_parse(config_json: *const c_char) -> *mut AjJob {
    if config_json.is_null() {
        set_last_error("config_json is null");
        return std::ptr::null_mut();
    }
    let text = match unsafe { CStr::from_ptr(config_json) }.to_str() {
        Ok(t) => t,
        Err(_) => {
            set_last_error("config_json is not valid UTF-8");
            return std::ptr::null_mut();
        }
    };
    match JobConfig::from_json(text) {
        Ok(config) => Box::into_raw(Box::new(AjJob { config })),
        Err(e) => {
            set_last_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Runs a parsed job. `report_json` (if non-null) receives a
/// caller-owned JSON document — the job report on status 0/1, an error
/// document on status 2.
#[no_mangle]
pub extern "C" fn aj_job_run(job: *const AjJob, report_json: *mut *mut c_char) -> c_int {
    if job.is_null() {
        set_last_error("job is null");
        string_out(report_json, "{\"error\":\"job is null\"}");
        return AJ_ERROR;
    }
    let config = unsafe { &(*job).config };
    let result = catch_unwind(AssertUnwindSafe(|| jobs::run(config)));
    match result {
        Ok(Ok(outcome)) => {
            string_out(
                report_json,
                &serde_json::to_string_pretty(&outcome.report).unwrap(),
            );
            outcome.exit_code() as c_int
        }
        Ok(Err(e)) => {
            let msg = e.to_string();
            set_last_error(&msg);
            string_out(
                report_json,
                &serde_json::json!({ "error": msg }).to_string(),
            );
            AJ_ERROR
        }
        Err(_) => {
            set_last_error("internal panic");
            string_out(report_json, "{\"error\":\"internal panic\"}");
            AJ_ERROR
        }
    }
}

/// One-shot convenience: parse and run in a single call.
#[no_mangle]
pub extern "C" fn aj_run_json(config_json: *const c_char, report_json: *mut *mut c_char) -> c_int {
    if config_json.is_null() {
        set_last_error("config_json is null");
        string_out(report_json, "{\"error\":\"config_json is null\"}");
        return AJ_ERROR;
    }
    let text = match unsafe { CStr::from_ptr(config_json) }.to_str() {
        Ok(t) => t,
        Err(_) => {
            set_last_error("config_json is not valid UTF-8");
            string_out(report_json, "{\"error\":\"config_json is not valid UTF-8\"}");
            return AJ_ERROR;
        }
    };
    let result = catch_unwind(|| jobs::run_json(text));
    match result {
        Ok((report, code)) => {
            if code == AJ_ERROR {
                set_last_error(&report);
            }
            string_out(report_json, &report);
            code as c_int
        }
        Err(_) => {
            set_last_error("internal panic");
            string_out(report_json, "{\"error\":\"internal panic\"}");
            AJ_ERROR
        }
    }
}

/// Releases a job handle. Null is a no-op.
#[no_mangle]
pub extern "C" fn aj_job_free(job: *mut AjJob) {
    if !job.is_null() {
        drop(unsafe { Box::from_raw(job) });
    }
}

/// Releases a string returned by this library. Null is a no-op.
#[no_mangle]
pub extern "C" fn aj_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// The last error message raised on this thread. The pointer stays
/// valid until the next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn aj_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
