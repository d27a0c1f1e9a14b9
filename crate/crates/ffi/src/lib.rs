//! C ABI over `constellation-core`.
//!
//! Problems are opaque handles created by `cl_problem_parse` and released by
//! `cl_problem_free`. Reports come back as NUL-terminated JSON owned by the
//! caller and released by `cl_string_free`. Every entry point returns a
//! `ClStatus`; on failure `cl_last_error_message` describes the error on the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use constellation_core::cli::{self, RunFlags, Subcommand};
use constellation_core::problem::{parse_problem_str, Problem};
use constellation_core::rational::frac;
use constellation_core::Error;

/// Status codes. Input and internal errors match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClStatus {
    Ok = 0,
    InputError = 2,
    InternalError = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClCommand {
    Check = 0,
    GitCheck = 1,
    DeriveParams = 2,
    Approx = 3,
    ChooseWindow = 4,
    HilbertChow = 5,
    Enumerate = 6,
    Selftest = 7,
}

impl From<ClCommand> for Subcommand {
    fn from(c: ClCommand) -> Self {
        match c {
            ClCommand::Check => Subcommand::Check,
            ClCommand::GitCheck => Subcommand::GitCheck,
            ClCommand::DeriveParams => Subcommand::DeriveParams,
            ClCommand::Approx => Subcommand::Approx,
            ClCommand::ChooseWindow => Subcommand::ChooseWindow,
            ClCommand::HilbertChow => Subcommand::HilbertChow,
            ClCommand::Enumerate => Subcommand::Enumerate,
            ClCommand::Selftest => Subcommand::Selftest,
        }
    }
}

/// Run options. Optional values are disabled by their `has_*` flag or, for
/// the bound, by a zero denominator and, for the cap, by zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClRunFlags {
    pub seed: u64,
    pub has_window: bool,
    pub window: i64,
    pub bound_numerator: i64,
    pub bound_denominator: i64,
    pub cap: u64,
    pub timing: bool,
}

/// A parsed problem.
pub struct ClProblem {
    inner: Problem,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("NUL bytes removed"));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::default());
}

fn status_of(e: &Error) -> ClStatus {
    if e.is_input_error() {
        ClStatus::InputError
    } else {
        ClStatus::InternalError
    }
}

fn guarded(f: impl FnOnce() -> ClStatus) -> ClStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("panic inside constellation-core");
            ClStatus::Panic
        }
    }
}

impl ClRunFlags {
    fn to_flags(self) -> Result<RunFlags, String> {
        let bound = match self.bound_denominator {
            0 => None,
            d if d < 0 => return Err("the bound denominator must be positive".into()),
            d => Some(frac(self.bound_numerator, d)),
        };
        Ok(RunFlags {
            seed: self.seed,
            window: self.has_window.then_some(self.window),
            bound,
            cap: (self.cap > 0).then(|| usize::try_from(self.cap).unwrap_or(usize::MAX)),
            timing: self.timing,
        })
    }
}

/// Default flags: seed 0, no window, no bound, no cap, no timing.
#[no_mangle]
pub extern "C" fn cl_run_flags_default() -> ClRunFlags {
    ClRunFlags {
        seed: 0,
        has_window: false,
        window: 0,
        bound_numerator: 0,
        bound_denominator: 0,
        cap: 0,
        timing: false,
    }
}

/// Parses problem text. On success `*out` holds a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_problem_parse(text: *const c_char, out: *mut *mut ClProblem) -> ClStatus {
    guarded(|| {
        if text.is_null() || out.is_null() {
            set_error("null pointer");
            return ClStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            set_error("problem text is not UTF-8");
            return ClStatus::InvalidUtf8;
        };
        match parse_problem_str(text) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(ClProblem { inner: p }));
                ClStatus::Ok
            }
            Err(d) => {
                set_error(d.to_string());
                ClStatus::InputError
            }
        }
    })
}

/// Releases a handle from `cl_problem_parse`. Null is ignored.
///
/// # Safety
/// `problem` must come from `cl_problem_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cl_problem_free(problem: *mut ClProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Runs a command. `problem` may be null for the self-test and `flags` may
/// be null for the defaults. On success `*out_json` holds the report.
/// A failed self-test returns `InternalError` and still sets the report.
///
/// # Safety
/// Pointers must be null or valid; `out_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_run(
    command: ClCommand,
    problem: *const ClProblem,
    flags: *const ClRunFlags,
    out_json: *mut *mut c_char,
) -> ClStatus {
    guarded(|| {
        if out_json.is_null() {
            set_error("null pointer");
            return ClStatus::NullPointer;
        }
        *out_json = ptr::null_mut();
        let raw = if flags.is_null() { cl_run_flags_default() } else { *flags };
        let flags = match raw.to_flags() {
            Ok(f) => f,
            Err(e) => {
                set_error(e);
                return ClStatus::InputError;
            }
        };
        let problem = problem.as_ref().map(|p| &p.inner);
        match cli::run(command.into(), problem, &flags) {
            Ok(report) => {
                *out_json = CString::new(report.render()).expect("JSON has no NUL").into_raw();
                if report.failed {
                    set_error("self-test failed");
                    ClStatus::InternalError
                } else {
                    ClStatus::Ok
                }
            }
            Err(e) => {
                set_error(e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or an empty string. Valid
/// until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn cl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FREE_ORBIT: &str = "[group]\nkind = finite_abelian\norders = 3\n[action]\nx = 2\ny = 1\n[theta]\n0 = -2\n1 = 1\n2 = 1\n[module]\ndim 0 = 1\ndim 1 = 1\ndim 2 = 1\narrow x 0 = [[1]]\narrow x 1 = [[1]]\narrow x 2 = [[1]]\narrow y 0 = [[1]]\narrow y 1 = [[1]]\narrow y 2 = [[1]]\n";

    fn last_error() -> String {
        unsafe { CStr::from_ptr(cl_last_error_message()) }.to_str().unwrap().to_string()
    }

    fn parse(text: &str) -> (ClStatus, *mut ClProblem) {
        let c = CString::new(text).unwrap();
        let mut p = ptr::null_mut();
        let s = unsafe { cl_problem_parse(c.as_ptr(), &mut p) };
        (s, p)
    }

    #[test]
    fn check_round_trip() {
        let (s, p) = parse(FREE_ORBIT);
        assert_eq!(s, ClStatus::Ok);
        let mut out = ptr::null_mut();
        let s = unsafe { cl_run(ClCommand::Check, p, ptr::null(), &mut out) };
        assert_eq!(s, ClStatus::Ok, "{}", last_error());
        let json: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(out) }.to_str().unwrap()).unwrap();
        assert_eq!(json["result"]["verdict"]["status"], "STABLE");
        unsafe {
            cl_string_free(out);
            cl_problem_free(p);
        }
    }

    #[test]
    fn parse_errors_are_input_errors() {
        let (s, p) = parse("[group]\nkind = nonsense\n");
        assert_eq!(s, ClStatus::InputError);
        assert!(p.is_null());
        assert!(last_error().starts_with("2:"), "{}", last_error());
    }

    #[test]
    fn missing_problem_is_an_input_error() {
        let mut out = ptr::null_mut();
        let s = unsafe { cl_run(ClCommand::Check, ptr::null(), ptr::null(), &mut out) };
        assert_eq!(s, ClStatus::InputError);
        assert!(out.is_null());
        assert!(!last_error().is_empty());
    }

    #[test]
    fn null_pointers_and_bad_flags() {
        let mut p = ptr::null_mut();
        assert_eq!(unsafe { cl_problem_parse(ptr::null(), &mut p) }, ClStatus::NullPointer);
        assert_eq!(
            unsafe { cl_run(ClCommand::Selftest, ptr::null(), ptr::null(), ptr::null_mut()) },
            ClStatus::NullPointer
        );
        let (_, problem) = parse(FREE_ORBIT);
        let flags = ClRunFlags { bound_numerator: 1, bound_denominator: -3, ..cl_run_flags_default() };
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { cl_run(ClCommand::Approx, problem, &flags, &mut out) }, ClStatus::InputError);
        unsafe { cl_problem_free(problem) };
    }

    #[test]
    fn flags_reach_the_report() {
        let (_, p) = parse(FREE_ORBIT);
        let flags = ClRunFlags {
            seed: 9,
            has_window: true,
            window: 2,
            bound_numerator: 1,
            bound_denominator: 8,
            ..cl_run_flags_default()
        };
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { cl_run(ClCommand::DeriveParams, p, &flags, &mut out) }, ClStatus::Ok, "{}", last_error());
        let json: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(out) }.to_str().unwrap()).unwrap();
        assert_eq!(json["task"]["seed"], 9);
        assert_eq!(json["task"]["bound"], "1/8");
        unsafe {
            cl_string_free(out);
            cl_problem_free(p);
        }
    }

    #[test]
    fn version_is_the_package_version() {
        let v = unsafe { CStr::from_ptr(cl_version()) }.to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}
