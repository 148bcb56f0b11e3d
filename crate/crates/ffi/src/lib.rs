//! C ABI over `snapcx`.
//!
//! Counters and complexes are opaque heap handles released with their `_free`
//! function. Every fallible call returns an [`ScxStatus`]; on failure the
//! message is available from [`scx_last_error`] on the same thread. Strings
//! handed out by the library are NUL-terminated UTF-8 and must be released
//! with [`scx_string_free`].

use snapcx::complex::{build, Complex};
use snapcx::counting::f_top;
use snapcx::topology::{collapse_to_point, validate_collapse};
use snapcx::{Error, RoundCounter};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    Precondition = 4,
    Overflow = 5,
    CollapseStuck = 6,
    /// A verification ran and at least one check failed.
    CheckFailed = 7,
    BufferTooSmall = 8,
    Internal = 9,
}

/// A round counter.
pub struct ScxCounter {
    inner: RoundCounter,
}

/// A built complex `P(r)`.
pub struct ScxComplex {
    inner: Complex,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> ScxStatus {
    match e {
        Error::InvalidArgument(_) => ScxStatus::InvalidArgument,
        Error::Precondition(_) => ScxStatus::Precondition,
        Error::Parse { .. } => ScxStatus::ParseError,
        Error::Overflow => ScxStatus::Overflow,
        Error::CollapseStuck(_) => ScxStatus::CollapseStuck,
    }
}

fn fail(e: Error) -> ScxStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn null(what: &str) -> ScxStatus {
    set_error(format!("{what} is null"));
    ScxStatus::NullPointer
}

fn guarded(f: impl FnOnce() -> ScxStatus) -> ScxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == ScxStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            s
        }
        Err(_) => {
            set_error("internal panic");
            ScxStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(text: *const c_char, what: &str) -> Result<&'a str, ScxStatus> {
    if text.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        ScxStatus::InvalidArgument
    })
}

unsafe fn give_string(text: String, out: *mut *mut c_char) -> ScxStatus {
    match CString::new(text) {
        Ok(s) => {
            *out = s.into_raw();
            ScxStatus::Ok
        }
        Err(_) => {
            set_error("string contains NUL");
            ScxStatus::Internal
        }
    }
}

/// Parse a counter in the comma syntax (`"2,x,1"`).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn scx_counter_parse(
    text: *const c_char,
    out: *mut *mut ScxCounter,
) -> ScxStatus {
    guarded(|| {
        if out.is_null() {
            return null("out");
        }
        let text = match read_str(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match RoundCounter::parse(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ScxCounter { inner }));
                ScxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Build a counter from `len` values; `UINT32_MAX` marks an absent process.
///
/// # Safety
/// `values` must point to `len` readable integers (or be null with `len == 0`).
#[no_mangle]
pub unsafe extern "C" fn scx_counter_from_values(
    values: *const u32,
    len: usize,
    out: *mut *mut ScxCounter,
) -> ScxStatus {
    guarded(|| {
        if out.is_null() {
            return null("out");
        }
        if values.is_null() && len > 0 {
            return null("values");
        }
        let slice = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(values, len)
        };
        let inner = RoundCounter::from_entries(
            slice
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != u32::MAX)
                .map(|(i, &v)| (i as u32, v)),
        );
        *out = Box::into_raw(Box::new(ScxCounter { inner }));
        ScxStatus::Ok
    })
}

/// # Safety
/// `counter` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn scx_counter_free(counter: *mut ScxCounter) {
    if !counter.is_null() {
        drop(Box::from_raw(counter));
    }
}

/// The counter in comma syntax.
///
/// # Safety
/// `counter` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scx_counter_to_string(
    counter: *const ScxCounter,
    out: *mut *mut c_char,
) -> ScxStatus {
    guarded(|| {
        if counter.is_null() {
            return null("counter");
        }
        if out.is_null() {
            return null("out");
        }
        give_string((*counter).inner.to_string(), out)
    })
}

/// Number of top simplices of `P(r)` by the counting recursion.
///
/// # Safety
/// `counter` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scx_count_top(counter: *const ScxCounter, out: *mut u64) -> ScxStatus {
    guarded(|| {
        if counter.is_null() {
            return null("counter");
        }
        if out.is_null() {
            return null("out");
        }
        match f_top(&(*counter).inner.values()) {
            Ok(n) => {
                *out = n;
                ScxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Build `P(r)`.
///
/// # Safety
/// `counter` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scx_complex_build(
    counter: *const ScxCounter,
    out: *mut *mut ScxComplex,
) -> ScxStatus {
    guarded(|| {
        if counter.is_null() {
            return null("counter");
        }
        if out.is_null() {
            return null("out");
        }
        *out = Box::into_raw(Box::new(ScxComplex {
            inner: build(&(*counter).inner),
        }));
        ScxStatus::Ok
    })
}

/// # Safety
/// `complex` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn scx_complex_free(complex: *mut ScxComplex) {
    if !complex.is_null() {
        drop(Box::from_raw(complex));
    }
}

/// Dimension, or -2 for a null handle.
///
/// # Safety
/// `complex` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scx_complex_dim(complex: *const ScxComplex) -> i64 {
    if complex.is_null() {
        return -2;
    }
    (*complex).inner.dim()
}

/// Number of simplices including the empty one, or 0 for a null handle.
///
/// # Safety
/// `complex` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scx_complex_len(complex: *const ScxComplex) -> usize {
    if complex.is_null() {
        return 0;
    }
    (*complex).inner.len()
}

/// Write the f-vector, starting with the empty simplex, into `buf`. `len`
/// receives the needed length even when `cap` is too small.
///
/// # Safety
/// `buf` must have room for `cap` values (or be null with `cap == 0`); `len`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn scx_complex_f_vector(
    complex: *const ScxComplex,
    buf: *mut u64,
    cap: usize,
    len: *mut usize,
) -> ScxStatus {
    guarded(|| {
        if complex.is_null() {
            return null("complex");
        }
        if len.is_null() {
            return null("len");
        }
        let counts = (*complex).inner.f_vector().counts;
        *len = counts.len();
        if cap < counts.len() {
            set_error(format!("f-vector needs {} slots", counts.len()));
            return ScxStatus::BufferTooSmall;
        }
        if buf.is_null() {
            return null("buf");
        }
        ptr::copy_nonoverlapping(counts.as_ptr(), buf, counts.len());
        ScxStatus::Ok
    })
}

/// The complex as JSON.
///
/// # Safety
/// `complex` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scx_complex_to_json(
    complex: *const ScxComplex,
    out: *mut *mut c_char,
) -> ScxStatus {
    guarded(|| {
        if complex.is_null() {
            return null("complex");
        }
        if out.is_null() {
            return null("out");
        }
        give_string((*complex).inner.to_json().to_string(), out)
    })
}

/// The dual graph in DOT.
///
/// # Safety
/// `complex` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scx_complex_to_dot(
    complex: *const ScxComplex,
    out: *mut *mut c_char,
) -> ScxStatus {
    guarded(|| {
        if complex.is_null() {
            return null("complex");
        }
        if out.is_null() {
            return null("out");
        }
        give_string((*complex).inner.to_dot(), out)
    })
}

/// Run checks by name (comma separated, null for all) and return the reports
/// as JSON lines in `out`. Returns `CheckFailed` when any check failed.
///
/// # Safety
/// `counter` must be a live handle, `checks` null or a NUL-terminated string,
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scx_verify(
    counter: *const ScxCounter,
    checks: *const c_char,
    out: *mut *mut c_char,
) -> ScxStatus {
    guarded(|| {
        if counter.is_null() {
            return null("counter");
        }
        if out.is_null() {
            return null("out");
        }
        let names: Vec<String> = if checks.is_null() {
            Vec::new()
        } else {
            match read_str(checks, "checks") {
                Ok(s) => s
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect(),
                Err(s) => return s,
            }
        };
        let r = &(*counter).inner;
        let cfg = match snapcx::cli::configure(&r.to_string(), &names, None) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        let mut cache = snapcx::complex::ComplexCache::new();
        let mut lines = String::new();
        let mut first_failure = None;
        for name in &cfg.checks {
            let reports = match snapcx::cli::run_check(name, r, &mut cache) {
                Ok(v) => v,
                Err(e) => return fail(e),
            };
            for rep in reports {
                if !rep.ok && first_failure.is_none() {
                    first_failure = Some(format!(
                        "{}: {}",
                        rep.check,
                        rep.counterexample.clone().unwrap_or_default()
                    ));
                }
                lines.push_str(&rep.to_json_line());
                lines.push('\n');
            }
        }
        let s = give_string(lines, out);
        match (s, first_failure) {
            (ScxStatus::Ok, Some(f)) => {
                set_error(f);
                ScxStatus::CheckFailed
            }
            (s, _) => s,
        }
    })
}

/// Collapse `P(r)` to a vertex; `out` receives
/// `{"steps":[{"free","coface"}],"residual":[...]}`.
///
/// # Safety
/// `counter` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scx_collapse(
    counter: *const ScxCounter,
    out: *mut *mut c_char,
) -> ScxStatus {
    guarded(|| {
        if counter.is_null() {
            return null("counter");
        }
        if out.is_null() {
            return null("out");
        }
        let r = &(*counter).inner;
        let seq = match collapse_to_point(r) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        let v = validate_collapse(&build(r), &seq);
        if !v.ok {
            set_error(v.reason.unwrap_or_default());
            return ScxStatus::CheckFailed;
        }
        give_string(seq.to_json().to_string(), out)
    })
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn scx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed only once.
#[no_mangle]
pub unsafe extern "C" fn scx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
