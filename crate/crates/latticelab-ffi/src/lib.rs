//! C ABI over the core library: opaque configuration handles, integer
//! status codes, and CSV/JSON results returned as strings the caller
//! frees with [`ll_string_free`].
//!
//! Conventions: every fallible call returns an [`LlStatus`]; on failure a
//! thread-local message describing the violated bound is readable through
//! [`ll_last_error_message`] until the next call on the same thread.
//! Output parameters are written only on `Ok`. Panics are caught at the
//! boundary and reported as [`LlStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use latticelab::catalog;
use latticelab::complexity;
use latticelab::config::{Configuration, SearchBox};
use latticelab::entropy;
use latticelab::error::LatticeError;
use latticelab::geometry::{pt, ConvexLatticeSet, Direction, Rational};

/// Result of a fallible call. Parse and domain failures are separated the
/// same way the command-line tool separates its exit codes.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LlStatus {
    /// Success; output parameters are valid.
    Ok = 0,
    /// Malformed input: spec strings, grid text, or rational encodings.
    ParseError = 1,
    /// Structurally valid input that violates a documented bound.
    DomainError = 2,
    /// A required pointer argument was null.
    NullPointer = 3,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 4,
    /// An internal panic was caught at the boundary.
    Panic = 5,
}

/// Opaque configuration handle; create with [`ll_config_from_spec`] or
/// [`ll_config_from_grid_text`], release with [`ll_config_free`].
pub struct LlConfig {
    inner: Configuration,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let stored = CString::new(message.replace('\0', " ")).expect("nul-free message");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(stored));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(err: &LatticeError) -> LlStatus {
    set_error(&err.to_string());
    if err.is_parse_error() {
        LlStatus::ParseError
    } else {
        LlStatus::DomainError
    }
}

/// Runs a body under panic protection and error-message bookkeeping.
fn guarded(body: impl FnOnce() -> LlStatus) -> LlStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            LlStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be null or point to a nul-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, LlStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(LlStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        LlStatus::InvalidUtf8
    })
}

fn make_box(x0: i64, x1: i64, y0: i64, y1: i64) -> Result<SearchBox, LlStatus> {
    SearchBox::new(x0, x1, y0, y1).map_err(|e| status_of(&e))
}

fn give_string(out: *mut *mut c_char, text: String) -> LlStatus {
    let stored = CString::new(text.replace('\0', " ")).expect("nul-free output");
    unsafe { *out = stored.into_raw() };
    LlStatus::Ok
}

/// Version of the linked library as a static string; never freed.
#[no_mangle]
pub extern "C" fn ll_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread, or null after a
/// success. The pointer is invalidated by the next library call on the
/// same thread; copy it before calling anything else.
#[no_mangle]
pub extern "C" fn ll_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

/// Builds a configuration from a catalog spec such as `"stripes:p=2"` or
/// `"grid:file=pattern.txt"`; see the catalog for the accepted names.
///
/// # Safety
/// `spec` must be a nul-terminated string, `out` a valid pointer. On `Ok`
/// the caller owns the handle written to `*out` and must release it with
/// [`ll_config_free`].
#[no_mangle]
pub unsafe extern "C" fn ll_config_from_spec(
    spec: *const c_char,
    out: *mut *mut LlConfig,
) -> LlStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return LlStatus::NullPointer;
        }
        let spec = match unsafe { read_str(spec) } {
            Ok(s) => s,
            Err(status) => return status,
        };
        match catalog::build_config(spec) {
            Ok(config) => {
                unsafe { *out = Box::into_raw(Box::new(LlConfig { inner: config })) };
                LlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Builds a configuration from grid text (`alphabet:` header plus rows,
/// top row first).
///
/// # Safety
/// Same contract as [`ll_config_from_spec`].
#[no_mangle]
pub unsafe extern "C" fn ll_config_from_grid_text(
    text: *const c_char,
    out: *mut *mut LlConfig,
) -> LlStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return LlStatus::NullPointer;
        }
        let text = match unsafe { read_str(text) } {
            Ok(s) => s,
            Err(status) => return status,
        };
        match Configuration::load_grid(text) {
            Ok(config) => {
                unsafe { *out = Box::into_raw(Box::new(LlConfig { inner: config })) };
                LlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a configuration handle. Null is a no-op.
///
/// # Safety
/// `config` must be null or a handle obtained from this library that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ll_config_free(config: *mut LlConfig) {
    if !config.is_null() {
        drop(unsafe { Box::from_raw(config) });
    }
}

/// Counts distinct colorings of the n-by-k rectangle over the inclusive
/// translate box [x0,x1]x[y0,y1]. Writes the count and whether the box
/// provably covers every translate class.
///
/// # Safety
/// `config` must be a live handle; `out_count` and `out_exact` must be
/// valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ll_complexity_rect(
    config: *const LlConfig,
    n: i64,
    k: i64,
    x0: i64,
    x1: i64,
    y0: i64,
    y1: i64,
    out_count: *mut u64,
    out_exact: *mut bool,
) -> LlStatus {
    guarded(|| {
        if config.is_null() || out_count.is_null() || out_exact.is_null() {
            set_error("null pointer argument");
            return LlStatus::NullPointer;
        }
        let config = unsafe { &(*config).inner };
        let b = match make_box(x0, x1, y0, y1) {
            Ok(b) => b,
            Err(status) => return status,
        };
        let region = match ConvexLatticeSet::rect(pt(0, 0), pt(n - 1, k - 1)) {
            Ok(r) => r,
            Err(e) => return status_of(&e),
        };
        match complexity::complexity(config, &region, &b) {
            Ok(result) => {
                unsafe {
                    *out_count = result.count;
                    *out_exact = result.exact;
                }
                LlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Emits the rectangle complexity table for all sides up to n_max and
/// k_max as CSV with header `n,k,count,exact`. The caller frees the
/// string with [`ll_string_free`].
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ll_rectangle_table_csv(
    config: *const LlConfig,
    n_max: i64,
    k_max: i64,
    x0: i64,
    x1: i64,
    y0: i64,
    y1: i64,
    out: *mut *mut c_char,
) -> LlStatus {
    guarded(|| {
        if config.is_null() || out.is_null() {
            set_error("null pointer argument");
            return LlStatus::NullPointer;
        }
        let config = unsafe { &(*config).inner };
        let b = match make_box(x0, x1, y0, y1) {
            Ok(b) => b,
            Err(status) => return status,
        };
        match complexity::rectangle_table(config, n_max, k_max, &b) {
            Ok(rows) => give_string(out, complexity::table_to_csv(&rows)),
            Err(e) => status_of(&e),
        }
    })
}

/// Computes a directional entropy profile and returns it as JSON.
/// Thicknesses arrive as parallel numerator and denominator arrays of
/// length `t_len`; scales as an integer array of length `s_len`. The
/// caller frees the string with [`ll_string_free`].
///
/// # Safety
/// `config` must be a live handle; `t_num` and `t_den` must point to
/// `t_len` readable values, `scales` to `s_len` readable values; `out`
/// must be a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn ll_entropy_profile_json(
    config: *const LlConfig,
    dir_p: i64,
    dir_q: i64,
    t_num: *const i64,
    t_den: *const i64,
    t_len: usize,
    scales: *const i64,
    s_len: usize,
    x0: i64,
    x1: i64,
    y0: i64,
    y1: i64,
    out: *mut *mut c_char,
) -> LlStatus {
    guarded(|| {
        if config.is_null() || out.is_null() || (t_len > 0 && (t_num.is_null() || t_den.is_null()))
        {
            set_error("null pointer argument");
            return LlStatus::NullPointer;
        }
        if s_len > 0 && scales.is_null() {
            set_error("null pointer argument");
            return LlStatus::NullPointer;
        }
        let config = unsafe { &(*config).inner };
        let dir = match Direction::new(dir_p, dir_q) {
            Ok(d) => d,
            Err(e) => return status_of(&e),
        };
        let nums = unsafe { std::slice::from_raw_parts(t_num, t_len) };
        let dens = unsafe { std::slice::from_raw_parts(t_den, t_len) };
        let mut ts = Vec::with_capacity(t_len);
        for (&n, &d) in nums.iter().zip(dens) {
            if d == 0 {
                set_error("thickness denominator is zero");
                return LlStatus::ParseError;
            }
            ts.push(Rational::new(n, d));
        }
        let ss = unsafe { std::slice::from_raw_parts(scales, s_len) }.to_vec();
        let b = match make_box(x0, x1, y0, y1) {
            Ok(b) => b,
            Err(status) => return status,
        };
        match entropy::directional_entropy_profile(config, dir, &ts, &ss, &b) {
            Ok(profile) => {
                let json = serde_json::to_string_pretty(&profile).expect("profile serializes");
                give_string(out, json)
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a string obtained from this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ll_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
