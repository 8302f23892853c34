//! C ABI over `wpa-core`.
//!
//! Chains are opaque `WpaChain` handles owned by the caller and released
//! with `wpa_chain_free`. Strings returned through `char **` out-parameters
//! are released with `wpa_string_free`. Every call returns a `WpaStatus`;
//! on failure `wpa_last_error_message` describes the error until the next
//! call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use wpa_core::cli::{noncong_formula, parse_noncong_spec};
use wpa_core::json::{chain_from_str, chain_to_string};
use wpa_core::sdf::chain::is_satisfiable;
use wpa_core::solver::{decide, extract_witness};
use wpa_core::{DnfChain, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WpaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    BudgetExceeded = 4,
    SearchExhausted = 5,
    BadModulus = 6,
    Json = 7,
    DimensionMismatch = 8,
    Internal = 9,
}

/// Opaque solution set.
pub struct WpaChain {
    chain: DnfChain,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> WpaStatus {
    match e {
        Error::Parse { .. } | Error::UnknownSymbol { .. } => WpaStatus::Parse,
        Error::BudgetExceeded { .. } => WpaStatus::BudgetExceeded,
        Error::SearchExhausted => WpaStatus::SearchExhausted,
        Error::BadModulus(_) => WpaStatus::BadModulus,
        Error::Json(_) => WpaStatus::Json,
        Error::DimensionMismatch { .. } => WpaStatus::DimensionMismatch,
        _ => WpaStatus::Internal,
    }
}

fn fail(status: WpaStatus, msg: &str) -> WpaStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> WpaStatus {
    fail(status_of(&e), &e.to_string())
}

/// Runs `f`, turning panics into `WpaStatus::Internal`.
fn guard(f: impl FnOnce() -> WpaStatus) -> WpaStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(WpaStatus::Internal, &format!("internal error: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, WpaStatus> {
    if s.is_null() {
        return Err(fail(WpaStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(WpaStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> WpaStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            WpaStatus::Ok
        }
        Err(_) => fail(WpaStatus::Internal, "string contains a NUL byte"),
    }
}

/// Decides `formula`. A negative `max_neg` means no negation budget.
/// On success `*out_chain` receives the solution set, `*out_sat` 1 or 0 and
/// `*out_weight` the negation count. `out_weight` may be null.
///
/// # Safety
/// `formula` must be a NUL-terminated string; the out-pointers must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wpa_decide(
    formula: *const c_char,
    max_neg: i64,
    out_chain: *mut *mut WpaChain,
    out_sat: *mut i32,
    out_weight: *mut u32,
) -> WpaStatus {
    guard(|| {
        if out_chain.is_null() || out_sat.is_null() {
            return fail(WpaStatus::NullPointer, "null out-pointer");
        }
        let text = match read_str(formula) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let cap = usize::try_from(max_neg).ok();
        match decide(text, cap) {
            Ok(d) => {
                *out_sat = i32::from(d.satisfiable);
                if !out_weight.is_null() {
                    *out_weight = d.weight as u32;
                }
                *out_chain = Box::into_raw(Box::new(WpaChain { chain: d.chain }));
                WpaStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `chain` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wpa_chain_is_satisfiable(chain: *const WpaChain, out: *mut i32) -> WpaStatus {
    guard(|| {
        if chain.is_null() || out.is_null() {
            return fail(WpaStatus::NullPointer, "null argument");
        }
        *out = i32::from(is_satisfiable(&(*chain).chain));
        WpaStatus::Ok
    })
}

/// Ambient dimension of the set, or 0 for a null handle.
///
/// # Safety
/// `chain` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn wpa_chain_dim(chain: *const WpaChain) -> usize {
    if chain.is_null() {
        0
    } else {
        (*chain).chain.dim()
    }
}

/// Membership of the point `point[0..len]`; `len` must equal the dimension.
///
/// # Safety
/// `point` must be valid for `len` reads (it may be null when `len` is 0).
#[no_mangle]
pub unsafe extern "C" fn wpa_chain_contains(
    chain: *const WpaChain,
    point: *const i64,
    len: usize,
    out: *mut i32,
) -> WpaStatus {
    guard(|| {
        if chain.is_null() || out.is_null() || (point.is_null() && len > 0) {
            return fail(WpaStatus::NullPointer, "null argument");
        }
        let c = &(*chain).chain;
        if len != c.dim() {
            return from_error(Error::DimensionMismatch { expected: c.dim(), found: len });
        }
        let p: &[i64] = if len == 0 { &[] } else { std::slice::from_raw_parts(point, len) };
        *out = i32::from(c.contains_i64(p));
        WpaStatus::Ok
    })
}

/// A member of the set as a JSON array of decimal strings, or `null` when
/// the set is empty.
///
/// # Safety
/// `chain` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wpa_chain_witness_json(chain: *const WpaChain, out: *mut *mut c_char) -> WpaStatus {
    guard(|| {
        if chain.is_null() || out.is_null() {
            return fail(WpaStatus::NullPointer, "null argument");
        }
        match extract_witness(&(*chain).chain) {
            Ok(None) => write_string(out, "null".into()),
            Ok(Some(p)) => {
                let items: Vec<String> = p.iter().map(|x| format!("\"{x}\"")).collect();
                write_string(out, format!("[{}]", items.join(",")))
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `chain` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wpa_chain_to_json(chain: *const WpaChain, out: *mut *mut c_char) -> WpaStatus {
    guard(|| {
        if chain.is_null() || out.is_null() {
            return fail(WpaStatus::NullPointer, "null argument");
        }
        write_string(out, chain_to_string(&(*chain).chain))
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wpa_chain_from_json(json: *const c_char, out: *mut *mut WpaChain) -> WpaStatus {
    guard(|| {
        if out.is_null() {
            return fail(WpaStatus::NullPointer, "null out-pointer");
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match chain_from_str(text) {
            Ok(chain) => {
                *out = Box::into_raw(Box::new(WpaChain { chain }));
                WpaStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Formula text for the non-congruence system given as `m1:r1,m2:r2,...`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wpa_gen_noncong(spec: *const c_char, out: *mut *mut c_char) -> WpaStatus {
    guard(|| {
        if out.is_null() {
            return fail(WpaStatus::NullPointer, "null out-pointer");
        }
        let text = match read_str(spec) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_noncong_spec(text).and_then(|p| noncong_formula(&p)) {
            Ok(f) => write_string(out, f),
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `chain` must be null or come from this library, and not be used again.
#[no_mangle]
pub unsafe extern "C" fn wpa_chain_free(chain: *mut WpaChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wpa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn wpa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Stable name of a status code.
#[no_mangle]
pub extern "C" fn wpa_status_name(status: WpaStatus) -> *const c_char {
    let s: &'static CStr = match status {
        WpaStatus::Ok => c"ok",
        WpaStatus::NullPointer => c"null pointer",
        WpaStatus::InvalidUtf8 => c"invalid UTF-8",
        WpaStatus::Parse => c"parse error",
        WpaStatus::BudgetExceeded => c"negation budget exceeded",
        WpaStatus::SearchExhausted => c"witness search exhausted",
        WpaStatus::BadModulus => c"bad modulus",
        WpaStatus::Json => c"malformed JSON",
        WpaStatus::DimensionMismatch => c"dimension mismatch",
        WpaStatus::Internal => c"internal error",
    };
    s.as_ptr()
}
