//! C interface to the quadef engine.
//!
//! Conventions:
//! - every fallible function returns a [`QuadefStatus`]; on failure the
//!   message and error class are available through
//!   [`quadef_last_error_message`] and [`quadef_last_error_kind`] on the
//!   calling thread until the next failing call;
//! - a sheaf is an opaque [`QuadefSheaf`] created by [`quadef_sheaf_parse`]
//!   and released with [`quadef_sheaf_free`];
//! - strings returned through out-parameters are owned by the caller and
//!   released with [`quadef_string_free`];
//! - a window of 0 means "the document's window, else the default".
//!
//! Panics never cross the boundary; they surface as `QUADEF_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use quadef::cli::{realize_json, report_json};
use quadef::defcomplex::{deformation_report, QuadraticSheaf};
use quadef::document::Document;
use quadef::realizer::realize_class;
use quadef::Error;

/// Result of a C-interface call. Values 1 to 4 match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadefStatus {
    Ok = 0,
    /// Malformed input text or unknown name.
    Parse = 1,
    /// Well-formed input that violates a mathematical requirement.
    Invalid = 2,
    /// The Cech window is too small for a stable answer.
    Unstable = 3,
    /// A construction failed its own verification.
    Internal = 4,
    /// A required pointer argument was null.
    NullArgument = 5,
    /// Input text was not valid UTF-8.
    InvalidUtf8 = 6,
    /// The engine panicked; this is a bug.
    Panic = 7,
}

/// A parsed orthogonal or symplectic sheaf.
pub struct QuadefSheaf {
    doc: Document,
    sheaf: QuadraticSheaf,
}

struct LastError {
    kind: CString,
    message: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<LastError>> = const { RefCell::new(None) };
}

fn cstring(s: &str) -> CString {
    CString::new(s.replace('\0', "\\0")).expect("interior nuls removed")
}

fn record(kind: &str, message: &str) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(LastError { kind: cstring(kind), message: cstring(message) }));
}

fn status_of(e: &Error) -> QuadefStatus {
    match e.exit_code() {
        1 => QuadefStatus::Parse,
        2 => QuadefStatus::Invalid,
        3 => QuadefStatus::Unstable,
        _ => QuadefStatus::Internal,
    }
}

fn fail(status: QuadefStatus, kind: &str, message: &str) -> QuadefStatus {
    record(kind, message);
    status
}

/// Runs `f`, converting engine errors and panics into a status.
fn guarded(f: impl FnOnce() -> Result<(), QuadefStatus>) -> QuadefStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QuadefStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(QuadefStatus::Panic, "Panic", &msg)
        }
    }
}

fn engine<T>(r: quadef::Result<T>) -> Result<T, QuadefStatus> {
    r.map_err(|e| fail(status_of(&e), e.kind(), &e.to_string()))
}

fn null(what: &str) -> QuadefStatus {
    fail(QuadefStatus::NullArgument, "NullArgument", &format!("{what} is null"))
}

unsafe fn sheaf_ref<'a>(p: *const QuadefSheaf) -> Result<&'a QuadefSheaf, QuadefStatus> {
    // SAFETY: callers pass a handle from quadef_sheaf_parse that has not been freed.
    unsafe { p.as_ref() }.ok_or_else(|| null("sheaf"))
}

fn window_arg(s: &QuadefSheaf, window: u32) -> Option<u32> {
    if window == 0 {
        s.doc.window
    } else {
        Some(window)
    }
}

unsafe fn give_string(out: *mut *mut c_char, s: String) -> Result<(), QuadefStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    // SAFETY: out is non-null and points to writable storage per the contract.
    unsafe { *out = cstring(&s).into_raw() };
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn quadef_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or NULL if none. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn quadef_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |e| e.message.as_ptr()))
}

/// Error class of the last failure on this thread (e.g. "DescentFailure"), or NULL.
#[no_mangle]
pub extern "C" fn quadef_last_error_kind() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |e| e.kind.as_ptr()))
}

/// Forgets the last error on this thread.
#[no_mangle]
pub extern "C" fn quadef_clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Parses a document into a new sheaf handle stored in `*out`.
///
/// Only the shape and degrees are checked here; use [`quadef_sheaf_validate`]
/// for the full set of conditions.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn quadef_sheaf_parse(text: *const c_char, out: *mut *mut QuadefSheaf) -> QuadefStatus {
    guarded(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: text is non-null and NUL-terminated per the contract.
        let text = unsafe { CStr::from_ptr(text) }
            .to_str()
            .map_err(|e| fail(QuadefStatus::InvalidUtf8, "InvalidUtf8", &e.to_string()))?;
        let doc = engine(Document::parse(text))?;
        let sheaf = engine(doc.quadratic_sheaf())?;
        // SAFETY: out is non-null.
        unsafe { *out = Box::into_raw(Box::new(QuadefSheaf { doc, sheaf })) };
        Ok(())
    })
}

/// Releases a handle. NULL is accepted.
///
/// # Safety
/// `sheaf` must come from [`quadef_sheaf_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn quadef_sheaf_free(sheaf: *mut QuadefSheaf) {
    if !sheaf.is_null() {
        // SAFETY: ownership returns to Rust exactly once.
        drop(unsafe { Box::from_raw(sheaf) });
    }
}

/// Ambient dimension n of P^n, or 0 for a NULL handle.
///
/// # Safety
/// `sheaf` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn quadef_sheaf_ambient_dim(sheaf: *const QuadefSheaf) -> usize {
    // SAFETY: per the contract.
    unsafe { sheaf.as_ref() }.map_or(0, |s| s.sheaf.n)
}

/// Number of generators (rank of the degree-0 term), or 0 for a NULL handle.
///
/// # Safety
/// `sheaf` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn quadef_sheaf_generators(sheaf: *const QuadefSheaf) -> usize {
    // SAFETY: per the contract.
    unsafe { sheaf.as_ref() }.map_or(0, |s| s.sheaf.w0().rank())
}

/// Checks the complex, symmetry, descent and nondegeneracy conditions.
///
/// # Safety
/// `sheaf` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn quadef_sheaf_validate(sheaf: *const QuadefSheaf) -> QuadefStatus {
    guarded(|| {
        // SAFETY: per the contract.
        let s = unsafe { sheaf_ref(sheaf) }?;
        engine(s.sheaf.validate()).map(|_| ())
    })
}

/// Writes h0, h1, h2 of the deformation complex into `out[0..3]`.
///
/// # Safety
/// `sheaf` must be a live handle and `out` must point to 3 writable `size_t`.
#[no_mangle]
pub unsafe extern "C" fn quadef_hypercohomology(sheaf: *const QuadefSheaf, window: u32, out: *mut usize) -> QuadefStatus {
    guarded(|| {
        // SAFETY: per the contract.
        let s = unsafe { sheaf_ref(sheaf) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = engine(deformation_report(&s.sheaf, window_arg(s, window)))?;
        // SAFETY: out has room for three values.
        unsafe { ptr::copy_nonoverlapping([r.h0, r.h1, r.h2].as_ptr(), out, 3) };
        Ok(())
    })
}

/// Full report as JSON (the same document `quadef report --json` prints).
///
/// # Safety
/// `sheaf` must be a live handle and `out` a valid pointer; free the result
/// with [`quadef_string_free`].
#[no_mangle]
pub unsafe extern "C" fn quadef_report_json(sheaf: *const QuadefSheaf, window: u32, out: *mut *mut c_char) -> QuadefStatus {
    guarded(|| {
        // SAFETY: per the contract.
        let s = unsafe { sheaf_ref(sheaf) }?;
        let r = engine(deformation_report(&s.sheaf, window_arg(s, window)))?;
        // SAFETY: per the contract.
        unsafe { give_string(out, report_json(&r)) }
    })
}

/// Realizes basis class `class` of H^1 as a first-order deformation, as JSON
/// (the same document `quadef realize --json` prints).
///
/// # Safety
/// `sheaf` must be a live handle and `out` a valid pointer; free the result
/// with [`quadef_string_free`].
#[no_mangle]
pub unsafe extern "C" fn quadef_realize_json(
    sheaf: *const QuadefSheaf,
    class: usize,
    window: u32,
    out: *mut *mut c_char,
) -> QuadefStatus {
    guarded(|| {
        // SAFETY: per the contract.
        let s = unsafe { sheaf_ref(sheaf) }?;
        engine(s.sheaf.validate())?;
        let (c, f) = engine(realize_class(&s.sheaf, class, window_arg(s, window)))?;
        // SAFETY: per the contract.
        unsafe { give_string(out, realize_json(class, &c, &f)) }
    })
}

/// Releases a string returned by this library. NULL is accepted.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn quadef_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: produced by CString::into_raw.
        drop(unsafe { CString::from_raw(s) });
    }
}
