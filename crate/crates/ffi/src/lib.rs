//! C ABI over exact-rational Cayley-Dickson elements.
//!
//! Elements are opaque `CdzElement` handles owned by the caller and released
//! with `cdz_element_free`. Strings returned through out-parameters are owned
//! by the caller and released with `cdz_string_free`. Every fallible call
//! returns a `CdzStatus`; on failure the message is available from
//! `cdz_last_error_message` on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cdzero::spectrum::spectrum;
use cdzero::zero_divisors::annihilator;
use cdzero::{format_element, multiply, parse_element, CdElement, CdError};

/// Opaque element handle.
pub struct CdzElement(CdElement);

/// Status codes. Nonzero values match the exit codes of the `cdzero` CLI
/// where a library error class exists.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdzStatus {
    Ok = 0,
    NullPointer = 1,
    Parse = 2,
    Level = 3,
    Precondition = 4,
    Numerical = 5,
    InvalidUtf8 = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<Vec<u8>>) {
    let text = CString::new(message).unwrap_or_else(|_| CString::new("error message contained NUL").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn status_of(err: &CdError) -> CdzStatus {
    match err.exit_code() {
        2 => CdzStatus::Parse,
        3 => CdzStatus::Level,
        4 => CdzStatus::Precondition,
        _ => CdzStatus::Numerical,
    }
}

struct Failure(CdzStatus, String);

impl From<CdError> for Failure {
    fn from(e: CdError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CdzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CdzStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {message}"));
            CdzStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CdzStatus::NullPointer, format!("{what} is null"))
}

unsafe fn element<'a>(p: *const CdzElement, what: &str) -> Result<&'a CdElement, Failure> {
    p.as_ref().map(|e| &e.0).ok_or_else(|| null(what))
}

unsafe fn store_element(out: *mut *mut CdzElement, e: CdElement) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(CdzElement(e)));
    Ok(())
}

unsafe fn store_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|_| Failure(CdzStatus::Numerical, "string contained NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Parses `text` (e.g. `"e1 - 1/2 e10"`) as an element of level `level`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cdz_element_parse(level: u32, text: *const c_char, out: *mut *mut CdzElement) -> CdzStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| Failure(CdzStatus::InvalidUtf8, "text is not valid UTF-8".into()))?;
        store_element(out, parse_element(level, text)?)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `e` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cdz_element_free(e: *mut CdzElement) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Level of the element, or 0 for a null handle.
///
/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cdz_element_level(e: *const CdzElement) -> u32 {
    e.as_ref().map_or(0, |e| e.0.level())
}

/// Canonical text form, released with `cdz_string_free`.
///
/// # Safety
/// `e` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cdz_element_to_string(e: *const CdzElement, out: *mut *mut c_char) -> CdzStatus {
    guard(|| store_string(out, format_element(element(e, "e")?)))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cdz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `out = a b`. Both operands must have the same level.
///
/// # Safety
/// `a` and `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cdz_multiply(
    a: *const CdzElement,
    b: *const CdzElement,
    out: *mut *mut CdzElement,
) -> CdzStatus {
    guard(|| store_element(out, multiply(element(a, "a")?, element(b, "b")?)?))
}

/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cdz_conjugate(a: *const CdzElement, out: *mut *mut CdzElement) -> CdzStatus {
    guard(|| store_element(out, element(a, "a")?.conjugate()))
}

/// `a~ = a e~0`; requires level >= 1.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cdz_tilde(a: *const CdzElement, out: *mut *mut CdzElement) -> CdzStatus {
    guard(|| store_element(out, element(a, "a")?.tilde()?))
}

/// Swaps the two halves; requires level >= 1.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cdz_hat(a: *const CdzElement, out: *mut *mut CdzElement) -> CdzStatus {
    guard(|| store_element(out, element(a, "a")?.hat()?))
}

/// Spectrum report of a doubly pure element as JSON, released with
/// `cdz_string_free`. `tol` is the eigenvalue clustering tolerance.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cdz_spectrum_json(a: *const CdzElement, tol: f64, out: *mut *mut c_char) -> CdzStatus {
    guard(|| {
        let report = spectrum(element(a, "a")?, tol)?;
        let text = serde_json::to_string(&report).map_err(|e| Failure(CdzStatus::Numerical, e.to_string()))?;
        store_string(out, text)
    })
}

/// Dimension of the kernel of left multiplication by `a`.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cdz_annihilator_dim(a: *const CdzElement, out: *mut usize) -> CdzStatus {
    guard(|| {
        let dim = annihilator(element(a, "a")?)?.dim;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = dim;
        Ok(())
    })
}

/// Message of the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cdz_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(level: u32, text: &str) -> *mut CdzElement {
        let c = CString::new(text).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { cdz_element_parse(level, c.as_ptr(), &mut out) }, CdzStatus::Ok);
        out
    }

    fn text(e: *const CdzElement) -> String {
        let mut s = ptr::null_mut();
        assert_eq!(unsafe { cdz_element_to_string(e, &mut s) }, CdzStatus::Ok);
        let t = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
        unsafe { cdz_string_free(s) };
        t
    }

    #[test]
    fn status_mapping_follows_exit_codes() {
        assert_eq!(status_of(&CdError::Parse("x".into())), CdzStatus::Parse);
        assert_eq!(status_of(&CdError::IndexOutOfRange { index: 9, level: 3 }), CdzStatus::Level);
        assert_eq!(status_of(&CdError::NotDoublyPure("spectrum")), CdzStatus::Precondition);
        assert_eq!(status_of(&CdError::Numerical("x".into())), CdzStatus::Numerical);
    }

    #[test]
    fn round_trip_and_tilde() {
        let a = parse(3, "e1");
        let mut t = ptr::null_mut();
        assert_eq!(unsafe { cdz_tilde(a, &mut t) }, CdzStatus::Ok);
        assert_eq!(text(t), "e5");
        assert_eq!(unsafe { cdz_element_level(t) }, 3);
        unsafe {
            cdz_element_free(a);
            cdz_element_free(t);
        }
    }

    #[test]
    fn panics_do_not_cross_the_boundary() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, CdzStatus::Panic);
        let msg = unsafe { CStr::from_ptr(cdz_last_error_message()) }.to_str().unwrap();
        assert!(msg.contains("boom"));
    }
}
