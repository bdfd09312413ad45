//! C ABI over the word-problem routines of `ectower`.
//!
//! Handles are opaque and owned by the caller: every `*_parse` that returns
//! `ECT_STATUS_OK` hands out a pointer that must be released with the matching
//! `*_free`. Strings returned through `char **` are released with
//! [`ect_string_free`]. On failure the message is available from
//! [`ect_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use ectower::formats::{inline_only, parse_group, parse_tower};
use ectower::presentation::Presentation;
use ectower::tower::Tower;
use ectower::{Error, Word};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EctStatus {
    Ok = 0,
    /// A required pointer argument was null.
    Null = 1,
    /// Malformed text, bad UTF-8, or a symbol outside the alphabet.
    Parse = 2,
    /// The presentation or case is outside what the library decides.
    Unsupported = 3,
    /// A bounded search ran out of budget.
    Bound = 4,
    /// A panic or an unexpected library error.
    Internal = 5,
}

/// A finitely presented group.
pub struct EctGroup {
    inner: Presentation,
}

/// A tower of centralizer extensions.
pub struct EctTower {
    inner: Tower,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EctStatus {
    match e {
        Error::Parse { .. } | Error::AlphabetMismatch(_) | Error::Invalid(_) => EctStatus::Parse,
        Error::UnsupportedCase(_) | Error::UnsupportedPresentation(_) => EctStatus::Unsupported,
        Error::BoundExhausted(_) | Error::NoSolutionWithinBound(_) => EctStatus::Bound,
        Error::NotASolution(_) | Error::RelatorFailed { .. } => EctStatus::Internal,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, recording any failure (including a panic) as the thread's last
/// error.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> EctStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EctStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer passed for `{what}`"));
            EctStatus::Null
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            EctStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Lib(Error::Invalid(format!("`{what}` is not valid UTF-8"))))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s)
        .map_err(|_| Fail::Lib(Error::Invalid("result contains a NUL byte".into())))?;
    *out = c.into_raw();
    Ok(())
}

/// Message of the last failure on this thread, or null if there was none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ect_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn ect_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Freely reduces `word` (for example `"a b b^-1"` gives `"a"`).
///
/// # Safety
/// `word` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ect_word_reduce(word: *const c_char, out: *mut *mut c_char) -> EctStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let w = Word::parse(text(word, "word")?)?;
        put_string(out, w.to_string())
    })
}

/// Parses a group in the `.grp` text format.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ect_group_parse(src: *const c_char, out: *mut *mut EctGroup) -> EctStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let g = parse_group(text(src, "src")?)?;
        *out = Box::into_raw(Box::new(EctGroup { inner: g }));
        Ok(())
    })
}

/// # Safety
/// `g` must come from [`ect_group_parse`] and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn ect_group_free(g: *mut EctGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Sets `*is_trivial` to 1 if `word` is the identity in `g`, else 0.
///
/// # Safety
/// `g` must be a live handle, `word` NUL-terminated and `is_trivial` valid.
#[no_mangle]
pub unsafe extern "C" fn ect_group_wp(
    g: *const EctGroup,
    word: *const c_char,
    is_trivial: *mut c_int,
) -> EctStatus {
    guard(|| {
        let g = g.as_ref().ok_or(Fail::Null("group"))?;
        if is_trivial.is_null() {
            return Err(Fail::Null("is_trivial"));
        }
        let w = Word::parse(text(word, "word")?)?;
        g.inner.alphabet().check(&w)?;
        *is_trivial = c_int::from(g.inner.wp(&w)?);
        Ok(())
    })
}

/// Parses a tower in the `.twr` text format. The base group must be given
/// inline.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ect_tower_parse(src: *const c_char, out: *mut *mut EctTower) -> EctStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let t = parse_tower(text(src, "src")?, &inline_only)?;
        *out = Box::into_raw(Box::new(EctTower { inner: t }));
        Ok(())
    })
}

/// A tower with no levels over `g`. The group is copied.
///
/// # Safety
/// `g` must be a live group handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ect_tower_from_group(
    g: *const EctGroup,
    out: *mut *mut EctTower,
) -> EctStatus {
    guard(|| {
        let g = g.as_ref().ok_or(Fail::Null("group"))?;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let t = Tower::new(g.inner.name(), Arc::new(g.inner.clone()));
        *out = Box::into_raw(Box::new(EctTower { inner: t }));
        Ok(())
    })
}

/// # Safety
/// `t` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn ect_tower_free(t: *mut EctTower) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of centralizer extensions in `t`, or -1 if `t` is null.
///
/// # Safety
/// `t` must be null or a live tower handle.
#[no_mangle]
pub unsafe extern "C" fn ect_tower_height(t: *const EctTower) -> c_int {
    t.as_ref().map_or(-1, |t| {
        c_int::try_from(t.inner.height()).unwrap_or(c_int::MAX)
    })
}

/// Sets `*is_trivial` to 1 if `word` is the identity in `t`, else 0.
///
/// # Safety
/// `t` must be a live handle, `word` NUL-terminated and `is_trivial` valid.
#[no_mangle]
pub unsafe extern "C" fn ect_tower_wp(
    t: *const EctTower,
    word: *const c_char,
    is_trivial: *mut c_int,
) -> EctStatus {
    guard(|| {
        let t = t.as_ref().ok_or(Fail::Null("tower"))?;
        if is_trivial.is_null() {
            return Err(Fail::Null("is_trivial"));
        }
        let w = Word::parse(text(word, "word")?)?;
        t.inner.alphabet().check(&w)?;
        *is_trivial = c_int::from(t.inner.wp(&w)?);
        Ok(())
    })
}

/// Writes the Britton-reduced form of `word` to `*out`.
///
/// # Safety
/// `t` must be a live handle, `word` NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ect_tower_britton_reduce(
    t: *const EctTower,
    word: *const c_char,
    out: *mut *mut c_char,
) -> EctStatus {
    guard(|| {
        let t = t.as_ref().ok_or(Fail::Null("tower"))?;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let w = Word::parse(text(word, "word")?)?;
        t.inner.alphabet().check(&w)?;
        put_string(out, t.inner.britton_reduce(&w)?.to_string())
    })
}
