//! C interface to `blindcounter`.
//!
//! Objects are handed out as opaque pointers and must be released with the
//! matching `*_free` function. Every fallible call returns a [`BcaStatus`];
//! on failure [`bca_last_error`] describes what went wrong. Strings returned
//! through out-parameters are owned by the caller and released with
//! [`bca_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use blindcounter::liminf::{liminf_automaton, reduction_check};
use blindcounter::{
    decide_accept, oracle_accept, AcceptanceVerdict, BlindCounterAutomaton, DecideOptions,
    ExplorationCaps, IntegerLasso, LassoWord, OracleVerdict,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    WordError = 4,
    EliminationError = 5,
    DecisionError = 6,
    OracleError = 7,
    Panic = 8,
}

/// Oracle outcome.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcaOracleResult {
    Accept = 0,
    /// Conclusive rejection: nothing accepting below an untouched cap.
    Reject = 1,
    Unknown = 2,
}

/// Opaque automaton handle.
pub struct BcaAutomaton {
    inner: BlindCounterAutomaton,
}

/// Opaque decision result.
pub struct BcaVerdict {
    inner: AcceptanceVerdict,
    text: String,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

type Failure = (BcaStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BcaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BcaStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BcaStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err((BcaStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (BcaStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn object<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| (BcaStatus::NullPointer, format!("{what} is null")))
}

fn check_out<T>(p: *mut T) -> Result<(), Failure> {
    if p.is_null() {
        Err((BcaStatus::NullPointer, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

fn owned_string(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .unwrap_or_default()
        .into_raw()
}

fn lasso(s: &str) -> Result<LassoWord, Failure> {
    LassoWord::parse(s).map_err(|e| (BcaStatus::WordError, e.to_string()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bca_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bca_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bca_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an automaton from its text form.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bca_automaton_parse(
    source: *const c_char,
    out: *mut *mut BcaAutomaton,
) -> BcaStatus {
    guard(|| {
        check_out(out)?;
        let src = text(source, "source")?;
        let inner = BlindCounterAutomaton::parse(src)
            .map_err(|e| (BcaStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(BcaAutomaton { inner }));
        Ok(())
    })
}

/// The built-in liminf automaton, ε-transitions included.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bca_automaton_liminf(out: *mut *mut BcaAutomaton) -> BcaStatus {
    guard(|| {
        check_out(out)?;
        *out = Box::into_raw(Box::new(BcaAutomaton {
            inner: liminf_automaton(),
        }));
        Ok(())
    })
}

/// Releases an automaton. NULL is ignored.
///
/// # Safety
/// `a` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bca_automaton_free(a: *mut BcaAutomaton) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Number of well-formedness violations; 0 means the automaton is valid.
///
/// # Safety
/// `a` must be a live automaton and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bca_automaton_violation_count(
    a: *const BcaAutomaton,
    out: *mut usize,
) -> BcaStatus {
    guard(|| {
        check_out(out)?;
        *out = object(a, "automaton")?.inner.validate().len();
        Ok(())
    })
}

/// A new automaton without ε-transitions accepting the same words.
///
/// # Safety
/// `a` must be a live automaton and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bca_automaton_eliminate_epsilon(
    a: *const BcaAutomaton,
    out: *mut *mut BcaAutomaton,
) -> BcaStatus {
    guard(|| {
        check_out(out)?;
        let inner = object(a, "automaton")?
            .inner
            .eliminate_epsilon()
            .map_err(|e| (BcaStatus::EliminationError, e.to_string()))?;
        *out = Box::into_raw(Box::new(BcaAutomaton { inner }));
        Ok(())
    })
}

/// Text form of an automaton; release with `bca_string_free`.
///
/// # Safety
/// `a` must be a live automaton and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bca_automaton_to_text(
    a: *const BcaAutomaton,
    out: *mut *mut c_char,
) -> BcaStatus {
    guard(|| {
        check_out(out)?;
        *out = owned_string(&object(a, "automaton")?.inner.to_text());
        Ok(())
    })
}

/// Decides acceptance of the lasso `u|v` by a one-counter automaton
/// without ε-transitions. A `cutoff` of 0 selects the default.
///
/// # Safety
/// `a` must be a live automaton, `word` a NUL-terminated string and `out`
/// a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bca_decide(
    a: *const BcaAutomaton,
    word: *const c_char,
    cutoff: u64,
    out: *mut *mut BcaVerdict,
) -> BcaStatus {
    guard(|| {
        check_out(out)?;
        let a = &object(a, "automaton")?.inner;
        let w = lasso(text(word, "word")?)?;
        let options = DecideOptions {
            cutoff: (cutoff > 0).then_some(cutoff),
        };
        let inner =
            decide_accept(a, &w, options).map_err(|e| (BcaStatus::DecisionError, e.to_string()))?;
        let text = inner.to_key_values(a);
        *out = Box::into_raw(Box::new(BcaVerdict { inner, text }));
        Ok(())
    })
}

/// Releases a verdict. NULL is ignored.
///
/// # Safety
/// `v` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bca_verdict_free(v: *mut BcaVerdict) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Whether the word was accepted. False for NULL.
///
/// # Safety
/// `v` must be NULL or a live verdict.
#[no_mangle]
pub unsafe extern "C" fn bca_verdict_accepted(v: *const BcaVerdict) -> bool {
    v.as_ref().is_some_and(|v| v.inner.accepted)
}

/// Whether a witness run is attached. False for NULL.
///
/// # Safety
/// `v` must be NULL or a live verdict.
#[no_mangle]
pub unsafe extern "C" fn bca_verdict_has_witness(v: *const BcaVerdict) -> bool {
    v.as_ref().is_some_and(|v| v.inner.witness.is_some())
}

/// Counter value needed to start the witness cycle, or 0 without witness.
///
/// # Safety
/// `v` must be NULL or a live verdict.
#[no_mangle]
pub unsafe extern "C" fn bca_verdict_requirement(v: *const BcaVerdict) -> u64 {
    v.as_ref()
        .and_then(|v| v.inner.witness.as_ref())
        .map_or(0, |w| w.requirement)
}

/// The verdict as `key=value` lines; release with `bca_string_free`.
///
/// # Safety
/// `v` must be a live verdict and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bca_verdict_to_text(
    v: *const BcaVerdict,
    out: *mut *mut c_char,
) -> BcaStatus {
    guard(|| {
        check_out(out)?;
        *out = owned_string(&object(v, "verdict")?.text);
        Ok(())
    })
}

/// Bounded brute-force acceptance check.
///
/// # Safety
/// `a` must be a live automaton, `word` a NUL-terminated string and `out`
/// a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bca_oracle(
    a: *const BcaAutomaton,
    word: *const c_char,
    counter_cap: u64,
    depth_cap: usize,
    out: *mut BcaOracleResult,
) -> BcaStatus {
    guard(|| {
        check_out(out)?;
        let a = &object(a, "automaton")?.inner;
        let w = lasso(text(word, "word")?)?;
        let v = oracle_accept(a, &w, ExplorationCaps::new(counter_cap, depth_cap))
            .map_err(|e| (BcaStatus::OracleError, e.to_string()))?;
        *out = match v {
            OracleVerdict::Accept(_) => BcaOracleResult::Accept,
            other if other.conclusive() == Some(false) => BcaOracleResult::Reject,
            _ => BcaOracleResult::Unknown,
        };
        Ok(())
    })
}

/// Checks, for the integer lasso `m0,m1|p0,p1`, that a finite liminf,
/// acceptance of its code and the block characterization coincide.
///
/// # Safety
/// `sequence` must be a NUL-terminated string and `holds` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bca_reduction_check(
    sequence: *const c_char,
    holds: *mut bool,
) -> BcaStatus {
    guard(|| {
        check_out(holds)?;
        let x = IntegerLasso::parse(text(sequence, "sequence")?)
            .map_err(|e| (BcaStatus::WordError, e.to_string()))?;
        let rep = reduction_check(&x).map_err(|e| (BcaStatus::DecisionError, e.to_string()))?;
        *holds = rep.holds();
        Ok(())
    })
}
