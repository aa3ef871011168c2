//! C ABI over `lkcat`: opaque handles, status codes, JSON strings.
//!
//! Strings returned through `char **` out-parameters are owned by the caller
//! and must be released with `lk_string_free`. Handles are released with
//! their `_free` function. After a non-`LK_STATUS_OK` return,
//! `lk_last_error` describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lkcat::front::{emit_svg, FrontDiagram};
use lkcat::mutation::{apply_braid_word, mutation_period, parse_braid_word, ExceptionalSequence, SODPair};
use lkcat::puiseux::FormalType;
use lkcat::scalar::parse_rational;
use lkcat::sheafknot::{monodromy, validate_front_sheaf, FrontSheaf};
use num_rational::BigRational;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Invalid = 4,
    ValidationFailed = 5,
    Panic = 6,
}

/// A front diagram with the epsilon it was built at.
pub struct LkFront {
    front: FrontDiagram,
    epsilon: BigRational,
}

/// A sheaf on a front.
pub struct LkFrontSheaf {
    sheaf: FrontSheaf,
}

/// An exceptional sequence in an Euler lattice.
pub struct LkSequence {
    seq: ExceptionalSequence,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(LkStatus, String);

type Res<T> = Result<T, Failure>;

fn fail<E: std::fmt::Display>(status: LkStatus) -> impl Fn(E) -> Failure {
    move |e| Failure(status, e.to_string())
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Res<LkStatus>) -> LkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => {
            if status == LkStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            status
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LkStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Res<&'a str> {
    if p.is_null() {
        return Err(Failure(LkStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(fail(LkStatus::InvalidUtf8))
}

unsafe fn handle<'a, T>(p: *const T) -> Res<&'a T> {
    p.as_ref().ok_or_else(|| Failure(LkStatus::NullPointer, "null handle".into()))
}

unsafe fn put<T>(out: *mut T, value: T) -> Res<()> {
    if out.is_null() {
        return Err(Failure(LkStatus::NullPointer, "null out-parameter".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Res<()> {
    let c = CString::new(s).map_err(fail(LkStatus::Invalid))?;
    put(out, c.into_raw())
}

/// Message for the last failure on this thread, or NULL. Valid until the
/// next call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn lk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn lk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Build a front. `formal_type` is formal-type JSON or a JSON list of class
/// expressions; `epsilon` is a positive rational such as `"1/10"`.
///
/// # Safety
/// Pointers must be valid NUL-terminated strings and a writable out-pointer.
#[no_mangle]
pub unsafe extern "C" fn lk_front_build(
    formal_type: *const c_char,
    epsilon: *const c_char,
    out: *mut *mut LkFront,
) -> LkStatus {
    guard(|| {
        let json: serde_json::Value = serde_json::from_str(text(formal_type)?).map_err(fail(LkStatus::Parse))?;
        let formal = match json.as_array() {
            Some(items) => {
                let exprs: Vec<&str> = items
                    .iter()
                    .map(|v| v.as_str().ok_or_else(|| Failure(LkStatus::Parse, "class entries must be strings".into())))
                    .collect::<Res<_>>()?;
                FormalType::parse_all(&exprs).map_err(fail(LkStatus::Parse))?
            }
            None => serde_json::from_value(json).map_err(fail(LkStatus::Parse))?,
        };
        let eps = parse_rational(text(epsilon)?).map_err(fail(LkStatus::Parse))?;
        let front = FrontDiagram::build(&formal, &eps).map_err(fail(LkStatus::Invalid))?;
        put(out, Box::into_raw(Box::new(LkFront { front, epsilon: eps })))?;
        Ok(LkStatus::Ok)
    })
}

/// Strand, crossing and component counts; any out-pointer may be NULL.
///
/// # Safety
/// `front` must be a live handle; non-NULL out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn lk_front_counts(
    front: *const LkFront,
    strands: *mut usize,
    crossings: *mut usize,
    components: *mut usize,
) -> LkStatus {
    guard(|| {
        let f = &handle(front)?.front;
        for (p, v) in [
            (strands, f.strands()),
            (crossings, f.crossing_count()),
            (components, f.components().len()),
        ] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(LkStatus::Ok)
    })
}

/// Front JSON.
///
/// # Safety
/// `front` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lk_front_to_json(front: *const LkFront, out: *mut *mut c_char) -> LkStatus {
    guard(|| {
        let s = serde_json::to_string(&handle(front)?.front).map_err(fail(LkStatus::Invalid))?;
        put_string(out, s)?;
        Ok(LkStatus::Ok)
    })
}

/// SVG drawing with `samples` points per strand.
///
/// # Safety
/// `front` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lk_front_svg(front: *const LkFront, samples: usize, out: *mut *mut c_char) -> LkStatus {
    guard(|| {
        let f = handle(front)?;
        put_string(out, emit_svg(&f.front, &f.epsilon, samples.max(2)))?;
        Ok(LkStatus::Ok)
    })
}

/// # Safety
/// `front` must come from `lk_front_build` and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn lk_front_free(front: *mut LkFront) {
    if !front.is_null() {
        drop(Box::from_raw(front));
    }
}

/// Parse a front sheaf from JSON with an inline front.
///
/// # Safety
/// `json` must be a valid string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lk_sheaf_from_json(json: *const c_char, out: *mut *mut LkFrontSheaf) -> LkStatus {
    guard(|| {
        let value: serde_json::Value = serde_json::from_str(text(json)?).map_err(fail(LkStatus::Parse))?;
        let sheaf = FrontSheaf::from_value(value, None).map_err(fail(LkStatus::Parse))?;
        put(out, Box::into_raw(Box::new(LkFrontSheaf { sheaf })))?;
        Ok(LkStatus::Ok)
    })
}

/// Validate; writes the JSON report and returns `LK_STATUS_VALIDATION_FAILED`
/// if the sheaf fails. `report` may be NULL.
///
/// # Safety
/// `sheaf` must be a live handle; `report` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn lk_sheaf_validate(sheaf: *const LkFrontSheaf, report: *mut *mut c_char) -> LkStatus {
    guard(|| {
        let r = validate_front_sheaf(&handle(sheaf)?.sheaf);
        if !report.is_null() {
            put_string(report, serde_json::to_string(&r).map_err(fail(LkStatus::Invalid))?)?;
        }
        if r.pass {
            Ok(LkStatus::Ok)
        } else {
            set_error("sheaf failed validation");
            Ok(LkStatus::ValidationFailed)
        }
    })
}

/// Monodromy of a component as matrix JSON.
///
/// # Safety
/// `sheaf` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lk_sheaf_monodromy(
    sheaf: *const LkFrontSheaf,
    component: usize,
    out: *mut *mut c_char,
) -> LkStatus {
    guard(|| {
        let s = &handle(sheaf)?.sheaf;
        let r = validate_front_sheaf(s);
        if !r.pass {
            return Err(Failure(LkStatus::ValidationFailed, "sheaf failed validation".into()));
        }
        let m = monodromy(s, component).map_err(fail(LkStatus::Invalid))?;
        put_string(out, serde_json::to_string(&m).map_err(fail(LkStatus::Invalid))?)?;
        Ok(LkStatus::Ok)
    })
}

/// # Safety
/// `sheaf` must come from `lk_sheaf_from_json` and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn lk_sheaf_free(sheaf: *mut LkFrontSheaf) {
    if !sheaf.is_null() {
        drop(Box::from_raw(sheaf));
    }
}

/// Parse `{"gram": [[...]], "vectors": [[...]]}`.
///
/// # Safety
/// `json` must be a valid string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lk_sequence_from_json(json: *const c_char, out: *mut *mut LkSequence) -> LkStatus {
    guard(|| {
        let seq: ExceptionalSequence = serde_json::from_str(text(json)?).map_err(fail(LkStatus::Parse))?;
        put(out, Box::into_raw(Box::new(LkSequence { seq })))?;
        Ok(LkStatus::Ok)
    })
}

/// Apply a braid word such as `"s1 S2"` in place. On failure the sequence
/// is unchanged.
///
/// # Safety
/// `seq` must be a live handle and `word` a valid string.
#[no_mangle]
pub unsafe extern "C" fn lk_sequence_act(seq: *mut LkSequence, word: *const c_char) -> LkStatus {
    guard(|| {
        let s = seq
            .as_mut()
            .ok_or_else(|| Failure(LkStatus::NullPointer, "null handle".into()))?;
        let w = parse_braid_word(text(word)?).map_err(fail(LkStatus::Parse))?;
        s.seq = apply_braid_word(&s.seq, &w).map_err(fail(LkStatus::Invalid))?;
        Ok(LkStatus::Ok)
    })
}

/// Sequence JSON.
///
/// # Safety
/// `seq` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lk_sequence_to_json(seq: *const LkSequence, out: *mut *mut c_char) -> LkStatus {
    guard(|| {
        let s = serde_json::to_string(&handle(seq)?.seq).map_err(fail(LkStatus::Invalid))?;
        put_string(out, s)?;
        Ok(LkStatus::Ok)
    })
}

/// # Safety
/// `seq` must come from `lk_sequence_from_json` and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn lk_sequence_free(seq: *mut LkSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// Period of left mutation on a two-block pair, or `-1` if none within `max`.
///
/// # Safety
/// `pair_json` must be a valid string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lk_mutation_period(pair_json: *const c_char, max: usize, out: *mut i64) -> LkStatus {
    guard(|| {
        let pair: SODPair = serde_json::from_str(text(pair_json)?).map_err(fail(LkStatus::Parse))?;
        let p = mutation_period(&pair, max).map_err(fail(LkStatus::Invalid))?;
        put(out, p.map_or(-1, |k| k as i64))?;
        Ok(LkStatus::Ok)
    })
}
