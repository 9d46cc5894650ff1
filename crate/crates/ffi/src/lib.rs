//! C ABI over `fuzzy-asdim`.
//!
//! Every object crosses the boundary as an opaque handle created by a
//! `fz_*_new`/`fz_*_construct` call and released by the matching `fz_*_free`.
//! Functions return an [`FzStatus`]; on anything but `FZ_STATUS_OK` the message is
//! available from [`fz_last_error`] on the same thread. Rationals, scales and
//! windows are passed as the same strings the command line accepts
//! (`"3/4"`, `"1/2:1"`, `"1..100"`). Strings returned through `char **`
//! outputs are owned by the caller and released with [`fz_string_free`].
//! Panics are caught and reported as `FZ_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fuzzy_asdim::asdim::{construct_witness, oracle_min_families, run_pipeline, verify_witness, DimensionWitness};
use fuzzy_asdim::{CertReport, Error, FuzzyMetricSpace, Point, Rational, ScaleParams, TNorm, Window};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FzStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    Unsupported = 5,
    Precondition = 6,
    SearchFailure = 7,
    Certification = 8,
    Derivation = 9,
    NonArchimedean = 10,
    Io = 11,
    Panic = 12,
}

/// A fuzzy metric space with its t-norm.
pub struct FzSpace(FuzzyMetricSpace);

/// A dimension witness: families of sets over a window.
pub struct FzWitness(DimensionWitness);

/// A certification report.
pub struct FzReport(CertReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> FzStatus {
    match err {
        Error::Domain(_) => FzStatus::Domain,
        Error::Unsupported(_) => FzStatus::Unsupported,
        Error::Precondition(_) => FzStatus::Precondition,
        Error::SearchFailure(_) => FzStatus::SearchFailure,
        Error::Certification(_) => FzStatus::Certification,
        Error::Derivation(_) => FzStatus::Derivation,
        Error::NonArchimedean(_) => FzStatus::NonArchimedean,
        Error::Parse(_) | Error::Rational(_) => FzStatus::Parse,
        Error::Io { .. } => FzStatus::Io,
    }
}

struct Fail(FzStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type Res<T> = std::result::Result<T, Fail>;

fn guard(f: impl FnOnce() -> Res<()>) -> FzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FzStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            FzStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Res<&'a str> {
    if p.is_null() {
        return Err(Fail(FzStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(FzStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn opt_text<'a>(p: *const c_char, what: &str) -> Res<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Res<&'a T> {
    p.as_ref()
        .ok_or_else(|| Fail(FzStatus::NullArgument, format!("{what} is null")))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Res<()> {
    if p.is_null() {
        return Err(Fail(FzStatus::NullArgument, format!("{what} is null")));
    }
    Ok(())
}

fn to_c_string(s: String) -> Res<*mut c_char> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(FzStatus::Panic, "interior NUL in output".into()))
}

fn parse_point(s: &str) -> Res<Point> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let coords = inner
            .split(',')
            .map(|c| c.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Fail(FzStatus::Parse, format!("invalid lattice point {s:?}")))?;
        return Ok(Point::Lattice(coords));
    }
    Ok(Point::real(s.parse::<Rational>().map_err(Error::from)?))
}

fn parse_window(s: &str) -> Res<Window> {
    Ok(s.parse::<Window>()?)
}

fn parse_scale(s: &str) -> Res<ScaleParams> {
    Ok(s.parse::<ScaleParams>()?)
}

/// Message for the last failed call on this thread, or null after a
/// success. The pointer stays valid until the next call on the thread.
#[no_mangle]
pub extern "C" fn fz_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a built-in space (`standard`, `standard_reals`, `lattice:N`,
/// `pathological`, `reciprocal_product`, `ratio_minmax`, `ultrametric`).
/// `tnorm` may be null for the space's default, or `product`, `min`,
/// `lukasiewicz`.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_space_new(kind: *const c_char, tnorm: *const c_char, out: *mut *mut FzSpace) -> FzStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let kind = text(kind, "kind")?;
        let mut space = FuzzyMetricSpace::builtin(kind)?;
        if let Some(t) = opt_text(tnorm, "tnorm")? {
            space = space.with_tnorm(t.parse::<TNorm>()?);
        }
        *out = Box::into_raw(Box::new(FzSpace(space)));
        Ok(())
    })
}

/// # Safety
/// `space` must come from [`fz_space_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fz_space_free(space: *mut FzSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Writes `M(x, y, t)` as a reduced `p/q` string. Points are rationals
/// (`"3"`, `"-1/2"`) or lattice tuples (`"(1,2)"`).
///
/// # Safety
/// Pointers must be valid; the output string is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn fz_space_membership(
    space: *const FzSpace,
    x: *const c_char,
    y: *const c_char,
    t: *const c_char,
    out: *mut *mut c_char,
) -> FzStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let space = &handle(space, "space")?.0;
        let x = parse_point(text(x, "x")?)?;
        let y = parse_point(text(y, "y")?)?;
        let t = text(t, "t")?.parse::<Rational>().map_err(Error::from)?;
        let m = space.eval_m(&x, &y, t)?;
        *out = to_c_string(m.reduced().to_string())?;
        Ok(())
    })
}

/// Checks the fuzzy metric axioms over `window`. `t_grid` is a
/// comma-separated list of positive rationals, or null for `1/2,1,2,7`.
///
/// # Safety
/// Pointers must be valid; the report is released with [`fz_report_free`].
#[no_mangle]
pub unsafe extern "C" fn fz_space_check_axioms(
    space: *const FzSpace,
    window: *const c_char,
    t_grid: *const c_char,
    out: *mut *mut FzReport,
) -> FzStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let space = &handle(space, "space")?.0;
        let window = parse_window(text(window, "window")?)?;
        let grid = opt_text(t_grid, "t_grid")?.unwrap_or("1/2,1,2,7");
        let grid = grid
            .split(',')
            .map(|s| s.trim().parse::<Rational>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(Error::from)?;
        let report = space.check_axioms(&window, &grid)?;
        *out = Box::into_raw(Box::new(FzReport(report)));
        Ok(())
    })
}

/// Constructs a witness for `space` at scale `"r:t"` over `window`.
///
/// # Safety
/// Pointers must be valid; the witness is released with [`fz_witness_free`].
#[no_mangle]
pub unsafe extern "C" fn fz_witness_construct(
    space: *const FzSpace,
    window: *const c_char,
    scale: *const c_char,
    out: *mut *mut FzWitness,
) -> FzStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let space = &handle(space, "space")?.0;
        let window = parse_window(text(window, "window")?)?;
        let params = parse_scale(text(scale, "scale")?)?;
        let w = construct_witness(space, params, &window)?;
        *out = Box::into_raw(Box::new(FzWitness(w)));
        Ok(())
    })
}

/// Reads a witness from its JSON form.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fz_witness_from_json(json: *const c_char, out: *mut *mut FzWitness) -> FzStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let json = text(json, "json")?;
        let w: DimensionWitness = serde_json::from_str(json).map_err(|e| Fail(FzStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(FzWitness(w)));
        Ok(())
    })
}

/// Writes the witness as JSON.
///
/// # Safety
/// Pointers must be valid; the output string is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn fz_witness_to_json(witness: *const FzWitness, out: *mut *mut c_char) -> FzStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let w = &handle(witness, "witness")?.0;
        *out = to_c_string(w.to_json())?;
        Ok(())
    })
}

/// Number of families, `n + 1`. Returns 0 for a null handle.
///
/// # Safety
/// `witness` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn fz_witness_family_count(witness: *const FzWitness) -> usize {
    witness.as_ref().map_or(0, |w| w.0.families.len())
}

/// Re-certifies a witness against `space`.
///
/// # Safety
/// Pointers must be valid; the report is released with [`fz_report_free`].
#[no_mangle]
pub unsafe extern "C" fn fz_witness_verify(
    space: *const FzSpace,
    witness: *const FzWitness,
    out: *mut *mut FzReport,
) -> FzStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let space = &handle(space, "space")?.0;
        let w = &handle(witness, "witness")?.0;
        let report = verify_witness(space, w)?;
        *out = Box::into_raw(Box::new(FzReport(report)));
        Ok(())
    })
}

/// # Safety
/// `witness` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fz_witness_free(witness: *mut FzWitness) {
    if !witness.is_null() {
        drop(Box::from_raw(witness));
    }
}

/// Runs the witness-to-refinement chain at `"r:t"` over `window`, taking
/// witnesses from the built-in constructors.
///
/// # Safety
/// Pointers must be valid; the report is released with [`fz_report_free`].
#[no_mangle]
pub unsafe extern "C" fn fz_pipeline_run(
    space: *const FzSpace,
    window: *const c_char,
    scale: *const c_char,
    out: *mut *mut FzReport,
) -> FzStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let space = &handle(space, "space")?.0;
        let window = parse_window(text(window, "window")?)?;
        let params = parse_scale(text(scale, "scale")?)?;
        let outcome = run_pipeline(space, params, &window, &|p| construct_witness(space, p, &window))?;
        *out = Box::into_raw(Box::new(FzReport(outcome.report)));
        Ok(())
    })
}

/// Least number of disjoint families needed at `"r:t"` on a window of at
/// most ten points, with members bounded at `bound` (null means `scale`).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fz_oracle_min_families(
    space: *const FzSpace,
    window: *const c_char,
    scale: *const c_char,
    bound: *const c_char,
    out: *mut usize,
) -> FzStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let space = &handle(space, "space")?.0;
        let window = parse_window(text(window, "window")?)?;
        let params = parse_scale(text(scale, "scale")?)?;
        let bound = match opt_text(bound, "bound")? {
            Some(b) => parse_scale(b)?,
            None => params,
        };
        *out = oracle_min_families(space, params, bound, &window)?.k;
        Ok(())
    })
}

/// 1 when no record failed, 0 otherwise (including a null handle).
///
/// # Safety
/// `report` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn fz_report_passed(report: *const FzReport) -> i32 {
    report.as_ref().map_or(0, |r| r.0.passed() as i32)
}

/// Number of records in the report.
///
/// # Safety
/// `report` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn fz_report_len(report: *const FzReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.records.len())
}

/// Writes the report as JSON lines, one record per line.
///
/// # Safety
/// Pointers must be valid; the output string is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn fz_report_to_jsonl(report: *const FzReport, out: *mut *mut c_char) -> FzStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let r = &handle(report, "report")?.0;
        *out = to_c_string(r.to_jsonl())?;
        Ok(())
    })
}

/// # Safety
/// `report` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fz_report_free(report: *mut FzReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
