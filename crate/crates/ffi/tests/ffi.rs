use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use fuzzy_asdim_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { fz_string_free(s) };
    out
}

fn last_error() -> String {
    let p = fz_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn space(kind: &str, tnorm: Option<&str>) -> *mut FzSpace {
    let kind = c(kind);
    let tnorm = tnorm.map(c);
    let mut out = ptr::null_mut();
    let st = unsafe {
        fz_space_new(
            kind.as_ptr(),
            tnorm.as_ref().map_or(ptr::null(), |t| t.as_ptr()),
            &mut out,
        )
    };
    assert_eq!(st, FzStatus::Ok);
    out
}

#[test]
fn membership_of_standard_space() {
    let s = space("standard", None);
    let mut out = ptr::null_mut();
    // t / (t + |x - y|) with t = 1, |x - y| = 3
    let st = unsafe { fz_space_membership(s, c("0").as_ptr(), c("3").as_ptr(), c("1").as_ptr(), &mut out) };
    assert_eq!(st, FzStatus::Ok);
    assert_eq!(take(out), "1/4");
    assert!(fz_last_error().is_null());

    let st = unsafe { fz_space_membership(s, c("0").as_ptr(), c("3").as_ptr(), c("0").as_ptr(), &mut out) };
    assert_ne!(st, FzStatus::Ok);
    assert!(!last_error().is_empty());
    unsafe { fz_space_free(s) };
}

#[test]
fn lattice_points_parse() {
    let s = space("lattice:2", None);
    let mut out = ptr::null_mut();
    // taxicab distance 3 at t = 3 gives 3 / 6
    let st = unsafe { fz_space_membership(s, c("(0,0)").as_ptr(), c("(1,-2)").as_ptr(), c("3").as_ptr(), &mut out) };
    assert_eq!(st, FzStatus::Ok);
    assert_eq!(take(out), "1/2");
    let st = unsafe { fz_space_membership(s, c("(0,x)").as_ptr(), c("(1,2)").as_ptr(), c("3").as_ptr(), &mut out) };
    assert_eq!(st, FzStatus::Parse);
    unsafe { fz_space_free(s) };
}

#[test]
fn error_codes() {
    let mut out = ptr::null_mut();
    let st = unsafe { fz_space_new(c("hyperbolic").as_ptr(), ptr::null(), &mut out) };
    assert_eq!(st, FzStatus::Parse);
    assert!(last_error().contains("hyperbolic"));
    assert!(out.is_null());

    let st = unsafe { fz_space_new(ptr::null(), ptr::null(), &mut out) };
    assert_eq!(st, FzStatus::NullArgument);
    let st = unsafe { fz_space_new(c("standard").as_ptr(), ptr::null(), ptr::null_mut()) };
    assert_eq!(st, FzStatus::NullArgument);

    let bad = [0xffu8, 0];
    let st = unsafe { fz_space_new(bad.as_ptr() as *const c_char, ptr::null(), &mut out) };
    assert_eq!(st, FzStatus::InvalidUtf8);

    // the Lukasiewicz t-norm has no derived scale for the pipeline
    let s = space("ratio_minmax", Some("lukasiewicz"));
    let mut rep = ptr::null_mut();
    let st = unsafe { fz_pipeline_run(s, c("1..50").as_ptr(), c("1/2:1").as_ptr(), &mut rep) };
    assert_eq!(st, FzStatus::Derivation);
    assert!(rep.is_null());
    unsafe { fz_space_free(s) };

    let s = space("ratio_minmax", None);
    let mut k = 0usize;
    let st = unsafe { fz_oracle_min_families(s, c("1..11").as_ptr(), c("1/2:1").as_ptr(), ptr::null(), &mut k) };
    assert_eq!(st, FzStatus::Precondition);
    unsafe { fz_space_free(s) };
}

#[test]
fn axioms_reports() {
    let s = space("pathological", Some("product"));
    let mut rep = ptr::null_mut();
    let st = unsafe { fz_space_check_axioms(s, c("1..12").as_ptr(), ptr::null(), &mut rep) };
    assert_eq!(st, FzStatus::Ok);
    assert_eq!(unsafe { fz_report_passed(rep) }, 0);
    let n = unsafe { fz_report_len(rep) };
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { fz_report_to_jsonl(rep, &mut text) }, FzStatus::Ok);
    let text = take(text);
    assert_eq!(text.lines().count(), n);
    assert!(text.contains("\"fail\""));
    unsafe {
        fz_report_free(rep);
        fz_space_free(s);
    }

    let s = space("ultrametric", None);
    let mut rep = ptr::null_mut();
    let st = unsafe { fz_space_check_axioms(s, c("1..12").as_ptr(), c("1,3/2,4").as_ptr(), &mut rep) };
    assert_eq!(st, FzStatus::Ok);
    assert_eq!(unsafe { fz_report_passed(rep) }, 1);
    unsafe {
        fz_report_free(rep);
        fz_space_free(s);
    }
}

#[test]
fn witness_round_trip() {
    let s = space("ratio_minmax", None);
    let mut w = ptr::null_mut();
    let st = unsafe { fz_witness_construct(s, c("1..500").as_ptr(), c("1/2:1").as_ptr(), &mut w) };
    assert_eq!(st, FzStatus::Ok);
    assert_eq!(unsafe { fz_witness_family_count(w) }, 2);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { fz_witness_to_json(w, &mut json) }, FzStatus::Ok);
    let json = take(json);
    let mut w2 = ptr::null_mut();
    assert_eq!(
        unsafe { fz_witness_from_json(c(&json).as_ptr(), &mut w2) },
        FzStatus::Ok
    );

    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { fz_witness_verify(s, w2, &mut rep) }, FzStatus::Ok);
    assert_eq!(unsafe { fz_report_passed(rep) }, 1);
    unsafe { fz_report_free(rep) };

    let mut w3 = ptr::null_mut();
    assert_eq!(
        unsafe { fz_witness_from_json(c("{\"n\": 1}").as_ptr(), &mut w3) },
        FzStatus::Parse
    );
    unsafe {
        fz_witness_free(w);
        fz_witness_free(w2);
        fz_space_free(s);
    }
}

#[test]
fn oracle_and_pipeline() {
    let s = space("ratio_minmax", None);
    let mut k = 0usize;
    let st = unsafe { fz_oracle_min_families(s, c("2..9").as_ptr(), c("1/2:1").as_ptr(), ptr::null(), &mut k) };
    assert_eq!(st, FzStatus::Ok);
    assert_eq!(k, 2);

    let mut rep = ptr::null_mut();
    let st = unsafe { fz_pipeline_run(s, c("1..200").as_ptr(), c("1/2:1").as_ptr(), &mut rep) };
    assert_eq!(st, FzStatus::Ok, "{}", last_error_or_empty());
    assert_eq!(unsafe { fz_report_passed(rep) }, 1);
    unsafe {
        fz_report_free(rep);
        fz_space_free(s);
    }
}

fn last_error_or_empty() -> String {
    let p = fz_last_error();
    if p.is_null() {
        String::new()
    } else {
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        fz_space_free(ptr::null_mut());
        fz_witness_free(ptr::null_mut());
        fz_report_free(ptr::null_mut());
        fz_string_free(ptr::null_mut());
        assert_eq!(fz_report_passed(ptr::null()), 0);
        assert_eq!(fz_witness_family_count(ptr::null()), 0);
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/fuzzy_asdim.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in [
        "fz_space_new",
        "fz_witness_verify",
        "fz_last_error",
        "FZ_STATUS_PANIC",
        "typedef struct FzSpace",
    ] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    assert!(cc.status.success());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"fuzzy_asdim.h\"\nint main(void) { FzSpace *s = 0; FzStatus st = fz_space_new(\"standard\", 0, &s); fz_space_free(s); return st == FZ_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
