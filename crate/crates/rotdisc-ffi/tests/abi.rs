//! Exercises the C entry points from Rust: status codes, artifact content,
//! error reporting, and handle/string lifecycle.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use serde_json::Value;

use rotdisc_ffi::{
    rotdisc_alpha_free, rotdisc_alpha_from_cf, rotdisc_alpha_from_surd, rotdisc_classify_json,
    rotdisc_construct_json, rotdisc_decompose_json, rotdisc_dimension_json, rotdisc_expand_json,
    rotdisc_last_error, rotdisc_path_csv, rotdisc_patterns_json, rotdisc_string_free,
    rotdisc_verify_json, rotdisc_version, RotdiscAlpha, ROTDISC_INVALID, ROTDISC_OK,
};

fn last_error() -> String {
    unsafe { CStr::from_ptr(rotdisc_last_error()) }
        .to_string_lossy()
        .into_owned()
}

/// Takes ownership of an out-string, frees the C allocation, returns Rust copy.
fn consume(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null(), "artifact pointer should be set");
    let s = unsafe { CStr::from_ptr(ptr) }.to_string_lossy().into_owned();
    unsafe { rotdisc_string_free(ptr) };
    s
}

fn silver() -> *mut RotdiscAlpha {
    let literal = CString::new("0;(2)").unwrap();
    let mut handle: *mut RotdiscAlpha = ptr::null_mut();
    let code = unsafe { rotdisc_alpha_from_cf(literal.as_ptr(), &mut handle) };
    assert_eq!(code, ROTDISC_OK, "{}", last_error());
    handle
}

#[test]
fn version_is_a_static_string() {
    let v = unsafe { CStr::from_ptr(rotdisc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn alpha_round_trip_and_expand() {
    let handle = silver();
    let mut out: *mut c_char = ptr::null_mut();
    let code = unsafe { rotdisc_expand_json(handle, 5, &mut out) };
    assert_eq!(code, ROTDISC_OK, "{}", last_error());
    let doc: Value = serde_json::from_str(&consume(out)).unwrap();
    assert_eq!(doc["alpha"], "0;(2)");
    let qs: Vec<&str> = doc["convergents"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["q"].as_str().unwrap())
        .collect();
    assert_eq!(qs, ["1", "2", "5", "12", "29", "70"]);
    unsafe { rotdisc_alpha_free(handle) };
}

#[test]
fn surd_constructor_matches_cf_constructor() {
    let literal = CString::new("(-1+1*sqrt(2))/1").unwrap();
    let mut handle: *mut RotdiscAlpha = ptr::null_mut();
    let code = unsafe { rotdisc_alpha_from_surd(literal.as_ptr(), &mut handle) };
    assert_eq!(code, ROTDISC_OK, "{}", last_error());
    let mut out: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { rotdisc_expand_json(handle, 2, &mut out) },
        ROTDISC_OK
    );
    let doc: Value = serde_json::from_str(&consume(out)).unwrap();
    assert_eq!(doc["alpha"], "0;(2)");
    unsafe { rotdisc_alpha_free(handle) };
}

#[test]
fn invalid_literals_set_the_error_message() {
    let literal = CString::new("2;3").unwrap(); // finite = rational
    let mut handle: *mut RotdiscAlpha = ptr::null_mut();
    let code = unsafe { rotdisc_alpha_from_cf(literal.as_ptr(), &mut handle) };
    assert_eq!(code, ROTDISC_INVALID);
    assert!(handle.is_null());
    assert!(last_error().contains("irrational"), "{}", last_error());

    let code = unsafe { rotdisc_alpha_from_cf(ptr::null(), &mut handle) };
    assert_eq!(code, ROTDISC_INVALID);
    assert!(last_error().contains("null"), "{}", last_error());
}

#[test]
fn path_csv_matches_the_library() {
    let handle = silver();
    let c = CString::new("1/2").unwrap();
    let mut out: *mut c_char = ptr::null_mut();
    let code = unsafe { rotdisc_path_csv(handle, c.as_ptr(), 7, &mut out) };
    assert_eq!(code, ROTDISC_OK, "{}", last_error());
    let csv = consume(out);
    assert!(csv.starts_with("n,xi_n,kDn,runmax,runmin\n1,1,1,1,0\n"));
    assert_eq!(csv.lines().count(), 8);

    let bad = CString::new("2/2").unwrap();
    let mut out2: *mut c_char = ptr::null_mut();
    let code = unsafe { rotdisc_path_csv(handle, bad.as_ptr(), 7, &mut out2) };
    assert_eq!(code, ROTDISC_INVALID);
    assert!(out2.is_null(), "no artifact on failure");
    unsafe { rotdisc_alpha_free(handle) };
}

#[test]
fn classify_reports_the_verdict() {
    let handle = silver();
    let c = CString::new("1/2").unwrap();
    let mut out: *mut c_char = ptr::null_mut();
    let code = unsafe { rotdisc_classify_json(handle, c.as_ptr(), &mut out) };
    assert_eq!(code, ROTDISC_OK, "{}", last_error());
    let doc: Value = serde_json::from_str(&consume(out)).unwrap();
    assert_eq!(doc["verdict"], "below");
    assert_eq!(doc["witness_m"], -1);
    assert_eq!(doc["condition2_m"], -1);
    unsafe { rotdisc_alpha_free(handle) };
}

#[test]
fn patterns_tables_and_kind_validation() {
    let kind = CString::new("elementary").unwrap();
    let mut out: *mut c_char = ptr::null_mut();
    let code = unsafe { rotdisc_patterns_json(2, kind.as_ptr(), &mut out) };
    assert_eq!(code, ROTDISC_OK, "{}", last_error());
    let doc: Value = serde_json::from_str(&consume(out)).unwrap();
    assert_eq!(doc["patterns"].as_array().unwrap().len(), 7);

    let bad = CString::new("bogus").unwrap();
    let mut out2: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { rotdisc_patterns_json(2, bad.as_ptr(), &mut out2) },
        ROTDISC_INVALID
    );
    assert!(last_error().contains("bogus"));
}

#[test]
fn decompose_accepts_a_raw_tuple() {
    let tuple: [u64; 5] = [1, 0, 0, 1, 1];
    let mut out: *mut c_char = ptr::null_mut();
    let code = unsafe { rotdisc_decompose_json(tuple.as_ptr(), tuple.len(), 2, &mut out) };
    assert_eq!(code, ROTDISC_OK, "{}", last_error());
    let doc: Value = serde_json::from_str(&consume(out)).unwrap();
    assert_eq!(doc["input"], serde_json::json!([1, 0, 0, 1, 1]));

    // Empty tuple with a null pointer is legal.
    let mut out2: *mut c_char = ptr::null_mut();
    let code = unsafe { rotdisc_decompose_json(ptr::null(), 0, 2, &mut out2) };
    assert_eq!(code, ROTDISC_OK, "{}", last_error());
    consume(out2);
}

#[test]
fn construct_delivers_the_requested_side() {
    let prefix: [i64; 3] = [3, 1, 4];
    let mut out: *mut c_char = ptr::null_mut();
    let code =
        unsafe { rotdisc_construct_json(prefix.as_ptr(), prefix.len(), 5, 0, &mut out) };
    assert_eq!(code, ROTDISC_OK, "{}", last_error());
    let doc: Value = serde_json::from_str(&consume(out)).unwrap();
    assert_eq!(doc["verdict"], "above");
    assert!(doc["alpha"].as_str().unwrap().starts_with("3;1,4,"));

    let mut out2: *mut c_char = ptr::null_mut();
    let code = unsafe { rotdisc_construct_json(ptr::null(), 0, 2, 1, &mut out2) };
    assert_eq!(code, ROTDISC_OK, "{}", last_error());
    let doc: Value = serde_json::from_str(&consume(out2)).unwrap();
    assert_eq!(doc["verdict"], "below");
}

#[test]
fn dimension_bound_has_certified_endpoints() {
    let tol = CString::new("1e-4").unwrap();
    let mut out: *mut c_char = ptr::null_mut();
    let code = unsafe { rotdisc_dimension_json(tol.as_ptr(), &mut out) };
    assert_eq!(code, ROTDISC_OK, "{}", last_error());
    let doc: Value = serde_json::from_str(&consume(out)).unwrap();
    assert!(doc["c_star_lower"].is_string());
    assert!(doc["c_star_upper"].is_string());
    assert!(!doc["g_samples"].as_array().unwrap().is_empty());

    let bad = CString::new("0").unwrap();
    let mut out2: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { rotdisc_dimension_json(bad.as_ptr(), &mut out2) },
        ROTDISC_INVALID
    );
}

#[test]
fn verify_runs_named_suites() {
    let suites = CString::new("patterns, three-distance").unwrap();
    let mut out: *mut c_char = ptr::null_mut();
    let code = unsafe { rotdisc_verify_json(suites.as_ptr(), 11, &mut out) };
    assert_eq!(code, ROTDISC_OK, "{}", last_error());
    let doc: Value = serde_json::from_str(&consume(out)).unwrap();
    assert_eq!(doc["all_pass"], true);
    assert_eq!(doc["suites"].as_array().unwrap().len(), 2);

    let bad = CString::new("nonsense").unwrap();
    let mut out2: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { rotdisc_verify_json(bad.as_ptr(), 11, &mut out2) },
        ROTDISC_INVALID
    );
}

#[test]
fn freeing_null_is_a_no_op() {
    unsafe {
        rotdisc_alpha_free(ptr::null_mut());
        rotdisc_string_free(ptr::null_mut());
    }
}

/// The committed header must describe the current ABI surface.
#[test]
fn generated_header_is_current() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/rotdisc.h"
    ))
    .expect("include/rotdisc.h should be generated at build time");
    for symbol in [
        "rotdisc_last_error",
        "rotdisc_version",
        "rotdisc_alpha_from_cf",
        "rotdisc_alpha_from_surd",
        "rotdisc_alpha_free",
        "rotdisc_string_free",
        "rotdisc_expand_json",
        "rotdisc_path_csv",
        "rotdisc_classify_json",
        "rotdisc_patterns_json",
        "rotdisc_decompose_json",
        "rotdisc_construct_json",
        "rotdisc_dimension_json",
        "rotdisc_verify_json",
        "ROTDISC_OK",
        "ROTDISC_INVALID",
        "ROTDISC_COMPUTE",
        "ROTDISC_VERIFY",
        "struct RotdiscAlpha RotdiscAlpha",
    ] {
        assert!(header.contains(symbol), "header lacks {symbol}");
    }
}
