//! C ABI for the rotation-discrepancy toolkit.
//!
//! Conventions:
//! - Every fallible call returns a status code: 0 success, 1 invalid input,
//!   2 computation error (resource budget or internal failure),
//!   3 verification failure. On any nonzero code the per-thread message from
//!   [`rotdisc_last_error`] describes what went wrong.
//! - Rotation numbers are opaque [`RotdiscAlpha`] handles created by
//!   `rotdisc_alpha_from_cf` / `rotdisc_alpha_from_surd` and released with
//!   `rotdisc_alpha_free`. A handle canonicalizes its expansion to the
//!   fractional part (the discrepancy is invariant under integer shifts).
//! - String results are NUL-terminated, UTF-8, heap-allocated; release them
//!   with `rotdisc_string_free`. Output pointers are written only on success
//!   (and on verification failure for `rotdisc_verify_json`, whose report is
//!   the artifact).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_bigint::BigInt;
use serde_json::json;

use rotdisc::classify::{classification_json, classify, construct_member, cstar, Parity};
use rotdisc::discrepancy::{csv_string, path_direct, path_recursive};
use rotdisc::numkernel::{
    cf_from_surd, convergents, parse_decimal, parse_ratio, CfExpansion, Surd,
};
use rotdisc::orbit::Alpha;
use rotdisc::patterns::{
    enumerate_elementary, enumerate_prime, prime_decompose, type_k_primes, EnumBudget,
};
use rotdisc::{verify, Error};

/// Success.
pub const ROTDISC_OK: i32 = 0;
/// Invalid input: bad literal, null pointer, out-of-range parameter.
pub const ROTDISC_INVALID: i32 = 1;
/// Computation error: resource budget exceeded or internal failure.
pub const ROTDISC_COMPUTE: i32 = 2;
/// Verification failure: a property suite failed, or the two path
/// evaluators disagreed.
pub const ROTDISC_VERIFY: i32 = 3;

/// Opaque handle to an irrational rotation number.
pub struct RotdiscAlpha {
    alpha: Alpha,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> =
        RefCell::new(CString::new("").expect("empty string has no NUL"));
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&ch| ch != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NUL bytes were removed");
    });
}

fn fail(e: Error) -> i32 {
    set_error(&e.to_string());
    match e {
        Error::Parse { .. } | Error::InvalidInput(_) => ROTDISC_INVALID,
        Error::Budget(_) | Error::Internal(_) => ROTDISC_COMPUTE,
    }
}

fn invalid(msg: &str) -> i32 {
    set_error(msg);
    ROTDISC_INVALID
}

/// Runs an entry point body, converting any panic into a computation error
/// so unwinding never crosses the ABI boundary.
fn guarded(f: impl FnOnce() -> i32) -> i32 {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal panic");
        ROTDISC_COMPUTE
    })
}

/// # Safety: `ptr` must be a valid C string or null (null is rejected).
unsafe fn str_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, i32> {
    if ptr.is_null() {
        return Err(invalid(&format!("{name} must not be null")));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| invalid(&format!("{name} must be valid UTF-8")))
}

unsafe fn alpha_arg<'a>(ptr: *const RotdiscAlpha) -> Result<&'a Alpha, i32> {
    if ptr.is_null() {
        return Err(invalid("alpha handle must not be null"));
    }
    Ok(unsafe { &(*ptr).alpha })
}

fn write_string(out: *mut *mut c_char, artifact: String) -> i32 {
    match CString::new(artifact) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            ROTDISC_OK
        }
        Err(_) => {
            set_error("artifact contained an interior NUL byte");
            ROTDISC_COMPUTE
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON serialization cannot fail");
    s.push('\n');
    s
}

fn emit_alpha(out: *mut *mut RotdiscAlpha, cf: &CfExpansion) -> i32 {
    match Alpha::from_cf(cf) {
        Ok(alpha) => {
            let handle = Box::new(RotdiscAlpha { alpha });
            unsafe { *out = Box::into_raw(handle) };
            ROTDISC_OK
        }
        Err(e) => fail(e),
    }
}

/// Returns the message from the most recent failing call on this thread.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rotdisc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Returns the library version as a static string (do not free).
#[no_mangle]
pub extern "C" fn rotdisc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses a continued-fraction literal such as "0;(2)" or "0;2,1,(3,1)" into
/// a rotation-number handle. The expansion must be eventually periodic
/// (irrational).
///
/// # Safety
/// `literal` must be a valid C string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rotdisc_alpha_from_cf(
    literal: *const c_char,
    out: *mut *mut RotdiscAlpha,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            return invalid("out must not be null");
        }
        let literal = match unsafe { str_arg(literal, "literal") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let cf: CfExpansion = match literal.parse() {
            Ok(cf) => cf,
            Err(e) => return fail(e),
        };
        if cf.is_finite() {
            return invalid("alpha must be irrational: the expansion needs a period");
        }
        emit_alpha(out, &cf)
    })
}

/// Parses a real quadratic surd literal "(a+b*sqrt(d))/e" into a
/// rotation-number handle. The value must be irrational.
///
/// # Safety
/// `literal` must be a valid C string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rotdisc_alpha_from_surd(
    literal: *const c_char,
    out: *mut *mut RotdiscAlpha,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            return invalid("out must not be null");
        }
        let literal = match unsafe { str_arg(literal, "literal") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let surd: Surd = match literal.parse() {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        let cf = match cf_from_surd(&surd) {
            Ok(cf) => cf,
            Err(e) => return fail(e),
        };
        emit_alpha(out, &cf)
    })
}

/// Releases a rotation-number handle (null is ignored).
///
/// # Safety
/// `ptr` must come from an alpha constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rotdisc_alpha_free(ptr: *mut RotdiscAlpha) {
    if !ptr.is_null() {
        drop(unsafe { Box::from_raw(ptr) });
    }
}

/// Releases a string returned by this library (null is ignored).
///
/// # Safety
/// `ptr` must come from a `rotdisc_*` call that documents this release
/// function and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rotdisc_string_free(ptr: *mut c_char) {
    if !ptr.is_null() {
        drop(unsafe { CString::from_raw(ptr) });
    }
}

/// Writes the expansion and its convergents up to index `depth` as JSON.
///
/// # Safety
/// `alpha` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rotdisc_expand_json(
    alpha: *const RotdiscAlpha,
    depth: u64,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            return invalid("out must not be null");
        }
        let alpha = match unsafe { alpha_arg(alpha) } {
            Ok(a) => a,
            Err(code) => return code,
        };
        if depth > 100_000 {
            return invalid("depth must be at most 100000");
        }
        let cf = alpha.cf();
        let table = match convergents(cf, depth as i64) {
            Ok(t) => t,
            Err(e) => return fail(e),
        };
        let rows: Vec<serde_json::Value> = table
            .rows()
            .iter()
            .filter(|r| r.n >= 0)
            .map(|r| json!({ "n": r.n, "p": r.p.to_string(), "q": r.q.to_string() }))
            .collect();
        let doc = json!({
            "alpha": cf.to_string(),
            "prefix": cf.prefix().iter().map(BigInt::to_string).collect::<Vec<_>>(),
            "period": cf.period().iter().map(BigInt::to_string).collect::<Vec<_>>(),
            "finite": cf.is_finite(),
            "convergents": rows,
        });
        write_string(out, pretty(&doc))
    })
}

/// Computes the k-scaled discrepancy path for window `c` (a literal like
/// "1/2") over `n` steps with both evaluators, writes the CSV on agreement,
/// and reports ROTDISC_VERIFY if they ever disagree.
///
/// # Safety
/// `alpha` must be a live handle; `c` a valid C string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rotdisc_path_csv(
    alpha: *const RotdiscAlpha,
    c: *const c_char,
    n: u64,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            return invalid("out must not be null");
        }
        let alpha = match unsafe { alpha_arg(alpha) } {
            Ok(a) => a,
            Err(code) => return code,
        };
        let c = match unsafe { str_arg(c, "c") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        if n == 0 {
            return invalid("step count n must be at least 1");
        }
        let c = match parse_ratio(c) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        let direct = match path_direct(alpha, &c, n) {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        let recursive = match path_recursive(alpha, &c, n) {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        if let Some(i) = direct
            .values
            .iter()
            .zip(&recursive.values)
            .position(|(a, b)| a != b)
        {
            set_error(&format!(
                "paths diverge at n = {i}: direct kDn = {}, recursive kDn = {}",
                direct.values[i], recursive.values[i]
            ));
            return ROTDISC_VERIFY;
        }
        write_string(out, csv_string(&direct))
    })
}

/// Classifies one-sided boundedness at window `c` (a literal like "1/2")
/// and writes the JSON verdict.
///
/// # Safety
/// `alpha` must be a live handle; `c` a valid C string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rotdisc_classify_json(
    alpha: *const RotdiscAlpha,
    c: *const c_char,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            return invalid("out must not be null");
        }
        let alpha = match unsafe { alpha_arg(alpha) } {
            Ok(a) => a,
            Err(code) => return code,
        };
        let c = match unsafe { str_arg(c, "c") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let c = match parse_ratio(c) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        let (h, k) = match rotdisc::numkernel::window_parts(&c) {
            Ok(pair) => pair,
            Err(e) => return fail(e),
        };
        let cf = alpha.cf();
        match classify(cf, h, k) {
            Ok(cls) => write_string(
                out,
                pretty(&classification_json(&cf.to_string(), h, k, &cls)),
            ),
            Err(e) => fail(e),
        }
    })
}

/// Enumerates the pattern table for modulus `k`; `kind` is "elementary",
/// "prime", or "type-k-prime". Writes the table as JSON.
///
/// # Safety
/// `kind` must be a valid C string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rotdisc_patterns_json(
    k: u64,
    kind: *const c_char,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            return invalid("out must not be null");
        }
        let kind = match unsafe { str_arg(kind, "kind") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let budget = EnumBudget::default();
        let set = match kind {
            "elementary" => enumerate_elementary(k, &budget),
            "prime" => enumerate_prime(k, &budget),
            "type-k-prime" => type_k_primes(k, &budget),
            other => {
                return invalid(&format!(
                    "unknown pattern kind \"{other}\"; use elementary, prime, or type-k-prime"
                ))
            }
        };
        match set {
            Ok(set) => {
                let doc = serde_json::to_value(&set).expect("pattern sets serialize infallibly");
                write_string(out, pretty(&doc))
            }
            Err(e) => fail(e),
        }
    })
}

/// Decomposes the tuple `tuple[0..len]` (residues mod `k`) into a prime core
/// plus elementary insertions, written as JSON.
///
/// # Safety
/// `tuple` must point to `len` readable u64 values (or be null with
/// `len == 0`); `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rotdisc_decompose_json(
    tuple: *const u64,
    len: usize,
    k: u64,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            return invalid("out must not be null");
        }
        let tuple: &[u64] = if len == 0 {
            &[]
        } else if tuple.is_null() {
            return invalid("tuple must not be null when len > 0");
        } else {
            unsafe { std::slice::from_raw_parts(tuple, len) }
        };
        match prime_decompose(tuple, k) {
            Ok(d) => {
                let doc = serde_json::to_value(&d).expect("decompositions serialize infallibly");
                write_string(out, pretty(&doc))
            }
            Err(e) => fail(e),
        }
    })
}

/// Builds an expansion extending `prefix[0..len]` whose discrepancy at every
/// window with denominator `k` is bounded above (`odd_parity == 0`) or below
/// (`odd_parity != 0`), classifies it, and writes the JSON result.
///
/// # Safety
/// `prefix` must point to `len` readable i64 values (or be null with
/// `len == 0`); `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rotdisc_construct_json(
    prefix: *const i64,
    len: usize,
    k: i64,
    odd_parity: i32,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            return invalid("out must not be null");
        }
        let prefix: &[i64] = if len == 0 {
            &[]
        } else if prefix.is_null() {
            return invalid("prefix must not be null when len > 0");
        } else {
            unsafe { std::slice::from_raw_parts(prefix, len) }
        };
        let prefix: Vec<BigInt> = prefix.iter().map(|&b| BigInt::from(b)).collect();
        let parity = if odd_parity != 0 {
            Parity::Odd
        } else {
            Parity::Even
        };
        let expansion = match construct_member(&prefix, k, parity) {
            Ok(e) => e,
            Err(e) => return fail(e),
        };
        let classification = match classify(&expansion, 1, k) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        let doc = json!({
            "alpha": expansion.to_string(),
            "prefix": prefix.iter().map(BigInt::to_string).collect::<Vec<_>>(),
            "k": k,
            "parity": if odd_parity != 0 { "odd" } else { "even" },
            "verdict": classification.verdict,
            "witness_m": classification.witness_m,
            "condition2_m": classification.condition2_m,
        });
        write_string(out, pretty(&doc))
    })
}

/// Certifies an enclosure for the crossing point c* of the growth factor g,
/// to the bracket width given by the literal `tol` (e.g. "1e-6"), and writes
/// the JSON bound.
///
/// # Safety
/// `tol` must be a valid C string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rotdisc_dimension_json(
    tol: *const c_char,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            return invalid("out must not be null");
        }
        let tol = match unsafe { str_arg(tol, "tol") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let tolerance = match parse_decimal(tol) {
            Ok(t) => t,
            Err(e) => return fail(e),
        };
        match cstar(&tolerance) {
            Ok(bound) => write_string(out, pretty(&bound.to_json())),
            Err(e) => fail(e),
        }
    })
}

/// Runs the bundled property suites (`suites` is a comma-separated list, or
/// null/"all" for every suite) with the given seed. Writes the JSON report
/// even when a suite fails, returning ROTDISC_VERIFY in that case.
///
/// # Safety
/// `suites` must be a valid C string or null; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rotdisc_verify_json(
    suites: *const c_char,
    seed: u64,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            return invalid("out must not be null");
        }
        let names: Vec<String> = if suites.is_null() {
            Vec::new()
        } else {
            match unsafe { str_arg(suites, "suites") } {
                Ok(s) => s
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect(),
                Err(code) => return code,
            }
        };
        match verify::run(&names, seed) {
            Ok(report) => {
                let doc =
                    serde_json::to_value(&report).expect("verify reports serialize infallibly");
                let code = write_string(out, pretty(&doc));
                if code != ROTDISC_OK {
                    code
                } else if report.all_pass {
                    ROTDISC_OK
                } else {
                    set_error("one or more verification suites failed");
                    ROTDISC_VERIFY
                }
            }
            Err(e) => fail(e),
        }
    })
}
