//! C ABI for the workbench: opaque handles, integer status codes, and
//! decimal-string accessors for exact values. The header `include/bsf.h` is
//! generated by the build script.
//!
//! Conventions:
//! - Every fallible function returns a `BsfStatus`; out-parameters are
//!   written only on `BSF_STATUS_OK`.
//! - After a non-OK status, `bsf_last_error_message` returns a description
//!   valid on the calling thread until the next failing call.
//! - Strings returned through `char**` out-parameters are owned by the
//!   caller and must be released with `bsf_string_free`; handles with their
//!   matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use libc::c_char;

use bsf::cli::{
    default_fond_lemma_pairs, master_ode_suite, parse_cov_spec, parse_psi_spec, parse_weight_spec,
    verify_identities_suite,
};
use bsf::rational::rat_to_string_pair;
use bsf::series::{SeriesSpec, TruncatedSeries};
use bsf::trees::{
    alpha_count, enumerate_rooted_shapes, kappa_count, plane_trees, shape_of, symmetry_factor,
    tree_factorial, PlaneTree, TreeLike, DEFAULT_MAX_N,
};
use bsf::wigner::{CovarianceSpec, DiagonalLaw};
use bsf::{Error, Result};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsfStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    Utf8 = 2,
    /// A parameter string could not be parsed.
    Parse = 3,
    /// A size, order, weight index or lag was out of range.
    Range = 4,
    /// A mathematically invalid input (law, path, involution, composition).
    Domain = 5,
    /// An internal invariant failed.
    Internal = 6,
}

/// Which tree family `bsf_tree_count` counts.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsfTreeKind {
    Plane = 0,
    Shapes = 1,
}

/// Opaque handle: a plane rooted tree.
pub struct BsfTree(PlaneTree);

/// Opaque handle: a truncated power series with exact coefficients.
pub struct BsfSeries(TruncatedSeries);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> BsfStatus {
    match err {
        Error::SizeRange { .. }
        | Error::WeightRange { .. }
        | Error::CoefficientRange { .. }
        | Error::CovarianceLag { .. }
        | Error::EmptyOrder => BsfStatus::Range,
        Error::CompositionDomain { .. }
        | Error::NotPositiveSemiDefinite { .. }
        | Error::InvalidLaw(_)
        | Error::InvalidDyckPath(_)
        | Error::InvalidInvolution(_) => BsfStatus::Domain,
        Error::Parse(_) => BsfStatus::Parse,
        Error::Internal(_) | Error::Io(_) => BsfStatus::Internal,
    }
}

fn fail(err: Error) -> BsfStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn fail_null(name: &str) -> BsfStatus {
    set_error(format!("argument {name} must not be null"));
    BsfStatus::NullArgument
}

/// Runs a closure at the FFI boundary; panics become `Internal`.
fn guarded(f: impl FnOnce() -> BsfStatus) -> BsfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic".to_string());
            BsfStatus::Internal
        }
    }
}

/// # Safety
/// `s` must be a valid NUL-terminated string pointer.
unsafe fn required_str<'a>(s: *const c_char, name: &str) -> std::result::Result<&'a str, BsfStatus> {
    if s.is_null() {
        return Err(fail_null(name));
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(format!("argument {name} is not valid UTF-8"));
        BsfStatus::Utf8
    })
}

fn give_string(out: *mut *mut c_char, value: String) {
    let c = CString::new(value.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("").unwrap());
    unsafe { *out = c.into_raw() };
}

fn give_pair(out_num: *mut *mut c_char, out_den: *mut *mut c_char, value: &bsf::rational::Rat) {
    let (num, den) = rat_to_string_pair(value);
    give_string(out_num, num);
    give_string(out_den, den);
}

/// The crate version as a static string; never freed.
#[no_mangle]
pub extern "C" fn bsf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failure on this thread, or null if none occurred.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bsf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(message) => message.as_ptr(),
        None => std::ptr::null(),
    })
}

/// Releases a string returned through a `char**` out-parameter.
///
/// # Safety
/// `s` must be null or a pointer previously returned by this library.
#[no_mangle]
pub unsafe extern "C" fn bsf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a balanced-parentheses encoding like `(()())` into a tree handle.
///
/// # Safety
/// `encoding` must be a valid NUL-terminated string; `out_tree` non-null.
#[no_mangle]
pub unsafe extern "C" fn bsf_tree_parse(
    encoding: *const c_char,
    out_tree: *mut *mut BsfTree,
) -> BsfStatus {
    guarded(|| {
        if out_tree.is_null() {
            return fail_null("out_tree");
        }
        let encoding = match required_str(encoding, "encoding") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match PlaneTree::decode(encoding) {
            Ok(tree) => {
                *out_tree = Box::into_raw(Box::new(BsfTree(tree)));
                BsfStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Releases a tree handle.
///
/// # Safety
/// `tree` must be null or a pointer from `bsf_tree_parse`.
#[no_mangle]
pub unsafe extern "C" fn bsf_tree_free(tree: *mut BsfTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Number of nodes.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bsf_tree_size(tree: *const BsfTree, out_size: *mut usize) -> BsfStatus {
    guarded(|| {
        if tree.is_null() {
            return fail_null("tree");
        }
        if out_size.is_null() {
            return fail_null("out_size");
        }
        *out_size = (*tree).0.size();
        BsfStatus::Ok
    })
}

/// The canonical balanced-parentheses encoding, as a caller-owned string.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bsf_tree_encode(
    tree: *const BsfTree,
    out_encoding: *mut *mut c_char,
) -> BsfStatus {
    guarded(|| {
        if tree.is_null() {
            return fail_null("tree");
        }
        if out_encoding.is_null() {
            return fail_null("out_encoding");
        }
        give_string(out_encoding, (*tree).0.encode());
        BsfStatus::Ok
    })
}

/// The four counting statistics of the tree (of its unordered shape, for
/// the symmetry/labelling/embedding counts), as decimal strings.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bsf_tree_statistics(
    tree: *const BsfTree,
    out_tree_factorial: *mut *mut c_char,
    out_sigma: *mut *mut c_char,
    out_alpha: *mut *mut c_char,
    out_kappa: *mut *mut c_char,
) -> BsfStatus {
    guarded(|| {
        if tree.is_null() {
            return fail_null("tree");
        }
        for (ptr, name) in [
            (out_tree_factorial, "out_tree_factorial"),
            (out_sigma, "out_sigma"),
            (out_alpha, "out_alpha"),
            (out_kappa, "out_kappa"),
        ] {
            if ptr.is_null() {
                return fail_null(name);
            }
        }
        let shape = shape_of(&(*tree).0);
        let alpha = match alpha_count(&shape) {
            Ok(v) => v,
            Err(err) => return fail(err),
        };
        give_string(out_tree_factorial, tree_factorial(&shape).to_string());
        give_string(out_sigma, symmetry_factor(&shape).to_string());
        give_string(out_alpha, alpha.to_string());
        give_string(out_kappa, kappa_count(&shape).to_string());
        BsfStatus::Ok
    })
}

/// The contour walk of the tree as an up-down word like `UUDUDD`.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bsf_tree_to_dyck(
    tree: *const BsfTree,
    out_path: *mut *mut c_char,
) -> BsfStatus {
    guarded(|| {
        if tree.is_null() {
            return fail_null("tree");
        }
        if out_path.is_null() {
            return fail_null("out_path");
        }
        give_string(
            out_path,
            bsf::bijections::plane_tree_to_dyck(&(*tree).0).to_updown(),
        );
        BsfStatus::Ok
    })
}

/// Counts trees with `n` nodes (plane trees or rooted unordered shapes).
///
/// # Safety
/// `out_count` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bsf_tree_count(
    n: usize,
    kind: BsfTreeKind,
    out_count: *mut u64,
) -> BsfStatus {
    guarded(|| {
        if out_count.is_null() {
            return fail_null("out_count");
        }
        let count = match kind {
            BsfTreeKind::Plane => plane_trees(n, DEFAULT_MAX_N).map(|it| it.count()),
            BsfTreeKind::Shapes => enumerate_rooted_shapes(n, DEFAULT_MAX_N).map(|v| v.len()),
        };
        match count {
            Ok(c) => {
                *out_count = c as u64;
                BsfStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Builds the weighted-tree-sum series for a weight family and degree
/// function given in the same spec grammar as the command line
/// (`ones`, `master:C0,C1,...`, `inverse-power:L`, `geometric:RHO`,
/// `explicit:B1,...` and `geometric`, `exponential`, `poly:C0,...`).
///
/// # Safety
/// String arguments must be valid NUL-terminated strings; `out_series`
/// non-null.
#[no_mangle]
pub unsafe extern "C" fn bsf_generating_series(
    weights: *const c_char,
    psi: *const c_char,
    order: usize,
    out_series: *mut *mut BsfSeries,
) -> BsfStatus {
    guarded(|| {
        if out_series.is_null() {
            return fail_null("out_series");
        }
        let weights = match required_str(weights, "weights") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let psi = match required_str(psi, "psi") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let build = || -> Result<TruncatedSeries> {
            let weights = parse_weight_spec(weights, order)?;
            let psi = parse_psi_spec(psi)?;
            bsf::bare::generating_coefficients(&weights, &psi, order)
        };
        match build() {
            Ok(series) => {
                *out_series = Box::into_raw(Box::new(BsfSeries(series)));
                BsfStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Releases a series handle.
///
/// # Safety
/// `series` must be null or a pointer from `bsf_generating_series`.
#[no_mangle]
pub unsafe extern "C" fn bsf_series_free(series: *mut BsfSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Truncation order of the series.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bsf_series_order(
    series: *const BsfSeries,
    out_order: *mut usize,
) -> BsfStatus {
    guarded(|| {
        if series.is_null() {
            return fail_null("series");
        }
        if out_order.is_null() {
            return fail_null("out_order");
        }
        *out_order = (*series).0.order();
        BsfStatus::Ok
    })
}

/// Coefficient of z^n as exact decimal numerator/denominator strings.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bsf_series_coefficient(
    series: *const BsfSeries,
    n: usize,
    out_numerator: *mut *mut c_char,
    out_denominator: *mut *mut c_char,
) -> BsfStatus {
    guarded(|| {
        if series.is_null() {
            return fail_null("series");
        }
        if out_numerator.is_null() {
            return fail_null("out_numerator");
        }
        if out_denominator.is_null() {
            return fail_null("out_denominator");
        }
        match (*series).0.coeff(n) {
            Ok(value) => {
                give_pair(out_numerator, out_denominator, value);
                BsfStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// The n-th triangular-operator moment n^n/(n+1)! as exact decimal strings.
///
/// # Safety
/// Out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bsf_dh_moment(
    n: usize,
    out_numerator: *mut *mut c_char,
    out_denominator: *mut *mut c_char,
) -> BsfStatus {
    guarded(|| {
        if out_numerator.is_null() {
            return fail_null("out_numerator");
        }
        if out_denominator.is_null() {
            return fail_null("out_denominator");
        }
        match bsf::triangular::dh_moment(n, DEFAULT_MAX_N) {
            Ok(value) => {
                give_pair(out_numerator, out_denominator, &value);
                BsfStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Exact limit of the normalized word trace of half-length k under the
/// given covariance (same spec grammar as the command line) and the point
/// mass at 1 on the diagonal.
///
/// # Safety
/// String and out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bsf_limit_trace(
    k: usize,
    cov: *const c_char,
    beta2: *const c_char,
    out_numerator: *mut *mut c_char,
    out_denominator: *mut *mut c_char,
) -> BsfStatus {
    guarded(|| {
        if out_numerator.is_null() {
            return fail_null("out_numerator");
        }
        if out_denominator.is_null() {
            return fail_null("out_denominator");
        }
        let cov = match required_str(cov, "cov") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let beta2 = match required_str(beta2, "beta2") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let run = || -> Result<bsf::rational::Rat> {
            let cov = parse_cov_spec(cov, beta2)?;
            bsf::wigner::limit_trace_combinatorial(k, &cov, &DiagonalLaw::delta_one(), DEFAULT_MAX_N)
        };
        match run() {
            Ok(value) => {
                give_pair(out_numerator, out_denominator, &value);
                BsfStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

fn run_suite(suite: &str, max_n: usize, order: usize) -> Result<(bool, String)> {
    let reports = match suite {
        "identities" => verify_identities_suite(max_n, DEFAULT_MAX_N)?,
        "master-ode" => master_ode_suite(order, None)?,
        "inversion" => {
            let mut reports = Vec::new();
            for l in 0..=2 {
                for psi in [SeriesSpec::Geometric, SeriesSpec::Exponential] {
                    reports.push(bsf::bare::verify_inverse_factorial_ode(l, &psi, order)?);
                }
            }
            reports
        }
        "special-bare" => {
            let cov = CovarianceSpec::inverse_linear(bsf::rational::rat_int(2))?;
            vec![bsf::bijections::verify_special_bare(max_n, &cov, DEFAULT_MAX_N)?]
        }
        "fond-lemma" => default_fond_lemma_pairs()?
            .iter()
            .map(|(cov, law)| bsf::wigner::verify_fond_lemma(cov, law, order, DEFAULT_MAX_N))
            .collect::<Result<Vec<_>>>()?,
        "dk8" => vec![
            bsf::triangular::verify_dk8_closed_form(max_n, DEFAULT_MAX_N)?,
            bsf::triangular::verify_dk8_inversion(order, DEFAULT_MAX_N)?,
        ],
        other => return Err(Error::Parse(format!("unknown suite {other:?}"))),
    };
    let all_exact = reports.iter().all(|r| r.is_exact());
    let json = serde_json_string(&reports)?;
    Ok((all_exact, json))
}

fn serde_json_string(reports: &[bsf::report::VerificationReport]) -> Result<String> {
    serde_json::to_string(reports).map_err(|e| Error::Internal(e.to_string()))
}

/// Runs a named verification suite (`identities`, `master-ode`,
/// `inversion`, `special-bare`, `fond-lemma`, `dk8`) with the given tree
/// range and series order (each suite reads the parameter it needs).
/// Writes whether every statement was exact, and optionally the full JSON
/// report array into `out_json` (pass null to skip it).
///
/// # Safety
/// `suite` must be a valid NUL-terminated string and `out_all_exact`
/// non-null; `out_json` may be null.
#[no_mangle]
pub unsafe extern "C" fn bsf_verify_suite(
    suite: *const c_char,
    max_n: usize,
    order: usize,
    out_all_exact: *mut bool,
    out_json: *mut *mut c_char,
) -> BsfStatus {
    guarded(|| {
        if out_all_exact.is_null() {
            return fail_null("out_all_exact");
        }
        let suite = match required_str(suite, "suite") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match run_suite(suite, max_n, order) {
            Ok((all_exact, json)) => {
                *out_all_exact = all_exact;
                if !out_json.is_null() {
                    give_string(out_json, json);
                }
                BsfStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}
