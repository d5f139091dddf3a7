//! C ABI over `periodicgp`.
//!
//! Objects are opaque handles created by `pgp_*_new`-style functions and released with the
//! matching `pgp_*_free`. Every fallible call returns a [`PgpStatus`]; on failure
//! [`pgp_last_error_message`] describes the error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use periodicgp::bridge::centered_bridge_coefficients;
use periodicgp::fit::{fit_mle, model_coefficients, ConvergenceStatus};
use periodicgp::regularity::predict_regularity;
use periodicgp::spectral::{coeffs_to_covariogram, covariogram_to_coeffs};
use periodicgp::synthesis::{sample_path, truncation_index};
use periodicgp::{
    Covariogram, DecayTail, Error, GridPath, ParametricModel, SampledCovariogram, SpectralCoefficients, StreamSeed,
};

/// Status codes; the nonzero values match the command-line exit codes where they overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgpStatus {
    Ok = 0,
    InvalidArgument = 2,
    Aliasing = 3,
    InvalidCovariance = 4,
    Degenerate = 5,
    NullPointer = 6,
    Internal = 7,
}

/// Spectral coefficients `c0, c1, …` with an optional power-law tail.
pub struct PgpCoefficients(SpectralCoefficients);

/// Values of one path on the grid `j/n`.
pub struct PgpPath(GridPath);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PgpFitResult {
    pub a_hat: f64,
    pub p_hat: f64,
    pub neg_log_likelihood: f64,
    pub k_used: usize,
    /// Path mean, removed before fitting.
    pub mean: f64,
    pub iterations: usize,
    /// Set when `p_hat` sits on a search bound.
    pub boundary: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PgpRegularity {
    pub q: f64,
    pub m: u32,
    pub alpha: f64,
    pub holder_bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PgpStatus {
    match e.exit_code() {
        3 => PgpStatus::Aliasing,
        4 => PgpStatus::InvalidCovariance,
        5 => PgpStatus::Degenerate,
        _ => PgpStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), PgpStatus> + UnwindSafe) -> PgpStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => PgpStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            PgpStatus::Internal
        }
    }
}

fn lift<T>(r: periodicgp::Result<T>) -> Result<T, PgpStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), PgpStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        Err(PgpStatus::NullPointer)
    } else {
        Ok(())
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], PgpStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(p, name)?;
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message for the last failed call on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn pgp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pgp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Coefficients `c0` and `c[0..len]` = `c_1..c_len`, all finite and nonnegative.
///
/// # Safety
/// `c` must point to `len` doubles (or be null when `len == 0`); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pgp_coefficients_new(
    c0: f64,
    c: *const f64,
    len: usize,
    out: *mut *mut PgpCoefficients,
) -> PgpStatus {
    guard(|| {
        non_null(out, "out")?;
        let c = slice(c, len, "c")?;
        let coeffs = lift(SpectralCoefficients::new(c0, c.to_vec(), None))?;
        emit(out, PgpCoefficients(coeffs));
        Ok(())
    })
}

/// Declares `c_k² = constant·k^{-q}` beyond the explicit entries (`q > 1`).
///
/// # Safety
/// `coeffs` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pgp_coefficients_set_tail(coeffs: *mut PgpCoefficients, q: f64, constant: f64) -> PgpStatus {
    guard(|| {
        non_null(coeffs, "coeffs")?;
        let tail = lift(DecayTail::new(q, constant))?;
        let c = &mut (*coeffs).0;
        *c = c.clone().with_tail(tail);
        Ok(())
    })
}

/// `c0 = 0`, `c_k = a/k^p` for `k ≤ k_max`, with the matching tail.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pgp_coefficients_model(a: f64, p: f64, k_max: usize, out: *mut *mut PgpCoefficients) -> PgpStatus {
    guard(|| {
        non_null(out, "out")?;
        let m = lift(ParametricModel::new(a, p))?;
        emit(out, PgpCoefficients(model_coefficients(&m, k_max)));
        Ok(())
    })
}

/// Coefficients of the centered Brownian bridge: `c0² = 1/12`, `c_k = 1/(2πk)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pgp_coefficients_centered_bridge(out: *mut *mut PgpCoefficients) -> PgpStatus {
    guard(|| {
        non_null(out, "out")?;
        emit(out, PgpCoefficients(centered_bridge_coefficients()));
        Ok(())
    })
}

/// # Safety
/// `coeffs` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pgp_coefficients_free(coeffs: *mut PgpCoefficients) {
    if !coeffs.is_null() {
        drop(Box::from_raw(coeffs));
    }
}

/// Number of explicit harmonics (excluding `c0` and the tail).
///
/// # Safety
/// `coeffs` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pgp_coefficients_len(coeffs: *const PgpCoefficients) -> usize {
    coeffs.as_ref().map_or(0, |c| c.0.explicit_len())
}

/// `c_k` for any `k ≥ 0`, reading the tail past the explicit entries.
///
/// # Safety
/// `coeffs` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pgp_coefficients_get(coeffs: *const PgpCoefficients, k: usize, out: *mut f64) -> PgpStatus {
    guard(|| {
        non_null(coeffs, "coeffs")?;
        non_null(out, "out")?;
        *out = (*coeffs).0.coefficient(k);
        Ok(())
    })
}

/// `√(c0² + 2Σ c_k²)`.
///
/// # Safety
/// `coeffs` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pgp_coefficients_h_norm(coeffs: *const PgpCoefficients, out: *mut f64) -> PgpStatus {
    guard(|| {
        non_null(coeffs, "coeffs")?;
        non_null(out, "out")?;
        *out = (*coeffs).0.h_norm();
        Ok(())
    })
}

/// Smallest `K` omitting at most a fraction `eps` of the variance.
///
/// # Safety
/// `coeffs` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pgp_truncation_index(coeffs: *const PgpCoefficients, eps: f64, out: *mut usize) -> PgpStatus {
    guard(|| {
        non_null(coeffs, "coeffs")?;
        non_null(out, "out")?;
        *out = lift(truncation_index(&(*coeffs).0, eps))?;
        Ok(())
    })
}

/// Writes `C̃(j/n)`, `j < n`, from the explicit coefficients into `values`.
///
/// # Safety
/// `coeffs` must be a live handle and `values` must have room for `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn pgp_coefficients_to_covariogram(
    coeffs: *const PgpCoefficients,
    n: usize,
    values: *mut f64,
) -> PgpStatus {
    guard(|| {
        non_null(coeffs, "coeffs")?;
        non_null(values, "values")?;
        let g = lift(coeffs_to_covariogram(&(*coeffs).0, n))?;
        ptr::copy_nonoverlapping(g.values().as_ptr(), values, n);
        Ok(())
    })
}

/// Extracts `c_0..c_{k_max}` from a covariogram table `C̃(j/n)`.
///
/// # Safety
/// `values` must point to `n` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn pgp_covariogram_to_coefficients(
    values: *const f64,
    n: usize,
    k_max: usize,
    out: *mut *mut PgpCoefficients,
) -> PgpStatus {
    guard(|| {
        non_null(out, "out")?;
        let v = slice(values, n, "values")?;
        let table = lift(SampledCovariogram::new(v.to_vec()))?;
        let ex = lift(covariogram_to_coeffs(&Covariogram::Sampled(table), k_max, n))?;
        emit(out, PgpCoefficients(ex.coefficients));
        Ok(())
    })
}

/// One path of the series truncated at `k_max` on `n` points, from stream `stream` of `seed`.
///
/// # Safety
/// `coeffs` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pgp_sample_path(
    coeffs: *const PgpCoefficients,
    k_max: usize,
    n: usize,
    seed: u64,
    stream: u64,
    out: *mut *mut PgpPath,
) -> PgpStatus {
    guard(|| {
        non_null(coeffs, "coeffs")?;
        non_null(out, "out")?;
        let path = lift(sample_path(&(*coeffs).0, k_max, n, StreamSeed::new(seed, stream)))?;
        emit(out, PgpPath(path));
        Ok(())
    })
}

/// Wraps `n` observed values (power of two) as a path.
///
/// # Safety
/// `values` must point to `n` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn pgp_path_new(values: *const f64, n: usize, out: *mut *mut PgpPath) -> PgpStatus {
    guard(|| {
        non_null(out, "out")?;
        let v = slice(values, n, "values")?;
        emit(out, PgpPath(lift(GridPath::new(v.to_vec()))?));
        Ok(())
    })
}

/// # Safety
/// `path` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pgp_path_len(path: *const PgpPath) -> usize {
    path.as_ref().map_or(0, |p| p.0.n())
}

/// Borrowed pointer to the path values, valid until the path is freed.
///
/// # Safety
/// `path` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pgp_path_values(path: *const PgpPath) -> *const f64 {
    path.as_ref().map_or(ptr::null(), |p| p.0.values().as_ptr())
}

/// # Safety
/// `path` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pgp_path_free(path: *mut PgpPath) {
    if !path.is_null() {
        drop(Box::from_raw(path));
    }
}

/// Maximum-likelihood fit of `c_k = a/k^p` using `k_max` harmonics and `p ∈ [p_min, p_max]`.
///
/// # Safety
/// `path` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pgp_fit_mle(
    path: *const PgpPath,
    k_max: usize,
    p_min: f64,
    p_max: f64,
    out: *mut PgpFitResult,
) -> PgpStatus {
    guard(|| {
        non_null(path, "path")?;
        non_null(out, "out")?;
        let r = lift(fit_mle(&(*path).0, k_max, (p_min, p_max)))?;
        *out = PgpFitResult {
            a_hat: r.a_hat,
            p_hat: r.p_hat,
            neg_log_likelihood: r.neg_log_likelihood,
            k_used: r.k_used,
            mean: r.mean,
            iterations: r.convergence.iterations,
            boundary: r.convergence.status == ConvergenceStatus::Boundary,
        };
        Ok(())
    })
}

/// Guaranteed smoothness for `c_k² = O(k^{-q})`, `q > 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pgp_predict_regularity(q: f64, out: *mut PgpRegularity) -> PgpStatus {
    guard(|| {
        non_null(out, "out")?;
        let r = lift(predict_regularity(q))?;
        *out = PgpRegularity { q: r.q, m: r.m, alpha: r.diagnostics.alpha, holder_bound: r.holder_bound };
        Ok(())
    })
}
