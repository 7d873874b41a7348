//! C interface to `pencil_lab`.
//!
//! Pencils, posH pencils and matrix polynomials live behind opaque handles.
//! Each `pl_*_new` or `pl_*_from_json` call has a matching `pl_*_free`.
//! Fallible calls return a [`PlStatus`], and [`pl_last_error`] holds the
//! message of the latest failure on the calling thread.
//!
//! Complex matrices cross the boundary as row-major arrays of interleaved
//! `(re, im)` doubles, so an `r×c` matrix takes `2·r·c` values. Output
//! buffers follow the same layout. An infinite eigenvalue is written as
//! `(+inf, 0)`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use pencil_lab::io::{parse_input, to_json_string, Input};
use pencil_lab::localization::{lhp_certificate_with, EejjxStatus, LhpConclusion, LhpOptions};
use pencil_lab::matpoly::{cubic_stability, linearize, polynomial_eigenvalues, CubicConclusion};
use pencil_lab::numrange::{beta_thresholds_scaled, sample_numerical_range, Evidence, Threshold};
use pencil_lab::{
    generalized_eigenvalues, kronecker_structure, validate_posh, ComplexMatrix, Convention, Eigenvalue, Error,
    MatrixPolynomial, Pencil, PoshPencil, RankPolicy,
};

/// Status of a call. Codes 2 to 5 match the exit codes of the `pencil-lab`
/// binary.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlStatus {
    Ok = 0,
    /// Null pointer, bad size or a buffer that is too small.
    InvalidArgument = 1,
    Parse = 2,
    /// The input violates a precondition (not posH, singular, and so on).
    Rejected = 3,
    /// A rank decision fell inside the ambiguity gap.
    Ambiguous = 4,
    Internal = 5,
    /// A panic was caught at the boundary.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlConvention {
    /// `λL + C`.
    Plus = 0,
    /// `λE − A`.
    Minus = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlEvidence {
    Exact = 0,
    Sampled = 1,
    Heuristic = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlLhpConclusion {
    None = 0,
    NumrangeInLhp = 1,
    EigenvaluesInLhp = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlCubicConclusion {
    LhpCertified = 0,
    RegionExcludedOnly = 1,
    Inconclusive = 2,
}

/// Counts read off the Kronecker structure.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PlKcfSummary {
    pub rows: usize,
    pub cols: usize,
    pub regular: bool,
    pub index: usize,
    pub right_minimal_indices: usize,
    pub left_minimal_indices: usize,
    pub infinite_blocks: usize,
    /// Finite eigenvalues counted with algebraic multiplicity.
    pub finite_eigenvalues: usize,
}

/// Pacman thresholds. `+inf` means unbounded, NaN means undefined.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PlBeta {
    pub beta_plus: f64,
    pub beta_minus: f64,
    /// `σ_min(tR₁+R₂)/‖J₁‖`, NaN when not available.
    pub lower_bound: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlLhpResult {
    pub conclusion: PlLhpConclusion,
    pub evidence: PlEvidence,
    pub eejjx_proved: bool,
    pub eejjx_falsified: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlCubicResult {
    pub conclusion: PlCubicConclusion,
    pub hypotheses_hold: bool,
    pub pos2_holds: bool,
    /// `+inf` when unbounded, NaN when undefined.
    pub beta_star: f64,
}

/// Opaque pencil handle.
pub struct PlPencil(Pencil);

/// Opaque posH pencil handle.
pub struct PlPosh(PoshPencil);

/// Opaque matrix polynomial handle.
pub struct PlPolynomial(MatrixPolynomial);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

enum Fail {
    Arg(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PlStatus {
    match e.exit_code() {
        2 => PlStatus::Parse,
        4 => PlStatus::Ambiguous,
        5 => PlStatus::Internal,
        _ => PlStatus::Rejected,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PlStatus::Ok,
        Ok(Err(Fail::Arg(msg))) => {
            set_error(&msg);
            PlStatus::InvalidArgument
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            PlStatus::Panic
        }
    }
}

fn arg(msg: &str) -> Fail {
    Fail::Arg(msg.into())
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    // SAFETY: callers pass null or a live handle from this library.
    unsafe { p.as_ref() }.ok_or_else(|| arg(&format!("{name} is null")))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(arg("output pointer is null"));
    }
    // SAFETY: `out` is non-null and points to writable storage.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

unsafe fn read_matrix(data: *const f64, rows: usize, cols: usize, name: &str) -> Result<pencil_lab::matrix::Mat, Fail> {
    let len = rows
        .checked_mul(cols)
        .and_then(|k| k.checked_mul(2))
        .ok_or_else(|| arg("matrix size overflows"))?;
    if len == 0 {
        return Ok(pencil_lab::matrix::Mat::zeros(rows, cols));
    }
    if data.is_null() {
        return Err(arg(&format!("{name} is null")));
    }
    // SAFETY: the caller provides `2·rows·cols` readable doubles.
    let raw = unsafe { std::slice::from_raw_parts(data, len) };
    let entries: Vec<_> = raw.chunks_exact(2).map(|p| pencil_lab::C64::new(p[0], p[1])).collect();
    Ok(ComplexMatrix::from_row_major(rows, cols, &entries)?.into_inner())
}

unsafe fn read_text<'a>(text: *const c_char) -> Result<&'a str, Fail> {
    if text.is_null() {
        return Err(arg("text is null"));
    }
    // SAFETY: the caller passes a NUL-terminated string.
    unsafe { CStr::from_ptr(text) }
        .to_str()
        .map_err(|_| Fail::Lib(Error::Parse("input is not valid UTF-8".into())))
}

/// Writes complex values as `(re, im)` pairs. `count` always receives the
/// number of values; a short buffer is an error.
unsafe fn write_points(values: &[(f64, f64)], buf: *mut f64, capacity: usize, count: *mut usize) -> Result<(), Fail> {
    if count.is_null() {
        return Err(arg("count is null"));
    }
    // SAFETY: `count` is non-null.
    unsafe { *count = values.len() };
    if values.is_empty() {
        return Ok(());
    }
    if capacity < values.len() {
        return Err(arg(&format!("buffer holds {capacity} values, {} needed", values.len())));
    }
    if buf.is_null() {
        return Err(arg("buffer is null"));
    }
    // SAFETY: the caller provides `2·capacity` writable doubles.
    let out = unsafe { std::slice::from_raw_parts_mut(buf, 2 * values.len()) };
    for (slot, &(re, im)) in out.chunks_exact_mut(2).zip(values) {
        slot[0] = re;
        slot[1] = im;
    }
    Ok(())
}

fn eigen_pairs(ev: &[Eigenvalue]) -> Vec<(f64, f64)> {
    ev.iter()
        .map(|e| match e {
            Eigenvalue::Finite(z) => (z.re, z.im),
            Eigenvalue::Infinite => (f64::INFINITY, 0.0),
        })
        .collect()
}

fn threshold_value(t: Threshold) -> f64 {
    t.value().unwrap_or(f64::NAN)
}

fn policy(rank_tol: f64) -> RankPolicy {
    let mut p = RankPolicy::default();
    if rank_tol > 0.0 {
        p.explicit_tolerance = Some(rank_tol);
    }
    p
}

// ---------------------------------------------------------------------------
// Library information
// ---------------------------------------------------------------------------

/// Version string, statically allocated.
#[no_mangle]
pub extern "C" fn pl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the latest failed call on this thread, or an empty string.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pl_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: `s` came from `CString::into_raw` in this crate.
        drop(unsafe { CString::from_raw(s) });
    }
}

// ---------------------------------------------------------------------------
// Pencils
// ---------------------------------------------------------------------------

/// Builds a `rows×cols` pencil from its two coefficients.
///
/// # Safety
/// `lead` and `constant` must each hold `2·rows·cols` doubles and `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_pencil_new(
    rows: usize,
    cols: usize,
    lead: *const f64,
    constant: *const f64,
    convention: PlConvention,
    out: *mut *mut PlPencil,
) -> PlStatus {
    guard(|| {
        let l = unsafe { read_matrix(lead, rows, cols, "lead") }?;
        let k = unsafe { read_matrix(constant, rows, cols, "constant") }?;
        let conv = match convention {
            PlConvention::Plus => Convention::Plus,
            PlConvention::Minus => Convention::Minus,
        };
        let p = Pencil::new(ComplexMatrix::new(l)?, ComplexMatrix::new(k)?, conv)?;
        unsafe { store(out, PlPencil(p)) }
    })
}

/// Parses a pencil or posH document in the CLI's JSON format.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_pencil_from_json(json: *const c_char, out: *mut *mut PlPencil) -> PlStatus {
    guard(|| {
        let text = unsafe { read_text(json) }?;
        let p = parse_input(text, "<json>")?.pencil()?;
        unsafe { store(out, PlPencil(p)) }
    })
}

/// # Safety
/// `p` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pl_pencil_free(p: *mut PlPencil) {
    if !p.is_null() {
        // SAFETY: `p` came from `Box::into_raw` in this crate.
        drop(unsafe { Box::from_raw(p) });
    }
}

/// # Safety
/// `p` must be a live handle; `rows` and `cols` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_pencil_dims(p: *const PlPencil, rows: *mut usize, cols: *mut usize) -> PlStatus {
    guard(|| {
        let p = unsafe { handle(p, "pencil") }?;
        if rows.is_null() || cols.is_null() {
            return Err(arg("output pointer is null"));
        }
        unsafe {
            *rows = p.0.rows();
            *cols = p.0.cols();
        }
        Ok(())
    })
}

/// All generalized eigenvalues of a square regular pencil. `count` receives
/// `n` even when `capacity` is too small.
///
/// # Safety
/// `buf` must hold `2·capacity` doubles; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_pencil_eigenvalues(
    p: *const PlPencil,
    buf: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> PlStatus {
    guard(|| {
        let p = unsafe { handle(p, "pencil") }?;
        let ev = generalized_eigenvalues(&p.0)?;
        unsafe { write_points(&eigen_pairs(&ev), buf, capacity, count) }
    })
}

/// Kronecker structure counts. `rank_tol > 0` overrides the default rank
/// tolerance.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_pencil_kcf(p: *const PlPencil, rank_tol: f64, out: *mut PlKcfSummary) -> PlStatus {
    guard(|| {
        let p = unsafe { handle(p, "pencil") }?;
        if out.is_null() {
            return Err(arg("output pointer is null"));
        }
        let ks = kronecker_structure(&p.0.to_minus(), &policy(rank_tol))?;
        let s = PlKcfSummary {
            rows: ks.rows,
            cols: ks.cols,
            regular: ks.regular,
            index: ks.index,
            right_minimal_indices: ks.right_minimal_indices.len(),
            left_minimal_indices: ks.left_minimal_indices.len(),
            infinite_blocks: ks.infinite_block_sizes.len(),
            finite_eigenvalues: ks.finite_count(),
        };
        unsafe { *out = s };
        Ok(())
    })
}

/// Full Kronecker structure as JSON. Release with [`pl_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_pencil_kcf_json(p: *const PlPencil, rank_tol: f64, out: *mut *mut c_char) -> PlStatus {
    guard(|| {
        let p = unsafe { handle(p, "pencil") }?;
        if out.is_null() {
            return Err(arg("output pointer is null"));
        }
        let ks = kronecker_structure(&p.0.to_minus(), &policy(rank_tol))?;
        let text = CString::new(to_json_string(&ks)?).map_err(|_| Fail::Lib(Error::Internal("NUL in JSON".into())))?;
        unsafe { *out = text.into_raw() };
        Ok(())
    })
}

/// Samples the numerical range with `samples` random unit vectors; isotropic
/// draws are discarded, so `count` may be smaller than `samples`.
///
/// # Safety
/// `buf` must hold `2·capacity` doubles; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_pencil_sample_numrange(
    p: *const PlPencil,
    samples: usize,
    seed: u64,
    buf: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> PlStatus {
    guard(|| {
        let p = unsafe { handle(p, "pencil") }?;
        let s = sample_numerical_range(&p.0, samples, seed)?;
        let pts: Vec<_> = s.points.iter().map(|z| (z.re, z.im)).collect();
        unsafe { write_points(&pts, buf, capacity, count) }
    })
}

// ---------------------------------------------------------------------------
// posH pencils
// ---------------------------------------------------------------------------

/// `λ(J₁+R₁) + (J₂+R₂)` from its four `n×n` parts, validated.
///
/// # Safety
/// Each part must hold `2·n·n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_posh_from_parts(
    n: usize,
    j1: *const f64,
    r1: *const f64,
    j2: *const f64,
    r2: *const f64,
    out: *mut *mut PlPosh,
) -> PlStatus {
    guard(|| {
        let m = |d, name| unsafe { read_matrix(d, n, n, name) };
        let pp = PoshPencil::from_parts(m(j1, "j1")?, m(r1, "r1")?, m(j2, "j2")?, m(r2, "r2")?, None)?;
        unsafe { store(out, PlPosh(pp)) }
    })
}

/// Splits and validates a pencil. A negative or NaN `tol` selects the
/// default PSD tolerance.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_posh_from_pencil(p: *const PlPencil, tol: f64, out: *mut *mut PlPosh) -> PlStatus {
    guard(|| {
        let p = unsafe { handle(p, "pencil") }?;
        let tol = (tol >= 0.0).then_some(tol);
        let pp = validate_posh(&p.0, tol)?;
        unsafe { store(out, PlPosh(pp)) }
    })
}

/// # Safety
/// `p` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pl_posh_free(p: *mut PlPosh) {
    if !p.is_null() {
        // SAFETY: `p` came from `Box::into_raw` in this crate.
        drop(unsafe { Box::from_raw(p) });
    }
}

/// The plus-convention pencil of a posH pencil, as a new handle.
///
/// # Safety
/// `pp` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_posh_to_pencil(pp: *const PlPosh, out: *mut *mut PlPencil) -> PlStatus {
    guard(|| {
        let pp = unsafe { handle(pp, "posh") }?;
        unsafe { store(out, PlPencil(pp.0.to_pencil())) }
    })
}

/// Pacman thresholds of `tR₁ + R₂ ± β(iJ₁)`; `t = 1` gives the unscaled ones.
///
/// # Safety
/// `pp` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_posh_beta(pp: *const PlPosh, t: f64, out: *mut PlBeta) -> PlStatus {
    guard(|| {
        let pp = unsafe { handle(pp, "posh") }?;
        if out.is_null() {
            return Err(arg("output pointer is null"));
        }
        let th = beta_thresholds_scaled(&pp.0, t)?;
        unsafe {
            *out = PlBeta {
                beta_plus: threshold_value(th.beta_plus),
                beta_minus: threshold_value(th.beta_minus),
                lower_bound: th.lower_bound.unwrap_or(f64::NAN),
            }
        };
        Ok(())
    })
}

/// Left-half-plane certificate. Zero budgets select the defaults.
///
/// # Safety
/// `pp` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_posh_lhp_certificate(
    pp: *const PlPosh,
    falsify_budget: usize,
    sample_budget: usize,
    seed: u64,
    out: *mut PlLhpResult,
) -> PlStatus {
    guard(|| {
        let pp = unsafe { handle(pp, "posh") }?;
        if out.is_null() {
            return Err(arg("output pointer is null"));
        }
        let d = LhpOptions::default();
        let opts = LhpOptions {
            falsify_budget: if falsify_budget == 0 { d.falsify_budget } else { falsify_budget },
            sample_budget: if sample_budget == 0 { d.sample_budget } else { sample_budget },
            seed,
        };
        let cert = lhp_certificate_with(&pp.0, &opts);
        unsafe {
            *out = PlLhpResult {
                conclusion: match cert.conclusion {
                    LhpConclusion::None => PlLhpConclusion::None,
                    LhpConclusion::NumrangeInLhp => PlLhpConclusion::NumrangeInLhp,
                    LhpConclusion::EigenvaluesInLhp => PlLhpConclusion::EigenvaluesInLhp,
                },
                evidence: match cert.evidence {
                    Evidence::Exact => PlEvidence::Exact,
                    Evidence::Sampled => PlEvidence::Sampled,
                    Evidence::Heuristic => PlEvidence::Heuristic,
                },
                eejjx_proved: cert.eejjx_status.is_proved(),
                eejjx_falsified: matches!(cert.eejjx_status, EejjxStatus::Falsified { .. }),
            }
        };
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Matrix polynomials
// ---------------------------------------------------------------------------

/// `A₀ + A₁λ + … + A_dλ^d` from `degree + 1` consecutive `n×n` matrices.
///
/// # Safety
/// `coefficients` must hold `2·n·n·(degree+1)` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_polynomial_new(
    n: usize,
    degree: usize,
    coefficients: *const f64,
    out: *mut *mut PlPolynomial,
) -> PlStatus {
    guard(|| {
        if coefficients.is_null() && n > 0 {
            return Err(arg("coefficients is null"));
        }
        let step = 2 * n * n;
        let mats = (0..=degree)
            .map(|i| unsafe { read_matrix(coefficients.wrapping_add(i * step), n, n, "coefficient") })
            .collect::<Result<Vec<_>, _>>()?;
        let p = MatrixPolynomial::new(mats)?;
        unsafe { store(out, PlPolynomial(p)) }
    })
}

/// Parses a polynomial document in the CLI's JSON format.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_polynomial_from_json(json: *const c_char, out: *mut *mut PlPolynomial) -> PlStatus {
    guard(|| {
        let text = unsafe { read_text(json) }?;
        let p = match parse_input(text, "<json>")? {
            Input::Polynomial(p) => p,
            other => return Err(Fail::Lib(Error::Precondition(format!("expected a polynomial, got a {}", other.kind())))),
        };
        unsafe { store(out, PlPolynomial(p)) }
    })
}

/// # Safety
/// `p` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pl_polynomial_free(p: *mut PlPolynomial) {
    if !p.is_null() {
        // SAFETY: `p` came from `Box::into_raw` in this crate.
        drop(unsafe { Box::from_raw(p) });
    }
}

/// posH linearization of a PSD polynomial.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_polynomial_linearize(p: *const PlPolynomial, out: *mut *mut PlPosh) -> PlStatus {
    guard(|| {
        let p = unsafe { handle(p, "polynomial") }?;
        unsafe { store(out, PlPosh(linearize(&p.0)?)) }
    })
}

/// Eigenvalues through the linearization.
///
/// # Safety
/// `buf` must hold `2·capacity` doubles; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_polynomial_eigenvalues(
    p: *const PlPolynomial,
    buf: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> PlStatus {
    guard(|| {
        let p = unsafe { handle(p, "polynomial") }?;
        let ev = polynomial_eigenvalues(&p.0)?;
        unsafe { write_points(&eigen_pairs(&ev), buf, capacity, count) }
    })
}

/// Sufficient stability conditions for a cubic.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_polynomial_cubic_stability(p: *const PlPolynomial, out: *mut PlCubicResult) -> PlStatus {
    guard(|| {
        let p = unsafe { handle(p, "polynomial") }?;
        if out.is_null() {
            return Err(arg("output pointer is null"));
        }
        let rep = cubic_stability(&p.0)?;
        unsafe {
            *out = PlCubicResult {
                conclusion: match rep.conclusion {
                    CubicConclusion::LhpCertified => PlCubicConclusion::LhpCertified,
                    CubicConclusion::RegionExcludedOnly => PlCubicConclusion::RegionExcludedOnly,
                    CubicConclusion::Inconclusive => PlCubicConclusion::Inconclusive,
                },
                hypotheses_hold: rep.hypotheses_hold,
                pos2_holds: rep.pos2_holds,
                beta_star: threshold_value(rep.beta_star),
            }
        };
        Ok(())
    })
}
