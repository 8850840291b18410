//! C ABI over the `twisted-fourier` library.
//!
//! Systems and elements are opaque heap handles released with their `_free`
//! functions. Every fallible call returns a [`TfStatus`]; on failure the
//! message is kept per thread and read with [`tf_last_error_message`].
//! Strings returned through out-parameters are released with
//! [`tf_string_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use twisted_fourier::cli::config::{ExperimentConfig, SystemConfig};
use twisted_fourier::cli::experiments;
use twisted_fourier::crossed::{alpha_norm, l1_norm, opnorm_bounds, star, twisted_mul};
use twisted_fourier::system::{default_length, validate_system};
use twisted_fourier::{AlgElement, CcElement, Error, TwistedSystem};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    InvalidParameter = 4,
    ShapeMismatch = 5,
    ConditionViolated = 6,
    Internal = 7,
}

/// A twisted system `(A, G, α, σ)`.
pub struct TfSystem {
    inner: TwistedSystem,
}

/// A finitely supported element of the crossed product.
pub struct TfElement {
    inner: CcElement,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

fn status_of(e: &Error) -> TfStatus {
    match e {
        Error::Config(_) | Error::Io(_) | Error::UnknownGenerator { .. } => TfStatus::Config,
        Error::ShapeMismatch(_) => TfStatus::ShapeMismatch,
        Error::ConditionViolated { .. } | Error::NotHermitian(_) => TfStatus::ConditionViolated,
        _ => TfStatus::InvalidParameter,
    }
}

/// Runs `body`, recording any error or panic.
fn guard(body: impl FnOnce() -> Result<(), (TfStatus, String)>) -> TfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            TfStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TfStatus::Internal
        }
    }
}

fn lib<T>(r: twisted_fourier::Result<T>) -> Result<T, (TfStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, (TfStatus, String)> {
    if p.is_null() {
        return Err((TfStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (TfStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn reference<'a, T>(p: *const T, what: &str) -> Result<&'a T, (TfStatus, String)> {
    p.as_ref().ok_or_else(|| (TfStatus::NullPointer, format!("null {what}")))
}

fn same_algebra(sys: &TfSystem, f: &TfElement) -> Result<(), (TfStatus, String)> {
    if f.inner.spec() != &sys.inner.algebra {
        return Err((TfStatus::ShapeMismatch, "element belongs to another algebra".into()));
    }
    Ok(())
}

fn out_ptr<T>(out: *mut *mut T, value: T) -> Result<(), (TfStatus, String)> {
    if out.is_null() {
        return Err((TfStatus::NullPointer, "null out-parameter".into()));
    }
    // SAFETY: checked non-null; the caller provides a writable slot.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn tf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a system from TOML text holding a `[system]` table; other
/// top-level keys are ignored.
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_system_from_config(config: *const c_char, out: *mut *mut TfSystem) -> TfStatus {
    guard(|| {
        let src = text(config)?;
        let table: toml::Table = src.parse().map_err(|e: toml::de::Error| (TfStatus::Config, e.to_string()))?;
        let block = table.get("system").cloned().ok_or((TfStatus::Config, "missing [system] table".into()))?;
        let sc: SystemConfig = block.try_into().map_err(|e: toml::de::Error| (TfStatus::Config, e.to_string()))?;
        out_ptr(out, TfSystem { inner: lib(sc.build())? })
    })
}

/// Builds a named preset system (see `twisted-fourier presets list`) with
/// default parameters.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_system_preset(name: *const c_char, out: *mut *mut TfSystem) -> TfStatus {
    guard(|| {
        let sc = SystemConfig { preset: Some(text(name)?.to_owned()), ..Default::default() };
        out_ptr(out, TfSystem { inner: lib(sc.build())? })
    })
}

/// # Safety
/// `sys` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tf_system_free(sys: *mut TfSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Number of doubles in an interleaved coefficient: `2 Σ d_j²`.
///
/// # Safety
/// `sys` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tf_system_coefficient_len(sys: *const TfSystem) -> usize {
    sys.as_ref().map_or(0, |s| 2 * s.inner.algebra.blocks().iter().map(|d| d * d).sum::<usize>())
}

/// Validates the twisted-action axioms on triples from `ball(radius)`
/// (exhaustive on groups of order at most 64, otherwise at most `cap`
/// seeded triples). `pass` is set to 1 or 0.
///
/// # Safety
/// `sys` must be a live handle; `max_violation` and `pass` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_validate_system(
    sys: *const TfSystem,
    radius: f64,
    cap: usize,
    seed: u64,
    max_violation: *mut f64,
    pass: *mut c_int,
) -> TfStatus {
    guard(|| {
        let sys = &reference(sys, "system")?.inner;
        if max_violation.is_null() || pass.is_null() {
            return Err((TfStatus::NullPointer, "null out-parameter".into()));
        }
        let triples = lib(sys.validation_triples(radius, cap, seed))?;
        let report = validate_system(sys, &triples, &sys.algebra.matrix_units());
        *max_violation = report.max_violation();
        *pass = c_int::from(report.pass);
        Ok(())
    })
}

/// The zero element over the system's algebra.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_element_zero(sys: *const TfSystem, out: *mut *mut TfElement) -> TfStatus {
    guard(|| {
        let sys = &reference(sys, "system")?.inner;
        out_ptr(out, TfElement { inner: CcElement::zero(&sys.algebra) })
    })
}

/// `1 ⊙ δ_e`.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_element_unit(sys: *const TfSystem, out: *mut *mut TfElement) -> TfStatus {
    guard(|| {
        let sys = &reference(sys, "system")?.inner;
        out_ptr(out, TfElement { inner: CcElement::unit(sys) })
    })
}

/// Adds `a ⊙ δ_g` to `f`, with `g` a group word and `a` given by
/// `tf_system_coefficient_len` interleaved doubles.
///
/// # Safety
/// Handles must be live, `word` NUL-terminated, `values` readable for `len`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn tf_element_add_term(
    sys: *const TfSystem,
    f: *mut TfElement,
    word: *const c_char,
    values: *const f64,
    len: usize,
) -> TfStatus {
    guard(|| {
        let s = reference(sys, "system")?;
        let f = f.as_mut().ok_or((TfStatus::NullPointer, "null element".to_string()))?;
        same_algebra(s, f)?;
        if values.is_null() {
            return Err((TfStatus::NullPointer, "null coefficient buffer".into()));
        }
        let g = lib(s.inner.group.parse(text(word)?))?;
        let a = lib(AlgElement::from_interleaved(&s.inner.algebra, std::slice::from_raw_parts(values, len)))?;
        f.inner = lib(f.inner.add(&lib(CcElement::delta(&s.inner.algebra, g, a))?))?;
        Ok(())
    })
}

/// Writes `f(g)` as interleaved doubles into `out[0..len]`.
///
/// # Safety
/// Handles must be live, `word` NUL-terminated, `out` writable for `len`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn tf_element_coefficient(
    sys: *const TfSystem,
    f: *const TfElement,
    word: *const c_char,
    out: *mut f64,
    len: usize,
) -> TfStatus {
    guard(|| {
        let s = reference(sys, "system")?;
        let f = reference(f, "element")?;
        same_algebra(s, f)?;
        if out.is_null() {
            return Err((TfStatus::NullPointer, "null output buffer".into()));
        }
        let g = lib(s.inner.group.parse(text(word)?))?;
        let values = f.inner.coefficient(&g).to_interleaved();
        if values.len() != len {
            return Err((TfStatus::ShapeMismatch, format!("coefficient needs {} doubles, got {len}", values.len())));
        }
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&values);
        Ok(())
    })
}

/// Number of group elements in the support.
///
/// # Safety
/// `f` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tf_element_support_len(f: *const TfElement) -> usize {
    f.as_ref().map_or(0, |f| f.inner.len())
}

/// `out = f₁ ⋆ f₂`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_element_mul(
    sys: *const TfSystem,
    f1: *const TfElement,
    f2: *const TfElement,
    out: *mut *mut TfElement,
) -> TfStatus {
    guard(|| {
        let s = &reference(sys, "system")?.inner;
        let (a, b) = (reference(f1, "element")?, reference(f2, "element")?);
        out_ptr(out, TfElement { inner: lib(twisted_mul(s, &a.inner, &b.inner))? })
    })
}

/// `out = f*`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_element_star(sys: *const TfSystem, f: *const TfElement, out: *mut *mut TfElement) -> TfStatus {
    guard(|| {
        let s = reference(sys, "system")?;
        let f = reference(f, "element")?;
        same_algebra(s, f)?;
        out_ptr(out, TfElement { inner: star(&s.inner, &f.inner) })
    })
}

/// `‖f‖₁` and `‖f‖_α`.
///
/// # Safety
/// Handles must be live; `l1` and `alpha` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_element_norms(
    sys: *const TfSystem,
    f: *const TfElement,
    l1: *mut f64,
    alpha: *mut f64,
) -> TfStatus {
    guard(|| {
        let s = reference(sys, "system")?;
        let f = reference(f, "element")?;
        same_algebra(s, f)?;
        if l1.is_null() || alpha.is_null() {
            return Err((TfStatus::NullPointer, "null out-parameter".into()));
        }
        *l1 = l1_norm(&f.inner);
        *alpha = alpha_norm(&s.inner, &f.inner);
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tf_element_free(f: *mut TfElement) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Certified `lower ≤ ‖Λ(f)‖ ≤ upper` from compressions at the given radii.
///
/// # Safety
/// Handles must be live, `radii` readable for `n` doubles, `lower` and
/// `upper` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_opnorm_bounds(
    sys: *const TfSystem,
    f: *const TfElement,
    radii: *const f64,
    n: usize,
    lower: *mut f64,
    upper: *mut f64,
) -> TfStatus {
    guard(|| {
        let s = reference(sys, "system")?;
        let f = reference(f, "element")?;
        same_algebra(s, f)?;
        if radii.is_null() || lower.is_null() || upper.is_null() {
            return Err((TfStatus::NullPointer, "null pointer argument".into()));
        }
        let schedule = std::slice::from_raw_parts(radii, n);
        let b = lib(opnorm_bounds(&s.inner, &f.inner, schedule, default_length(&s.inner.group)))?;
        *lower = b.lower;
        *upper = b.upper;
        Ok(())
    })
}

/// Runs a full experiment configuration and returns its JSON report. When
/// `override_seed` is nonzero, `seed` replaces the configured seed.
/// `exit_code` receives 0 (all checks pass) or 2 (a check failed).
///
/// # Safety
/// `config` must be NUL-terminated; `json` and `exit_code` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_run_experiment(
    config: *const c_char,
    override_seed: c_int,
    seed: u64,
    json: *mut *mut c_char,
    exit_code: *mut c_int,
) -> TfStatus {
    guard(|| {
        if json.is_null() || exit_code.is_null() {
            return Err((TfStatus::NullPointer, "null out-parameter".into()));
        }
        let cfg = lib(ExperimentConfig::parse(text(config)?))?;
        let out = lib(experiments::run(&cfg, (override_seed != 0).then_some(seed)))?;
        let s = CString::new(out.json).map_err(|_| (TfStatus::Internal, "report contains NUL".to_string()))?;
        *json = s.into_raw();
        *exit_code = out.exit_code;
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
