//! C ABI over `tuplenorm`.
//!
//! Instances live behind an opaque `TnInstance` handle. Every fallible call
//! returns a `TnStatus`; on failure `tn_last_error` describes the cause for
//! the calling thread. Strings returned through `char **` are owned by the
//! library and released with `tn_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tuplenorm::approx::{bj_orthogonal, distance_to_diagonal_subspace};
use tuplenorm::derivatives::{rho_operator, smoothness_of_operator};
use tuplenorm::io::{instance_to_json, parse_instance};
use tuplenorm::normcalc::tuple_norm;
use tuplenorm::report;
use tuplenorm::theorems::{golden_counterexample, Instance};
use tuplenorm::{Config, Error};

/// Opaque instance: a tuple `𝒯` and a direction `𝒮` of the same shape.
pub struct TnInstance(Instance);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Degenerate = 5,
    HypothesisNotSatisfied = 6,
    NoCertificate = 7,
    Panic = 8,
}

/// Numerical settings. Zero fields fall back to the defaults.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct TnOptions {
    pub seed: u64,
    pub starts: usize,
    /// Orthogonality tolerance.
    pub tol: f64,
}

/// Values for the `command` argument of `tn_report_json`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TnCommand {
    Norm = 0,
    Dist = 1,
    Bj = 2,
    Rho = 3,
    Smooth = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TnStatus {
    match e {
        Error::Parse(_) => TnStatus::Parse,
        Error::ZeroVector | Error::ZeroOperator | Error::NotUnitVector(_) => TnStatus::Degenerate,
        Error::HypothesisNotSatisfied { .. } => TnStatus::HypothesisNotSatisfied,
        Error::CertificateNotFound { .. } => TnStatus::NoCertificate,
        _ => TnStatus::InvalidArgument,
    }
}

struct Fail(TnStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TnStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TnStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(TnStatus::NullPointer, format!("{what} is null"))
}

unsafe fn instance<'a>(p: *const TnInstance) -> Result<&'a Instance, Fail> {
    p.as_ref().map(|i| &i.0).ok_or_else(|| null("instance"))
}

unsafe fn config(opts: *const TnOptions) -> Config {
    let mut cfg = Config::default();
    if let Some(o) = opts.as_ref() {
        if o.seed != 0 {
            cfg.seed = o.seed;
        }
        if o.starts != 0 {
            cfg.starts = o.starts;
        }
        if o.tol > 0.0 {
            cfg.tau_bj = o.tol;
        }
    }
    cfg
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(TnStatus::InvalidUtf8, "interior NUL in output".into()))?;
    write(out, c.into_raw())
}

fn direction(inst: &Instance) -> Result<(), Fail> {
    if inst.s.is_zero() {
        return Err(Fail(TnStatus::InvalidArgument, "the direction S is zero".into()));
    }
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn tn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parse an instance document (UTF-8 JSON).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_instance_from_json(json: *const c_char, out: *mut *mut TnInstance) -> TnStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Fail(TnStatus::InvalidUtf8, e.to_string()))?;
        let inst = parse_instance(text)?;
        write(out, Box::into_raw(Box::new(TnInstance(inst))))
    })
}

/// The two-component ℓ_2 example whose components share no maximizer.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_instance_golden(out: *mut *mut TnInstance) -> TnStatus {
    guard(|| write(out, Box::into_raw(Box::new(TnInstance(golden_counterexample())))))
}

/// # Safety
/// `inst` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn tn_instance_free(inst: *mut TnInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of components and domain dimension.
///
/// # Safety
/// `inst` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_instance_shape(inst: *const TnInstance, d: *mut usize, dim: *mut usize) -> TnStatus {
    guard(|| {
        let i = instance(inst)?;
        write(d, i.t.d())?;
        write(dim, i.t.domain().dim)
    })
}

/// Serialize an instance back to its JSON document.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_instance_to_json(inst: *const TnInstance, out: *mut *mut c_char) -> TnStatus {
    guard(|| {
        let i = instance(inst)?;
        write_string(out, instance_to_json(i).to_string())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn tn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Joint norm `‖𝒯‖`.
///
/// # Safety
/// `inst` must be a live handle; `opts` may be NULL; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_norm(inst: *const TnInstance, opts: *const TnOptions, value: *mut f64) -> TnStatus {
    guard(|| {
        let i = instance(inst)?;
        write(value, tuple_norm(&i.t, &config(opts)).value)
    })
}

/// `dist(𝒯, 𝔽^d𝒮)`.
///
/// # Safety
/// As for `tn_norm`.
#[no_mangle]
pub unsafe extern "C" fn tn_dist(inst: *const TnInstance, opts: *const TnOptions, value: *mut f64) -> TnStatus {
    guard(|| {
        let i = instance(inst)?;
        direction(i)?;
        write(value, distance_to_diagonal_subspace(&i.t, &i.s, &config(opts))?.value)
    })
}

/// Birkhoff-James orthogonality `𝒯 ⊥_B 𝔽^d𝒮`. `margin` is `dist − ‖𝒯‖`;
/// `certified` is 1 when an independently verified certificate was found.
///
/// # Safety
/// As for `tn_norm`; `margin` and `certified` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn tn_bj(
    inst: *const TnInstance,
    opts: *const TnOptions,
    orthogonal: *mut c_int,
    margin: *mut f64,
    certified: *mut c_int,
) -> TnStatus {
    guard(|| {
        let i = instance(inst)?;
        direction(i)?;
        let cfg = config(opts);
        let d = bj_orthogonal(&i.t, &i.s, &cfg)?;
        write(orthogonal, c_int::from(d.orthogonal))?;
        if !margin.is_null() {
            margin.write(d.margin);
        }
        if !certified.is_null() {
            let ok = d.certificate.as_ref().is_some_and(|c| c.verify(&i.t, &i.s, &cfg).valid);
            certified.write(c_int::from(ok));
        }
        Ok(())
    })
}

/// One-sided derivatives `ρ−(𝒯, 𝒮) ≤ ρ+(𝒯, 𝒮)` by difference quotients.
///
/// # Safety
/// As for `tn_norm`.
#[no_mangle]
pub unsafe extern "C" fn tn_rho(
    inst: *const TnInstance,
    opts: *const TnOptions,
    rho_minus: *mut f64,
    rho_plus: *mut f64,
) -> TnStatus {
    guard(|| {
        let i = instance(inst)?;
        direction(i)?;
        let g = rho_operator(&i.t, &i.s, &config(opts))?;
        write(rho_minus, g.rho_minus)?;
        write(rho_plus, g.rho_plus)
    })
}

/// Whether `𝒯` is smooth: one attainment orbit with a smooth image.
///
/// # Safety
/// As for `tn_norm`.
#[no_mangle]
pub unsafe extern "C" fn tn_smooth(inst: *const TnInstance, opts: *const TnOptions, smooth: *mut c_int) -> TnStatus {
    guard(|| {
        let i = instance(inst)?;
        write(smooth, c_int::from(smoothness_of_operator(&i.t, &config(opts))?.smooth))
    })
}

/// JSON report for one `TnCommand`, as printed by the CLI with `--json`.
///
/// # Safety
/// As for `tn_norm`; free the result with `tn_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tn_report_json(
    inst: *const TnInstance,
    command: c_int,
    opts: *const TnOptions,
    out: *mut *mut c_char,
) -> TnStatus {
    guard(|| {
        let i = instance(inst)?;
        let command = match command {
            0 => TnCommand::Norm,
            1 => TnCommand::Dist,
            2 => TnCommand::Bj,
            3 => TnCommand::Rho,
            4 => TnCommand::Smooth,
            c => return Err(Fail(TnStatus::InvalidArgument, format!("unknown command {c}"))),
        };
        let cfg = config(opts);
        let field = i.t.field();
        let v = match command {
            TnCommand::Norm => report::norm_json(&tuple_norm(&i.t, &cfg)),
            TnCommand::Dist => {
                direction(i)?;
                report::distance_json(&distance_to_diagonal_subspace(&i.t, &i.s, &cfg)?, field)
            }
            TnCommand::Bj => {
                direction(i)?;
                let d = bj_orthogonal(&i.t, &i.s, &cfg)?;
                let check = d.certificate.as_ref().map(|c| c.verify(&i.t, &i.s, &cfg));
                report::bj_json(&d, check.as_ref(), field)
            }
            TnCommand::Rho => {
                direction(i)?;
                report::gateaux_json(&rho_operator(&i.t, &i.s, &cfg)?)
            }
            TnCommand::Smooth => report::smoothness_json(&smoothness_of_operator(&i.t, &cfg)?),
        };
        write_string(out, serde_json::to_string(&v).unwrap_or_default())
    })
}
