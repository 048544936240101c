//! C interface to `cloner-lab`.
//!
//! Objects are opaque handles created by `cl_*` constructors and released with
//! the matching `*_free`. Every fallible call returns a `ClStatus`; on failure
//! `cl_last_error_message` describes the error for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cloner_lab::channel::{load_fixture, ChoiMatrix, Fixture};
use cloner_lab::ensemble::{build_R, AncillaSpec, InputEnsemble};
use cloner_lab::error::Error;
use cloner_lab::lab::{self, ChannelCloner};
use cloner_lab::metrics::{metrics_row, BlochPureState, MetricsRow};
use cloner_lab::sdp::SdpSolution;
use cloner_lab::ucqc::Ucqc;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    NotConverged = 4,
    InvalidChoi = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClAncilla {
    PureZero = 0,
    MaximallyMixed = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ClMetricsRow {
    pub f_c: f64,
    pub f_p: f64,
    pub c: f64,
    pub h_clone: f64,
    pub h_out: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ClCertifyReport {
    /// 1 when certified, 0 otherwise.
    pub certified: i32,
    pub achieved: f64,
    pub optimum: f64,
    pub gap: f64,
    pub tp_residual: f64,
    pub min_eigenvalue: f64,
}

pub struct ClEnsemble {
    inner: InputEnsemble,
}

pub struct ClSolution {
    inner: SdpSolution,
}

pub struct ClChoi {
    inner: ChoiMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> ClStatus {
    match err {
        Error::Json(_) | Error::Csv(_) | Error::Io(_) | Error::UnknownFixture(_) => ClStatus::ParseError,
        Error::NotConverged { .. } => ClStatus::NotConverged,
        Error::InvalidChoi(_) => ClStatus::InvalidChoi,
        _ => ClStatus::InvalidArgument,
    }
}

/// Runs `f`, mapping errors and panics to a status and the thread-local message.
fn guard(f: impl FnOnce() -> Result<(), (ClStatus, String)>) -> ClStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ClStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ClStatus::Internal
        }
    }
}

fn lib<T>(r: cloner_lab::error::Result<T>) -> Result<T, (ClStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (ClStatus, String) {
    (ClStatus::NullPointer, "null pointer argument".into())
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, (ClStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|e| (ClStatus::InvalidArgument, format!("invalid UTF-8: {e}")))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), (ClStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (ClStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    let c = CString::new(s).map_err(|e| (ClStatus::Internal, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

fn row(m: MetricsRow) -> ClMetricsRow {
    ClMetricsRow { f_c: m.f_c, f_p: m.f_p, c: m.c, h_clone: m.h_clone, h_out: m.h_out }
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from a `cl_*_to_json` call and not be freed already.
#[no_mangle]
pub unsafe extern "C" fn cl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cl_ensemble_from_json(json: *const c_char, out: *mut *mut ClEnsemble) -> ClStatus {
    guard(|| {
        let text = str_arg(json)?;
        let inner = lib(InputEnsemble::from_json_str(text))?;
        write_out(out, ClEnsemble { inner })
    })
}

/// # Safety
/// `ens` must be NULL or a handle from `cl_ensemble_from_json`.
#[no_mangle]
pub unsafe extern "C" fn cl_ensemble_free(ens: *mut ClEnsemble) {
    if !ens.is_null() {
        drop(Box::from_raw(ens));
    }
}

/// Solves the design program. On non-convergence `*out` still receives the best iterate.
///
/// # Safety
/// `ens` must be a live ensemble handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cl_design(ens: *const ClEnsemble, tol: f64, out: *mut *mut ClSolution) -> ClStatus {
    guard(|| {
        let ens = ens.as_ref().ok_or_else(null)?;
        match lab::design(&ens.inner, tol) {
            Ok(inner) => write_out(out, ClSolution { inner }),
            Err(Error::NotConverged { iterations, gap, best }) => {
                write_out(out, ClSolution { inner: *best })?;
                Err((ClStatus::NotConverged, format!("no convergence after {iterations} iterations, gap {gap:e}")))
            }
            Err(e) => Err((status_of(&e), e.to_string())),
        }
    })
}

/// # Safety
/// `sol` must be a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn cl_solution_f_star(sol: *const ClSolution) -> f64 {
    sol.as_ref().map_or(f64::NAN, |s| s.inner.f_star)
}

/// # Safety
/// `sol` must be a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn cl_solution_gap(sol: *const ClSolution) -> f64 {
    sol.as_ref().map_or(f64::NAN, |s| s.inner.gap)
}

/// # Safety
/// `sol` must be a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn cl_solution_iterations(sol: *const ClSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.inner.iterations())
}

/// Copies the optimal Choi matrix into a new handle.
///
/// # Safety
/// `sol` must be a live solution handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cl_solution_choi(sol: *const ClSolution, out: *mut *mut ClChoi) -> ClStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(null)?;
        write_out(out, ClChoi { inner: sol.inner.x_opt.clone() })
    })
}

/// Solution JSON; release with `cl_string_free`.
///
/// # Safety
/// `sol` must be a live solution handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cl_solution_to_json(sol: *const ClSolution, out: *mut *mut c_char) -> ClStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(null)?;
        write_string(out, lib(sol.inner.to_json_string())?)
    })
}

/// # Safety
/// `sol` must be NULL or a handle from `cl_design`.
#[no_mangle]
pub unsafe extern "C" fn cl_solution_free(sol: *mut ClSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cl_choi_load_fixture(name: *const c_char, out: *mut *mut ClChoi) -> ClStatus {
    guard(|| {
        let inner = lib(load_fixture(str_arg(name)?))?;
        write_out(out, ClChoi { inner })
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cl_choi_from_json(json: *const c_char, out: *mut *mut ClChoi) -> ClStatus {
    guard(|| {
        let inner = lib(ChoiMatrix::from_json_str(str_arg(json)?))?;
        write_out(out, ClChoi { inner })
    })
}

/// # Safety
/// `choi` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cl_choi_to_json(choi: *const ClChoi, out: *mut *mut c_char) -> ClStatus {
    guard(|| {
        let choi = choi.as_ref().ok_or_else(null)?;
        write_string(out, lib(choi.inner.to_json_string())?)
    })
}

/// # Safety
/// `choi` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cl_choi_free(choi: *mut ClChoi) {
    if !choi.is_null() {
        drop(Box::from_raw(choi));
    }
}

/// Metrics of the channel fed with `|ψ(θ, φ)> ⊗ ancilla`.
///
/// # Safety
/// `choi` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cl_choi_metrics(
    choi: *const ClChoi,
    ancilla: ClAncilla,
    theta: f64,
    phi: f64,
    out: *mut ClMetricsRow,
) -> ClStatus {
    guard(|| {
        let choi = choi.as_ref().ok_or_else(null)?;
        let out = out.as_mut().ok_or_else(null)?;
        let anc = match ancilla {
            ClAncilla::PureZero => AncillaSpec::PureZero,
            ClAncilla::MaximallyMixed => AncillaSpec::MaximallyMixed,
        };
        let cloner = lib(ChannelCloner::new(choi.inner.clone(), anc))?;
        *out = row(lib(metrics_row(&cloner, &BlochPureState::new(theta, phi)))?);
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cl_ucqc_metrics(theta: f64, phi: f64, out: *mut ClMetricsRow) -> ClStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null)?;
        *out = row(lib(metrics_row(&Ucqc, &BlochPureState::new(theta, phi)))?);
        Ok(())
    })
}

/// Checks that `choi` is a valid channel and optimal for `ens`. A failed
/// certification is reported through `out->certified`, not the status.
///
/// # Safety
/// `choi` and `ens` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cl_certify(choi: *const ClChoi, ens: *const ClEnsemble, out: *mut ClCertifyReport) -> ClStatus {
    guard(|| {
        let choi = choi.as_ref().ok_or_else(null)?;
        let ens = ens.as_ref().ok_or_else(null)?;
        let out = out.as_mut().ok_or_else(null)?;
        let r = lib(build_R(&ens.inner))?;
        let report = lib(lab::certify(&choi.inner, &r, None))?;
        *out = ClCertifyReport {
            certified: report.certified as i32,
            achieved: report.achieved,
            optimum: report.optimum,
            gap: report.gap,
            tp_residual: report.validation.tp_residual,
            min_eigenvalue: report.validation.min_eigenvalue,
        };
        Ok(())
    })
}

/// Certifies one of the built-in reference channels against its own design target.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cl_certify_fixture(name: *const c_char, out: *mut ClCertifyReport) -> ClStatus {
    guard(|| {
        let fixture: Fixture = lib(str_arg(name)?.parse())?;
        let out = out.as_mut().ok_or_else(null)?;
        let report = lib(lab::certify_fixture(fixture))?;
        *out = ClCertifyReport {
            certified: report.certified as i32,
            achieved: report.achieved,
            optimum: report.optimum,
            gap: report.gap,
            tp_residual: report.validation.tp_residual,
            min_eigenvalue: report.validation.min_eigenvalue,
        };
        Ok(())
    })
}
