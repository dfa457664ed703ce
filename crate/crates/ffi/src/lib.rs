//! C ABI for gstrand-core.
//!
//! Every fallible function returns a [`GsStatus`]; on failure a message is
//! kept per thread and read back with [`gs_last_error_message`]. Handles are
//! opaque and released with their `_free` function. Array arguments are
//! caller-owned and must hold at least the stated number of doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gstrand_core::algebra::{build_algebra, validate_algebra, AlgebraId, AlgebraTable};
use gstrand_core::run::Simulation;
use gstrand_core::stability::{dispersion_roots_sl2r, dispersion_roots_so3, DispersionResult};
use gstrand_core::Error;

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownAlgebra = 3,
    DimensionMismatch = 4,
    Config = 5,
    BlowUp = 6,
    Unsupported = 7,
    Io = 8,
    Panic = 9,
}

/// Opaque Lie algebra table.
pub struct GsAlgebra {
    table: AlgebraTable,
}

/// Opaque simulation handle.
pub struct GsSimulation {
    sim: Simulation,
}

/// Diagnostics of the current simulation state. Quantities that do not
/// apply to the model are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GsDiagnostics {
    pub t: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub energy: f64,
    pub mu_par_err: f64,
}

/// Roots and classification of a dispersion relation at one wavenumber.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GsDispersion {
    pub k: f64,
    pub roots_re: [f64; 6],
    pub roots_im: [f64; 6],
    pub max_growth: f64,
    pub stable: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> GsStatus {
    match err {
        Error::UnknownAlgebra { .. } => GsStatus::UnknownAlgebra,
        Error::AlgebraMismatch { .. } | Error::DimensionMismatch { .. } => GsStatus::DimensionMismatch,
        Error::Config { .. } => GsStatus::Config,
        Error::BlowUp { .. } => GsStatus::BlowUp,
        Error::Unsupported(_) | Error::NoRootData { .. } => GsStatus::Unsupported,
        Error::Io(_) => GsStatus::Io,
        _ => GsStatus::InvalidArgument,
    }
}

fn fail(status: GsStatus, msg: impl Into<String>) -> GsStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> Result<(), GsStatus>) -> GsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(GsStatus::Panic, "internal panic"),
    }
}

fn core_err(e: Error) -> GsStatus {
    fail(status_of(&e), e.to_string())
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), GsStatus> {
    if p.is_null() {
        Err(fail(GsStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, GsStatus> {
    non_null(p, what)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(GsStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

/// Message of the last failure on this thread, or null if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Build the catalog algebra named by `tag` (so3, sl2r, so4, se3, g2r).
///
/// # Safety
/// `tag` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_algebra_new(tag: *const c_char, out: *mut *mut GsAlgebra) -> GsStatus {
    guard(|| {
        non_null(out, "out")?;
        let id: AlgebraId = read_str(tag, "tag")?.parse().map_err(core_err)?;
        *out = Box::into_raw(Box::new(GsAlgebra { table: build_algebra(id) }));
        Ok(())
    })
}

/// # Safety
/// `alg` must come from [`gs_algebra_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gs_algebra_free(alg: *mut GsAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Dimension of the algebra, 0 for a null handle.
///
/// # Safety
/// `alg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gs_algebra_dim(alg: *const GsAlgebra) -> usize {
    alg.as_ref().map_or(0, |a| a.table.dim)
}

/// Run the exact structural checks; `passed` receives the verdict.
///
/// # Safety
/// `alg` must be a live handle and `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_algebra_validate(alg: *const GsAlgebra, passed: *mut bool) -> GsStatus {
    guard(|| {
        non_null(alg, "algebra")?;
        non_null(passed, "passed")?;
        let report = validate_algebra(&(*alg).table);
        if !report.passed() {
            set_error(report.to_string());
        }
        *passed = report.passed();
        Ok(())
    })
}

unsafe fn coeffs<'a>(alg: &GsAlgebra, p: *const f64, len: usize, what: &str) -> Result<&'a [f64], GsStatus> {
    non_null(p, what)?;
    if len != alg.table.dim {
        return Err(fail(
            GsStatus::DimensionMismatch,
            format!("{what} has {len} coefficients, algebra has dimension {}", alg.table.dim),
        ));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// `out = [x, y]`; all three arrays hold `len` = dim coefficients.
///
/// # Safety
/// Pointers must be valid for `len` doubles; `out` may not alias `x` or `y`.
#[no_mangle]
pub unsafe extern "C" fn gs_algebra_bracket(
    alg: *const GsAlgebra,
    x: *const f64,
    y: *const f64,
    out: *mut f64,
    len: usize,
) -> GsStatus {
    guard(|| {
        non_null(alg, "algebra")?;
        let alg = &*alg;
        let x = coeffs(alg, x, len, "x")?;
        let y = coeffs(alg, y, len, "y")?;
        non_null(out, "out")?;
        let z = alg.table.bracket_slice(x, y);
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&z);
        Ok(())
    })
}

/// Invariant pairing `<x, y>`.
///
/// # Safety
/// `x` and `y` must be valid for `len` doubles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_algebra_pairing(
    alg: *const GsAlgebra,
    x: *const f64,
    y: *const f64,
    len: usize,
    out: *mut f64,
) -> GsStatus {
    guard(|| {
        non_null(alg, "algebra")?;
        let alg = &*alg;
        let x = coeffs(alg, x, len, "x")?;
        let y = coeffs(alg, y, len, "y")?;
        non_null(out, "out")?;
        *out = alg.table.pairing_slice(x, y);
        Ok(())
    })
}

fn to_ffi(d: &DispersionResult) -> GsDispersion {
    GsDispersion {
        k: d.k,
        roots_re: d.omega_roots.map(|z| z.re),
        roots_im: d.omega_roots.map(|z| z.im),
        max_growth: d.max_growth,
        stable: d.stable,
    }
}

fn finite(vals: &[f64]) -> Result<(), GsStatus> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(fail(GsStatus::InvalidArgument, "arguments must be finite"))
    }
}

/// Dispersion roots of the so(3) equilibrium `(m A, n A)` at wavenumber `k`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_dispersion_so3(
    m: f64,
    n: f64,
    a: f64,
    r: f64,
    k: f64,
    out: *mut GsDispersion,
) -> GsStatus {
    guard(|| {
        non_null(out, "out")?;
        finite(&[m, n, a, r, k])?;
        *out = to_ffi(&dispersion_roots_so3(m, n, a, r, k));
        Ok(())
    })
}

/// Dispersion roots of the sl(2,R) equilibrium at the origin.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_dispersion_sl2r(a: f64, r: f64, k: f64, out: *mut GsDispersion) -> GsStatus {
    guard(|| {
        non_null(out, "out")?;
        finite(&[a, r, k])?;
        *out = to_ffi(&dispersion_roots_sl2r(a, r, k));
        Ok(())
    })
}

/// Create a simulation from configuration text (the CLI config format).
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_simulation_new(config: *const c_char, out: *mut *mut GsSimulation) -> GsStatus {
    guard(|| {
        non_null(out, "out")?;
        let sim = Simulation::from_text(read_str(config, "config")?).map_err(core_err)?;
        *out = Box::into_raw(Box::new(GsSimulation { sim }));
        Ok(())
    })
}

/// # Safety
/// `sim` must come from [`gs_simulation_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gs_simulation_free(sim: *mut GsSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Grid points, algebra dimension, total steps and step size.
///
/// # Safety
/// `sim` must be a live handle; output pointers may be null to skip them.
#[no_mangle]
pub unsafe extern "C" fn gs_simulation_shape(
    sim: *const GsSimulation,
    points: *mut usize,
    dim: *mut usize,
    total_steps: *mut usize,
    dt: *mut f64,
) -> GsStatus {
    guard(|| {
        non_null(sim, "simulation")?;
        let s = &(*sim).sim;
        if let Some(p) = points.as_mut() {
            *p = s.state().n;
        }
        if let Some(p) = dim.as_mut() {
            *p = s.state().dim;
        }
        if let Some(p) = total_steps.as_mut() {
            *p = s.total_steps();
        }
        if let Some(p) = dt.as_mut() {
            *p = s.dt();
        }
        Ok(())
    })
}

/// Advance up to `count` RK4 steps; `taken` receives the number done
/// (fewer at the end of the run). On blow-up the state stays at the last
/// finite step.
///
/// # Safety
/// `sim` must be a live handle; `taken` may be null.
#[no_mangle]
pub unsafe extern "C" fn gs_simulation_step(sim: *mut GsSimulation, count: usize, taken: *mut usize) -> GsStatus {
    guard(|| {
        non_null(sim, "simulation")?;
        let n = (*sim).sim.advance(count).map_err(core_err)?;
        if let Some(p) = taken.as_mut() {
            *p = n;
        }
        Ok(())
    })
}

/// Copy the current fields, point-major (`points * dim` doubles each).
/// Either destination may be null.
///
/// # Safety
/// Non-null destinations must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gs_simulation_copy_fields(
    sim: *const GsSimulation,
    mu: *mut f64,
    gamma: *mut f64,
    len: usize,
) -> GsStatus {
    guard(|| {
        non_null(sim, "simulation")?;
        let st = (*sim).sim.state();
        if len != st.mu.len() {
            return Err(fail(
                GsStatus::DimensionMismatch,
                format!("buffer holds {len} values, fields need {}", st.mu.len()),
            ));
        }
        if !mu.is_null() {
            std::slice::from_raw_parts_mut(mu, len).copy_from_slice(&st.mu);
        }
        if !gamma.is_null() {
            std::slice::from_raw_parts_mut(gamma, len).copy_from_slice(&st.gamma);
        }
        Ok(())
    })
}

/// Diagnostics of the current state.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_simulation_diagnostics(sim: *const GsSimulation, out: *mut GsDiagnostics) -> GsStatus {
    guard(|| {
        non_null(sim, "simulation")?;
        non_null(out, "out")?;
        let rec = (*sim).sim.record().map_err(core_err)?;
        let c = rec.conserved.unwrap_or([f64::NAN; 3]);
        *out = GsDiagnostics {
            t: rec.t,
            c1: c[0],
            c2: c[1],
            c3: c[2],
            energy: rec.energy.unwrap_or(f64::NAN),
            mu_par_err: rec.mu_par_err.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}
