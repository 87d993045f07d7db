//! C ABI for the junction-resonator calculations.
//!
//! A `KlDevice` is an opaque handle created from the circuit parameters; it
//! eagerly solves the spectrum, normalizes the modes and evaluates the Kerr
//! closed forms. Accessors copy scalars out through pointers and return a
//! `KlStatus`; no Rust type crosses the boundary. All panics are caught.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use kerrline::circuit::CircuitParams;
use kerrline::error::Error;
use kerrline::kerr::{kerr_parameters, KerrResult};
use kerrline::modes::{build_modes, junction_current_variance, ModeSet};
use kerrline::spectrum::solve_spectrum;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlStatus {
    KlOk = 0,
    /// A required pointer argument was null.
    KlNullArgument = 1,
    /// Parameters outside the model's domain.
    KlInvalidArgument = 2,
    /// The spectrum solver or eigensolver failed to converge.
    KlSolverFailure = 3,
    /// The retained mode set fails the truncation gate.
    KlNotConverged = 4,
    /// Mode index past the end of the set.
    KlOutOfRange = 5,
    /// An internal panic was caught; the handle stays valid.
    KlPanic = 6,
}

/// Opaque device handle.
pub struct KlDevice {
    ms: ModeSet,
    residuals: Vec<f64>,
    kerr: Result<KerrResult, Error>,
}

fn status_of(e: &Error) -> KlStatus {
    match e {
        Error::TruncationNotConverged { .. } => KlStatus::KlNotConverged,
        Error::ConvergenceFailure { .. }
        | Error::BranchMiscount { .. }
        | Error::Eigensolver { .. }
        | Error::PoleProximity { .. } => KlStatus::KlSolverFailure,
        Error::SweepPoint { source, .. } => status_of(source),
        _ => KlStatus::KlInvalidArgument,
    }
}

unsafe fn write_out<T>(out: *mut T, value: T) -> KlStatus {
    if out.is_null() {
        return KlStatus::KlNullArgument;
    }
    unsafe { out.write(value) };
    KlStatus::KlOk
}

/// Build a device from the circuit parameters and solve its lowest `n_modes`
/// modes. On success `*out` owns the handle; free it with `kl_device_free`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_device_new(
    l: f64,
    c: f64,
    length: f64,
    c_j: f64,
    i_c: f64,
    c_c: f64,
    n_modes: usize,
    out: *mut *mut KlDevice,
) -> KlStatus {
    if out.is_null() {
        return KlStatus::KlNullArgument;
    }
    let built = catch_unwind(|| -> Result<KlDevice, Error> {
        let p = CircuitParams {
            l,
            c,
            length,
            c_j,
            i_c,
            c_c,
        };
        let spec = solve_spectrum(&p, n_modes)?;
        let ms = build_modes(&p, n_modes)?;
        let kerr = kerr_parameters(&ms);
        Ok(KlDevice {
            ms,
            residuals: spec.residuals,
            kerr,
        })
    });
    match built {
        Ok(Ok(dev)) => {
            unsafe { out.write(Box::into_raw(Box::new(dev))) };
            KlStatus::KlOk
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => KlStatus::KlPanic,
    }
}

/// Release a handle returned by `kl_device_new`. A null pointer is a no-op.
///
/// # Safety
/// `dev` must be null or a pointer returned by `kl_device_new` that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn kl_device_free(dev: *mut KlDevice) {
    if !dev.is_null() {
        drop(unsafe { Box::from_raw(dev) });
    }
}

/// Number of solved modes.
///
/// # Safety
/// `dev` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_mode_count(dev: *const KlDevice, out: *mut usize) -> KlStatus {
    let Some(dev) = (unsafe { dev.as_ref() }) else {
        return KlStatus::KlNullArgument;
    };
    unsafe { write_out(out, dev.ms.modes.len()) }
}

unsafe fn mode_field(
    dev: *const KlDevice,
    index: usize,
    out: *mut f64,
    f: impl Fn(&KlDevice, usize) -> f64,
) -> KlStatus {
    let Some(dev) = (unsafe { dev.as_ref() }) else {
        return KlStatus::KlNullArgument;
    };
    if index >= dev.ms.modes.len() {
        return KlStatus::KlOutOfRange;
    }
    unsafe { write_out(out, f(dev, index)) }
}

/// Eigenfrequency of mode `index` (0-based), rad/s.
///
/// # Safety
/// `dev` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_mode_frequency(
    dev: *const KlDevice,
    index: usize,
    out: *mut f64,
) -> KlStatus {
    unsafe { mode_field(dev, index, out, |d, i| d.ms.modes[i].omega) }
}

/// Relative residual of the spectrum equation at mode `index`.
///
/// # Safety
/// `dev` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_mode_residual(
    dev: *const KlDevice,
    index: usize,
    out: *mut f64,
) -> KlStatus {
    unsafe { mode_field(dev, index, out, |d, i| d.residuals[i]) }
}

/// Zero-point junction phase amplitude of mode `index` (signed).
///
/// # Safety
/// `dev` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_mode_lambda(
    dev: *const KlDevice,
    index: usize,
    out: *mut f64,
) -> KlStatus {
    unsafe { mode_field(dev, index, out, |d, i| d.ms.modes[i].lambda) }
}

/// Effective capacitance of mode `index`, farads.
///
/// # Safety
/// `dev` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_mode_eta(
    dev: *const KlDevice,
    index: usize,
    out: *mut f64,
) -> KlStatus {
    unsafe { mode_field(dev, index, out, |d, i| d.ms.modes[i].eta) }
}

/// Kerr parameters of the fundamental: frequency pull, self-Kerr and product
/// factor, each optional (pass null to skip). Fails with `KlNotConverged` when
/// the retained modes miss too much junction phase weight.
///
/// # Safety
/// `dev` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_kerr(
    dev: *const KlDevice,
    out_shift: *mut f64,
    out_self_kerr: *mut f64,
    out_product_factor: *mut f64,
) -> KlStatus {
    let Some(dev) = (unsafe { dev.as_ref() }) else {
        return KlStatus::KlNullArgument;
    };
    match &dev.kerr {
        Ok(k) => {
            if !out_shift.is_null() {
                unsafe { out_shift.write(k.delta_omega) };
            }
            if !out_self_kerr.is_null() {
                unsafe { out_self_kerr.write(k.self_kerr) };
            }
            if !out_product_factor.is_null() {
                unsafe { out_product_factor.write(k.product_factor) };
            }
            KlStatus::KlOk
        }
        Err(e) => status_of(e),
    }
}

/// RMS junction current with `n_photons` (0..=2) in the fundamental, amps.
///
/// # Safety
/// `dev` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_junction_current_variance(
    dev: *const KlDevice,
    n_photons: usize,
    out: *mut f64,
) -> KlStatus {
    let Some(dev) = (unsafe { dev.as_ref() }) else {
        return KlStatus::KlNullArgument;
    };
    let res = catch_unwind(AssertUnwindSafe(|| junction_current_variance(&dev.ms, n_photons)));
    match res {
        Ok(Ok(v)) => unsafe { write_out(out, v) },
        Ok(Err(e)) => status_of(&e),
        Err(_) => KlStatus::KlPanic,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
