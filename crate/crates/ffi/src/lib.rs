//! C ABI over `sbp_momentum`.
//!
//! Every fallible call returns an [`SbpmStatus`]; on failure the message is
//! available from [`sbpm_last_error_message`] on the same thread. Objects are
//! opaque handles created by `*_new`/`*_solve` and released by `*_free`.
//! Complex vectors cross the boundary as separate real and imaginary arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sbp_momentum::linalg::ComplexVector;
use sbp_momentum::momentum::{analytic_eigenvalues, analytic_eigenvector, MomentumOperator};
use sbp_momentum::well::{continuum_energy, solve_well, PotentialSpec, StateLabel, WellSpectrum};
use sbp_momentum::{fit_power_law, Error, Grid};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbpmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
    NoConvergence = 4,
    Unsupported = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbpmLabel {
    Physical = 0,
    Unphysical = 1,
    Wall = 2,
    Unpaired = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SbpmPowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub rms_log_residual: f64,
}

/// Momentum operator `-i hbar D` on a uniform grid.
pub struct SbpmOperator {
    inner: MomentumOperator,
}

/// Solved particle-in-a-well spectrum.
pub struct SbpmWell {
    inner: WellSpectrum,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SbpmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Dimension { .. } => SbpmStatus::LengthMismatch,
            Error::NoConvergence { .. } => SbpmStatus::NoConvergence,
            Error::OracleCap { .. } | Error::OddGrid(_) => SbpmStatus::Unsupported,
            _ => SbpmStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SbpmStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SbpmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SbpmStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside sbp_momentum");
            SbpmStatus::Panic
        }
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn expect_len(len: usize, expected: usize) -> Result<(), Failure> {
    if len == expected {
        Ok(())
    } else {
        Err(Failure(
            SbpmStatus::LengthMismatch,
            format!("buffer length {len}, expected {expected}"),
        ))
    }
}

unsafe fn complex_input(re: *const f64, im: *const f64, len: usize) -> Result<ComplexVector, Failure> {
    let re = input(re, len, "re")?;
    if im.is_null() {
        return Ok(ComplexVector::from_real(re));
    }
    Ok(ComplexVector::from_parts(re, input(im, len, "im")?)?)
}

unsafe fn complex_output(v: &ComplexVector, re: *mut f64, im: *mut f64) -> Result<(), Failure> {
    let (re, im) = (output(re, v.len(), "re_out")?, output(im, v.len(), "im_out")?);
    for (k, z) in v.iter().enumerate() {
        re[k] = z.re;
        im[k] = z.im;
    }
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sbpm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates the momentum operator on `n_points` points spanning `[a, b]`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sbpm_operator_new(
    a: f64,
    b: f64,
    n_points: usize,
    hbar: f64,
    out: *mut *mut SbpmOperator,
) -> SbpmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = Grid::new(a, b, n_points)?;
        let inner = MomentumOperator::on_grid(&grid, hbar)?;
        *out = Box::into_raw(Box::new(SbpmOperator { inner }));
        Ok(())
    })
}

/// # Safety
/// `op` must be NULL or a handle from [`sbpm_operator_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sbpm_operator_free(op: *mut SbpmOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Number of grid points, or 0 for NULL.
///
/// # Safety
/// `op` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sbpm_operator_len(op: *const SbpmOperator) -> usize {
    op.as_ref().map_or(0, |o| o.inner.grid().n_points())
}

/// `out = P psi`. `im` may be NULL for a real input.
///
/// # Safety
/// `op` must be a live handle; every non-NULL array must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sbpm_operator_apply(
    op: *const SbpmOperator,
    re: *const f64,
    im: *const f64,
    len: usize,
    re_out: *mut f64,
    im_out: *mut f64,
) -> SbpmStatus {
    guard(|| {
        let op = handle(op, "op")?;
        expect_len(len, op.inner.grid().n_points())?;
        let psi = complex_input(re, im, len)?;
        complex_output(&op.inner.apply(&psi)?, re_out, im_out)
    })
}

/// Real derivative `out = D u`.
///
/// # Safety
/// `op` must be a live handle; `u` and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sbpm_operator_derivative(
    op: *const SbpmOperator,
    u: *const f64,
    len: usize,
    out: *mut f64,
) -> SbpmStatus {
    guard(|| {
        let op = handle(op, "op")?;
        expect_len(len, op.inner.grid().n_points())?;
        let du = op.inner.sbp().apply_derivative_real(input(u, len, "u")?)?;
        output(out, len, "out")?.copy_from_slice(&du);
        Ok(())
    })
}

/// H-weighted inner product `<psi, chi>`, conjugate-linear in `psi`.
///
/// # Safety
/// `op` must be a live handle; non-NULL arrays must hold `len` doubles and
/// `re_out`, `im_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbpm_operator_inner_product(
    op: *const SbpmOperator,
    psi_re: *const f64,
    psi_im: *const f64,
    chi_re: *const f64,
    chi_im: *const f64,
    len: usize,
    re_out: *mut f64,
    im_out: *mut f64,
) -> SbpmStatus {
    guard(|| {
        let op = handle(op, "op")?;
        expect_len(len, op.inner.grid().n_points())?;
        let psi = complex_input(psi_re, psi_im, len)?;
        let chi = complex_input(chi_re, chi_im, len)?;
        let z = op.inner.sbp().inner_product(&psi, &chi)?;
        output(re_out, 1, "re_out")?[0] = z.re;
        output(im_out, 1, "im_out")?[0] = z.im;
        Ok(())
    })
}

/// Closed-form momentum eigenvalues, `len` equal to the grid size (even only).
///
/// # Safety
/// `op` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sbpm_momentum_eigenvalues(op: *const SbpmOperator, out: *mut f64, len: usize) -> SbpmStatus {
    guard(|| {
        let op = handle(op, "op")?;
        let p = analytic_eigenvalues(op.inner.grid(), op.inner.hbar())?;
        expect_len(len, p.len())?;
        output(out, len, "out")?.copy_from_slice(&p);
        Ok(())
    })
}

/// Closed-form eigenvector for index `l` in `1..=N-2`, H-normalized.
///
/// # Safety
/// `op` must be a live handle; `re_out`, `im_out` must hold `len` doubles and
/// `eigenvalue_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbpm_momentum_eigenvector(
    op: *const SbpmOperator,
    l: usize,
    re_out: *mut f64,
    im_out: *mut f64,
    len: usize,
    eigenvalue_out: *mut f64,
) -> SbpmStatus {
    guard(|| {
        let op = handle(op, "op")?;
        expect_len(len, op.inner.grid().n_points())?;
        let e = analytic_eigenvector(op.inner.grid(), l, op.inner.hbar())?;
        complex_output(&e.vector, re_out, im_out)?;
        output(eigenvalue_out, 1, "eigenvalue_out")?[0] = e.eigenvalue;
        Ok(())
    })
}

/// Solves the well Hamiltonian with walls of height `wall` at both ends.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sbpm_well_solve(
    a: f64,
    b: f64,
    n_points: usize,
    mass: f64,
    hbar: f64,
    wall: f64,
    out: *mut *mut SbpmWell,
) -> SbpmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = Grid::new(a, b, n_points)?;
        let inner = solve_well(&grid, &PotentialSpec::with_wall(wall), mass, hbar)?;
        *out = Box::into_raw(Box::new(SbpmWell { inner }));
        Ok(())
    })
}

/// # Safety
/// `well` must be NULL or a handle from [`sbpm_well_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sbpm_well_free(well: *mut SbpmWell) {
    if !well.is_null() {
        drop(Box::from_raw(well));
    }
}

/// Number of states, or 0 for NULL.
///
/// # Safety
/// `well` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sbpm_well_len(well: *const SbpmWell) -> usize {
    well.as_ref().map_or(0, |w| w.inner.len())
}

/// Energies of all stored states in ascending solver order.
///
/// # Safety
/// `well` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sbpm_well_energies(well: *const SbpmWell, out: *mut f64, len: usize) -> SbpmStatus {
    guard(|| {
        let w = handle(well, "well")?;
        expect_len(len, w.inner.len())?;
        output(out, len, "out")?.copy_from_slice(&w.inner.energies);
        Ok(())
    })
}

/// Classification of each stored state.
///
/// # Safety
/// `well` must be a live handle; `out` must hold `len` labels.
#[no_mangle]
pub unsafe extern "C" fn sbpm_well_labels(well: *const SbpmWell, out: *mut SbpmLabel, len: usize) -> SbpmStatus {
    guard(|| {
        let w = handle(well, "well")?;
        expect_len(len, w.inner.len())?;
        if out.is_null() {
            return Err(null("out"));
        }
        let out = std::slice::from_raw_parts_mut(out, len);
        for (o, l) in out.iter_mut().zip(&w.inner.labels) {
            *o = match l {
                StateLabel::Physical => SbpmLabel::Physical,
                StateLabel::Unphysical => SbpmLabel::Unphysical,
                StateLabel::Wall => SbpmLabel::Wall,
                StateLabel::Unpaired => SbpmLabel::Unpaired,
            };
        }
        Ok(())
    })
}

/// Energy and H-normalized state of the `n`-th physical level (1-based).
///
/// # Safety
/// `well` must be a live handle; `state_out` must hold `len` doubles and
/// `energy_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbpm_well_physical_level(
    well: *const SbpmWell,
    n: usize,
    energy_out: *mut f64,
    state_out: *mut f64,
    len: usize,
) -> SbpmStatus {
    guard(|| {
        let w = handle(well, "well")?;
        expect_len(len, w.inner.len())?;
        let (e, state) = w.inner.physical_level(n)?;
        output(energy_out, 1, "energy_out")?[0] = e;
        output(state_out, len, "state_out")?.copy_from_slice(&state);
        Ok(())
    })
}

/// Continuum infinite-well energy of level `n` for a box of `length`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbpm_continuum_energy(n: usize, length: f64, mass: f64, hbar: f64, out: *mut f64) -> SbpmStatus {
    guard(|| {
        let e = continuum_energy(n, length, mass, hbar)?;
        output(out, 1, "out")?[0] = e;
        Ok(())
    })
}

/// Least-squares fit of `err = c dx^nu` in log-log space.
///
/// # Safety
/// `dx` and `err` must hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbpm_fit_power_law(
    dx: *const f64,
    err: *const f64,
    len: usize,
    out: *mut SbpmPowerLawFit,
) -> SbpmStatus {
    guard(|| {
        let samples: Vec<(f64, f64)> = input(dx, len, "dx")?
            .iter()
            .copied()
            .zip(input(err, len, "err")?.iter().copied())
            .collect();
        let f = fit_power_law(&samples)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = SbpmPowerLawFit {
            exponent: f.exponent,
            prefactor: f.prefactor,
            rms_log_residual: f.rms_log_residual,
        };
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::ffi::CStr;

    fn last_error() -> String {
        let p = sbpm_last_error_message();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }

    #[test]
    fn null_out_pointer() {
        let s = unsafe { sbpm_operator_new(0.0, 1.0, 8, 1.0, ptr::null_mut()) };
        assert_eq!(s, SbpmStatus::NullPointer);
        assert!(last_error().contains("out"));
    }

    #[test]
    fn error_codes_map() {
        let mut op = ptr::null_mut();
        assert_eq!(unsafe { sbpm_operator_new(1.0, 0.0, 8, 1.0, &mut op) }, SbpmStatus::InvalidArgument);
        assert!(op.is_null());
        assert_eq!(unsafe { sbpm_operator_new(0.0, 1.0, 7, 1.0, &mut op) }, SbpmStatus::Ok);
        let mut p = [0.0; 7];
        assert_eq!(unsafe { sbpm_momentum_eigenvalues(op, p.as_mut_ptr(), 7) }, SbpmStatus::Unsupported);
        let mut d = [0.0; 6];
        assert_eq!(
            unsafe { sbpm_operator_derivative(op, d.as_ptr(), 6, d.as_mut_ptr()) },
            SbpmStatus::LengthMismatch
        );
        unsafe { sbpm_operator_free(op) };
    }

    #[test]
    fn success_clears_last_error() {
        unsafe { sbpm_operator_new(0.0, 1.0, 8, 1.0, ptr::null_mut()) };
        let mut out = 0.0;
        assert_eq!(unsafe { sbpm_continuum_energy(1, 1.0, 1.0, 1.0, &mut out) }, SbpmStatus::Ok);
        assert!(sbpm_last_error_message().is_null());
        assert!((out - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn free_accepts_null() {
        unsafe {
            sbpm_operator_free(ptr::null_mut());
            sbpm_well_free(ptr::null_mut());
        }
        assert_eq!(unsafe { sbpm_operator_len(ptr::null()) }, 0);
    }

    #[test]
    fn apply_accepts_real_input() {
        let mut op = ptr::null_mut();
        unsafe { sbpm_operator_new(0.0, 1.0, 5, 1.0, &mut op) };
        let ones = [1.0; 5];
        let (mut re, mut im) = ([9.0; 5], [9.0; 5]);
        let s = unsafe { sbpm_operator_apply(op, ones.as_ptr(), ptr::null(), 5, re.as_mut_ptr(), im.as_mut_ptr()) };
        assert_eq!(s, SbpmStatus::Ok);
        assert!(re.iter().chain(&im).all(|v| *v == 0.0));
        unsafe { sbpm_operator_free(op) };
    }

    #[test]
    fn complex_roundtrip() {
        let v: ComplexVector = (0..3).map(|k| Complex64::new(k as f64, -(k as f64))).collect();
        let (mut re, mut im) = ([0.0; 3], [0.0; 3]);
        unsafe { complex_output(&v, re.as_mut_ptr(), im.as_mut_ptr()) }.ok().unwrap();
        let back = unsafe { complex_input(re.as_ptr(), im.as_ptr(), 3) }.ok().unwrap();
        assert_eq!(back, v);
    }
}
