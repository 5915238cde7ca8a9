//! C ABI over the lpmhd laboratory.
//!
//! Every fallible function returns an [`LpmhdStatus`]; on failure the
//! message is available from [`lpmhd_last_error`] on the same thread.
//! Handles are opaque and must be released with the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lpmhd::diagnostics::{
    euler_growth_bound, lifespan_bound_new, lifespan_bound_old, t_star_empirical, DiagnosticsRecord,
};
use lpmhd::dynamics::{run_simulation, SimConfig, Trajectory};
use lpmhd::littlewood_paley::{besov_norm, BesovSpec, DyadicPartition};
use lpmhd::spectral::{Grid, ScalarField};
use lpmhd::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpmhdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    OutOfRange = 5,
    NotRun = 6,
    Panic = 7,
}

pub struct LpmhdGrid(Grid);

pub struct LpmhdField(ScalarField);

pub struct LpmhdSimulation {
    config: SimConfig,
    trajectory: Option<Trajectory>,
}

/// One diagnostics row; reference columns are NaN without a reference run.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct LpmhdRecord {
    pub t: f64,
    pub energy: f64,
    pub grad_u_sup: f64,
    pub hess_u_sup: f64,
    pub b_sup: f64,
    pub grad_b_sup: f64,
    pub omega_plus_j_b0: f64,
    pub omega_minus_j_b0: f64,
    pub j_b1: f64,
    pub int_hess_u: f64,
    pub int_lipschitz: f64,
    pub int_omega_plus_j: f64,
    pub int_omega_minus_j: f64,
    pub int_j_b1_sq: f64,
    pub u_l2_b2: f64,
    pub delta_b1: f64,
    pub e_sup: f64,
    pub v_l2_b2: f64,
    pub phi: f64,
    pub tail_fraction: f64,
}

impl From<&DiagnosticsRecord> for LpmhdRecord {
    fn from(r: &DiagnosticsRecord) -> Self {
        Self {
            t: r.t,
            energy: r.energy,
            grad_u_sup: r.grad_u_sup,
            hess_u_sup: r.hess_u_sup,
            b_sup: r.b_sup,
            grad_b_sup: r.grad_b_sup,
            omega_plus_j_b0: r.omega_plus_j_b0,
            omega_minus_j_b0: r.omega_minus_j_b0,
            j_b1: r.j_b1,
            int_hess_u: r.int_hess_u,
            int_lipschitz: r.int_lipschitz,
            int_omega_plus_j: r.int_omega_plus_j,
            int_omega_minus_j: r.int_omega_minus_j,
            int_j_b1_sq: r.int_j_b1_sq,
            u_l2_b2: r.u_l2_b2,
            delta_b1: r.delta_b1,
            e_sup: r.e_sup,
            v_l2_b2: r.v_l2_b2,
            phi: r.phi,
            tail_fraction: r.tail_fraction,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> LpmhdStatus {
    match err {
        Error::Config(_) | Error::ConfigFile { .. } => LpmhdStatus::Config,
        Error::Index { .. } => LpmhdStatus::OutOfRange,
        Error::StepSize { .. } | Error::Diagnostic(_) => LpmhdStatus::Numerical,
        _ => LpmhdStatus::InvalidArgument,
    }
}

fn fail(status: LpmhdStatus, msg: impl Into<String>) -> LpmhdStatus {
    set_error(msg);
    status
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), LpmhdStatus>) -> LpmhdStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => LpmhdStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(LpmhdStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: lpmhd::Result<T>) -> Result<T, LpmhdStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, LpmhdStatus> {
    p.as_ref().ok_or_else(|| fail(LpmhdStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), LpmhdStatus> {
    if out.is_null() {
        return Err(fail(LpmhdStatus::NullPointer, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], LpmhdStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(LpmhdStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Message of the last failure on this thread, or NULL. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn lpmhd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Square periodic grid with `n` points per side and side `length`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lpmhd_grid_new(n: usize, length: f64, out: *mut *mut LpmhdGrid) -> LpmhdStatus {
    guard(|| {
        let g = lift(Grid::new(n, length))?;
        write_out(out, Box::into_raw(Box::new(LpmhdGrid(g))), "out")
    })
}

/// # Safety
/// `grid` must come from [`lpmhd_grid_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lpmhd_grid_free(grid: *mut LpmhdGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Scalar field from `len = n*n` values in row-major order (index i1*n + i2).
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lpmhd_field_from_values(
    grid: *const LpmhdGrid,
    values: *const f64,
    len: usize,
    out: *mut *mut LpmhdField,
) -> LpmhdStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        let v = slice(values, len, "values")?;
        let f = lift(ScalarField::from_values(&g.0, v.to_vec()))?;
        write_out(out, Box::into_raw(Box::new(LpmhdField(f))), "out")
    })
}

/// Copies the grid values of `field` into `buf`, which must hold n*n doubles.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lpmhd_field_values(field: *const LpmhdField, buf: *mut f64, len: usize) -> LpmhdStatus {
    guard(|| {
        let f = deref(field, "field")?;
        let v = f.0.values();
        if len != v.len() {
            return Err(fail(
                LpmhdStatus::InvalidArgument,
                format!("buffer holds {len} values, field has {}", v.len()),
            ));
        }
        if buf.is_null() {
            return Err(fail(LpmhdStatus::NullPointer, "buf is null"));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, len);
        Ok(())
    })
}

/// # Safety
/// `field` must come from [`lpmhd_field_from_values`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lpmhd_field_free(field: *mut LpmhdField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// B^s_{p,r} norm; `p` must be 2 or INFINITY and `r` 1 or INFINITY.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lpmhd_besov_norm(
    field: *const LpmhdField,
    s: f64,
    p: f64,
    r: f64,
    out: *mut f64,
) -> LpmhdStatus {
    guard(|| {
        let f = deref(field, "field")?;
        let spec = lift(BesovSpec::from_exponents(s, p, r))?;
        let part = DyadicPartition::new(f.0.grid());
        let v = lift(besov_norm(&f.0, spec, &part))?;
        write_out(out, v, "out")
    })
}

/// Lifespan lower bound in terms of ‖u₀‖ (prefactor and ratio) and ‖b₀‖.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lpmhd_lifespan_bound_new(u0_norm: f64, b0_norm: f64, c: f64, out: *mut f64) -> LpmhdStatus {
    guard(|| write_out(out, lift(lifespan_bound_new(u0_norm, b0_norm, c))?.bound, "out"))
}

/// Lifespan lower bound in terms of the (u₀, b₀) pair norms.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lpmhd_lifespan_bound_old(
    pair_b2: f64,
    pair_b1: f64,
    b0_norm: f64,
    c: f64,
    out: *mut f64,
) -> LpmhdStatus {
    guard(|| write_out(out, lift(lifespan_bound_old(pair_b2, pair_b1, b0_norm, c))?.bound, "out"))
}

/// C V₀ exp(C t V₀ exp(C t V₀)); INFINITY on overflow.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lpmhd_euler_growth_bound(v0: f64, t: f64, c: f64, out: *mut f64) -> LpmhdStatus {
    guard(|| write_out(out, lift(euler_growth_bound(v0, t, c))?, "out"))
}

/// First time with ∫₀ᵗ E² ≥ e0 on the sampled series; `censored` is set to
/// 1 when the threshold is never reached and the last time is returned.
///
/// # Safety
/// `times` and `e` must point to `len` doubles; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn lpmhd_t_star(
    times: *const f64,
    e: *const f64,
    len: usize,
    e0: f64,
    t_star: *mut f64,
    censored: *mut i32,
) -> LpmhdStatus {
    guard(|| {
        let ts = slice(times, len, "times")?;
        let es = slice(e, len, "e")?;
        let r = lift(t_star_empirical(ts, es, e0))?;
        write_out(t_star, r.t_star, "t_star")?;
        write_out(censored, i32::from(r.censored), "censored")
    })
}

/// Simulation from a TOML configuration string; nothing runs until
/// [`lpmhd_simulation_run`].
///
/// # Safety
/// `config` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lpmhd_simulation_new(config: *const c_char, out: *mut *mut LpmhdSimulation) -> LpmhdStatus {
    guard(|| {
        if config.is_null() {
            return Err(fail(LpmhdStatus::NullPointer, "config is null"));
        }
        let text = CStr::from_ptr(config)
            .to_str()
            .map_err(|_| fail(LpmhdStatus::Config, "config is not UTF-8"))?;
        let cfg = lift(SimConfig::parse(text))?;
        let sim = LpmhdSimulation { config: cfg, trajectory: None };
        write_out(out, Box::into_raw(Box::new(sim)), "out")
    })
}

/// Integrates to `t_end` or an earlier stop. Returns `Numerical` when the
/// run ended in a numerical failure; records up to that point stay readable.
///
/// # Safety
/// `sim` must be a live handle not used concurrently from another thread.
#[no_mangle]
pub unsafe extern "C" fn lpmhd_simulation_run(sim: *mut LpmhdSimulation) -> LpmhdStatus {
    guard(|| {
        let sim = sim.as_mut().ok_or_else(|| fail(LpmhdStatus::NullPointer, "sim is null"))?;
        let traj = lift(run_simulation(&sim.config))?;
        let failure = traj.termination.is_failure().then(|| format!("{:?}", traj.termination));
        sim.trajectory = Some(traj);
        match failure {
            Some(msg) => Err(fail(LpmhdStatus::Numerical, msg)),
            None => Ok(()),
        }
    })
}

/// # Safety
/// `sim` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lpmhd_simulation_record_count(sim: *const LpmhdSimulation, out: *mut usize) -> LpmhdStatus {
    guard(|| {
        let sim = deref(sim, "sim")?;
        let traj = sim.trajectory.as_ref().ok_or_else(|| fail(LpmhdStatus::NotRun, "simulation has not run"))?;
        write_out(out, traj.records.len(), "out")
    })
}

/// # Safety
/// `sim` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lpmhd_simulation_record(
    sim: *const LpmhdSimulation,
    index: usize,
    out: *mut LpmhdRecord,
) -> LpmhdStatus {
    guard(|| {
        let sim = deref(sim, "sim")?;
        let traj = sim.trajectory.as_ref().ok_or_else(|| fail(LpmhdStatus::NotRun, "simulation has not run"))?;
        let rec = traj.records.get(index).ok_or_else(|| {
            fail(LpmhdStatus::OutOfRange, format!("record {index} out of range 0..{}", traj.records.len()))
        })?;
        write_out(out, LpmhdRecord::from(rec), "out")
    })
}

/// # Safety
/// `sim` must come from [`lpmhd_simulation_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lpmhd_simulation_free(sim: *mut LpmhdSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}
