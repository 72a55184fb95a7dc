//! C interface to `nilflow`.
//!
//! Every fallible function returns a [`NilflowStatus`]. On failure a message
//! is available from [`nilflow_last_error`] on the calling thread. Handles are
//! opaque and released with their `_free` function.
//!
//! Layouts: matrices are row-major `n × n` arrays; bracket tensors are dense
//! `n³` arrays with entry `mu(e_i, e_j)^k` at `(i n + j) n + k` (0-based);
//! forms are packed over increasing index tuples in lexicographic order.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ops::Index;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use nilflow::curvature::{generalized_ricci_plus, rc_metric};
use nilflow::flows::{
    blowup_time, integrate_gbf, integrate_grf, BlowupOutcome, Controls, PhiSpec, Trajectory,
};
use nilflow::forms::binomial;
use nilflow::io::{emit_trajectory_csv, load_problem, Problem};
use nilflow::soliton::soliton_fit;
use nilflow::{Error, KForm, LieBracket, Metric, Orientation};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NilflowStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotLie = 4,
    NotClosed = 5,
    NotNilpotent = 6,
    Singular = 7,
    NotPositiveDefinite = 8,
    /// Blowup, structure drift or an exhausted step budget.
    Numerical = 9,
    Io = 10,
    Parse = 11,
    /// An internal panic was caught at the boundary.
    Panic = 12,
}

/// Choice of φ for bracket flows.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NilflowPhi {
    Ric = 0,
    RicMinusQuarterH2 = 1,
}

/// Integrator controls; start from [`nilflow_controls_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NilflowControls {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; 0 selects the default.
    pub h_init: f64,
    pub h_max: f64,
    /// Constant step; 0 selects adaptive control.
    pub fixed_step: f64,
    pub max_steps: usize,
    pub magnitude_limit: f64,
    pub step_floor: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NilflowCheck {
    pub dim: usize,
    pub jacobi_residual: f64,
    pub closedness_residual: f64,
    /// Nilpotency step, or -1 if the bracket is not nilpotent (or not Lie).
    pub nilpotency_step: i32,
    pub is_lie: bool,
    pub is_closed: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NilflowSoliton {
    pub lambda: f64,
    pub sym_residual: f64,
    pub skew_residual: f64,
    pub residual_norm: f64,
    pub is_soliton: bool,
}

/// Lie bracket with optional metric, 3-form and 1-form.
pub struct NilflowProblem {
    inner: Problem,
}

/// Time samples and packed states of a flow.
pub struct NilflowTrajectory {
    inner: Trajectory,
    labels: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail(NilflowStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::DimensionMismatch { .. }
            | Error::DegreeOutOfRange { .. }
            | Error::IndexOutOfRange { .. } => NilflowStatus::DimensionMismatch,
            Error::NotLie { .. } => NilflowStatus::NotLie,
            Error::NotClosed { .. } => NilflowStatus::NotClosed,
            Error::NotNilpotent => NilflowStatus::NotNilpotent,
            Error::Singular { .. } => NilflowStatus::Singular,
            Error::NotPositiveDefinite(_) => NilflowStatus::NotPositiveDefinite,
            Error::Io { .. } => NilflowStatus::Io,
            Error::Parse { .. } => NilflowStatus::Parse,
            e if e.is_numerical() => NilflowStatus::Numerical,
            _ => NilflowStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(NilflowStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(NilflowStatus::InvalidArgument, msg.into())
}

fn set_error(msg: Option<String>) {
    let c = msg.map(|m| CString::new(m.replace('\0', " ")).expect("no interior nul"));
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NilflowStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(None);
            NilflowStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(_) => {
            set_error(Some("internal panic".into()));
            NilflowStatus::Panic
        }
    }
}

unsafe fn problem_ref<'a>(p: *const NilflowProblem) -> Result<&'a Problem, Fail> {
    p.as_ref().map(|p| &p.inner).ok_or_else(|| null("problem"))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out(out: *mut f64, values: &[f64], what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

unsafe fn string_arg(s: *const c_char, what: &str) -> Result<String, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| invalid(format!("{what} is not UTF-8")))
}

fn orientation(sign: i32) -> Result<Orientation, Fail> {
    match sign {
        1 => Ok(Orientation::Positive),
        -1 => Ok(Orientation::Negative),
        _ => Err(invalid("orientation must be 1 or -1")),
    }
}

unsafe fn controls(c: *const NilflowControls) -> Result<Controls, Fail> {
    let Some(c) = c.as_ref() else {
        return Ok(Controls::default());
    };
    let positive = |v: f64| (v > 0.0).then_some(v);
    let out = Controls {
        rtol: c.rtol,
        atol: c.atol,
        h_init: positive(c.h_init),
        h_max: c.h_max,
        fixed_step: positive(c.fixed_step),
        max_steps: c.max_steps,
        magnitude_limit: c.magnitude_limit,
        step_floor: c.step_floor,
    };
    out.validate()?;
    Ok(out)
}

fn row_major<M: Index<(usize, usize), Output = f64>>(m: &M, n: usize) -> Vec<f64> {
    (0..n * n).map(|c| m[(c / n, c % n)]).collect()
}

fn trajectory_handle(inner: Trajectory) -> *mut NilflowTrajectory {
    let labels = inner
        .labels
        .iter()
        .map(|l| CString::new(l.as_str()).expect("labels have no nul"))
        .collect();
    Box::into_raw(Box::new(NilflowTrajectory { inner, labels }))
}

unsafe fn store<T>(out: *mut *mut T, value: *mut T) {
    *out = value;
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn nilflow_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn nilflow_controls_default() -> NilflowControls {
    let c = Controls::default();
    NilflowControls {
        rtol: c.rtol,
        atol: c.atol,
        h_init: 0.0,
        h_max: c.h_max,
        fixed_step: 0.0,
        max_steps: c.max_steps,
        magnitude_limit: c.magnitude_limit,
        step_floor: c.step_floor,
    }
}

/// Loads a built-in fixture (such as `heisenberg3+H(1)`) or a JSON problem file.
///
/// # Safety
/// `spec` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nilflow_problem_load(
    spec: *const c_char,
    out: *mut *mut NilflowProblem,
) -> NilflowStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = load_problem(&string_arg(spec, "spec")?)?;
        store(out, Box::into_raw(Box::new(NilflowProblem { inner })));
        Ok(())
    })
}

/// Creates a problem from a dense `dim³` bracket tensor, with the identity
/// metric and no forms.
///
/// # Safety
/// `tensor` must point to `dim³` values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nilflow_problem_from_bracket(
    dim: usize,
    tensor: *const f64,
    out: *mut *mut NilflowProblem,
) -> NilflowStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        let coeffs = slice(tensor, dim * dim * dim, "tensor")?.to_vec();
        let inner = Problem {
            name: "ffi".into(),
            mu: LieBracket::from_tensor(dim, coeffs)?,
            g: Some(Metric::identity(dim)),
            h: None,
            theta: None,
        };
        store(out, Box::into_raw(Box::new(NilflowProblem { inner })));
        Ok(())
    })
}

/// Sets the metric from a row-major `dim × dim` array.
///
/// # Safety
/// `p` must be a live handle and `g` must point to `dim²` values.
#[no_mangle]
pub unsafe extern "C" fn nilflow_problem_set_metric(
    p: *mut NilflowProblem,
    g: *const f64,
) -> NilflowStatus {
    guard(|| {
        let p = p.as_mut().ok_or_else(|| null("problem"))?;
        let n = p.inner.mu.dim();
        let values = slice(g, n * n, "g")?;
        let rows: Vec<Vec<f64>> = values.chunks(n).map(<[f64]>::to_vec).collect();
        p.inner.g = Some(Metric::from_rows(&rows)?);
        Ok(())
    })
}

/// Sets the 3-form from `len = C(dim, 3)` packed coefficients.
///
/// # Safety
/// `p` must be a live handle and `coeffs` must point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn nilflow_problem_set_h(
    p: *mut NilflowProblem,
    coeffs: *const f64,
    len: usize,
) -> NilflowStatus {
    guard(|| {
        let p = p.as_mut().ok_or_else(|| null("problem"))?;
        let n = p.inner.mu.dim();
        p.inner.h = Some(KForm::from_packed(
            n,
            3,
            slice(coeffs, len, "coeffs")?.to_vec(),
        )?);
        Ok(())
    })
}

/// Sets the 1-form from `len = dim` coefficients.
///
/// # Safety
/// `p` must be a live handle and `coeffs` must point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn nilflow_problem_set_theta(
    p: *mut NilflowProblem,
    coeffs: *const f64,
    len: usize,
) -> NilflowStatus {
    guard(|| {
        let p = p.as_mut().ok_or_else(|| null("problem"))?;
        let n = p.inner.mu.dim();
        p.inner.theta = Some(KForm::from_packed(
            n,
            1,
            slice(coeffs, len, "coeffs")?.to_vec(),
        )?);
        Ok(())
    })
}

/// Dimension of the problem, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nilflow_problem_dim(p: *const NilflowProblem) -> usize {
    p.as_ref().map_or(0, |p| p.inner.mu.dim())
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nilflow_problem_free(p: *mut NilflowProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Jacobi, nilpotency and closedness report.
///
/// # Safety
/// `p` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn nilflow_check(
    p: *const NilflowProblem,
    out: *mut NilflowCheck,
) -> NilflowStatus {
    guard(|| {
        let p = problem_ref(p)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let tol = nilflow::config::ZERO_TOL;
        let jacobi = p.mu.jacobi_residual();
        let is_lie = jacobi <= tol;
        let step = if is_lie {
            p.mu.nilpotency_step()?
        } else {
            None
        };
        let closed = nilflow::curvature::closedness_residual(&p.mu, &p.h_or_zero())?;
        *out = NilflowCheck {
            dim: p.dim(),
            jacobi_residual: jacobi,
            closedness_residual: closed,
            nilpotency_step: step.map_or(-1, |s| s as i32),
            is_lie,
            is_closed: closed <= tol,
        };
        Ok(())
    })
}

/// Ricci tensor of the metric, written row-major to `out` (`dim²` values).
///
/// # Safety
/// `p` must be a live handle and `out` must hold `dim²` values.
#[no_mangle]
pub unsafe extern "C" fn nilflow_ricci(p: *const NilflowProblem, out: *mut f64) -> NilflowStatus {
    guard(|| {
        let p = problem_ref(p)?;
        let rc = rc_metric(&p.mu, &p.metric_or_identity())?;
        write_out(out, &row_major(rc.matrix(), p.dim()), "out")
    })
}

/// Generalized Ricci tensor `Rc⁺`, written row-major to `out`.
///
/// # Safety
/// `p` must be a live handle and `out` must hold `dim²` values.
#[no_mangle]
pub unsafe extern "C" fn nilflow_generalized_ricci(
    p: *const NilflowProblem,
    orientation_sign: i32,
    out: *mut f64,
) -> NilflowStatus {
    guard(|| {
        let p = problem_ref(p)?;
        let o = orientation(orientation_sign)?;
        let plus = generalized_ricci_plus(
            &p.mu,
            &p.metric_or_identity(),
            o,
            &p.h_or_zero(),
            &p.theta_or_zero(),
        )?;
        write_out(out, &row_major(plus.matrix(), p.dim()), "out")
    })
}

/// Least-squares soliton fit. `d_out` (`dim²`, row-major) and `omega_out`
/// (`C(dim, 2)` packed) may be null.
///
/// # Safety
/// `p` must be a live handle; non-null output pointers must be large enough.
#[no_mangle]
pub unsafe extern "C" fn nilflow_soliton_fit(
    p: *const NilflowProblem,
    orientation_sign: i32,
    out: *mut NilflowSoliton,
    d_out: *mut f64,
    omega_out: *mut f64,
) -> NilflowStatus {
    guard(|| {
        let p = problem_ref(p)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let o = orientation(orientation_sign)?;
        let fit = soliton_fit(
            &p.mu,
            &p.metric_or_identity(),
            o,
            &p.h_or_zero(),
            &p.theta_or_zero(),
        )?;
        *out = NilflowSoliton {
            lambda: fit.lambda,
            sym_residual: fit.sym_residual,
            skew_residual: fit.skew_residual,
            residual_norm: fit.residual_norm,
            is_soliton: fit.is_soliton,
        };
        if !d_out.is_null() {
            write_out(d_out, &row_major(fit.d.matrix(), p.dim()), "d_out")?;
        }
        if !omega_out.is_null() {
            debug_assert_eq!(fit.omega.coeffs().len(), binomial(p.dim(), 2));
            write_out(omega_out, fit.omega.coeffs(), "omega_out")?;
        }
        Ok(())
    })
}

/// Integrates the generalized bracket flow of `(mu, H)`. `controls` may be
/// null for defaults.
///
/// # Safety
/// `p` must be a live handle, `controls` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn nilflow_bracket_flow(
    p: *const NilflowProblem,
    phi: NilflowPhi,
    t_start: f64,
    t_end: f64,
    controls_in: *const NilflowControls,
    out: *mut *mut NilflowTrajectory,
) -> NilflowStatus {
    guard(|| {
        let p = problem_ref(p)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = match phi {
            NilflowPhi::Ric => PhiSpec::Ric,
            NilflowPhi::RicMinusQuarterH2 => PhiSpec::RicMinusQuarterHsq,
        };
        let c = controls(controls_in)?;
        let traj = integrate_gbf(spec, &p.mu, &p.h_or_zero(), t_start, t_end, &c)?;
        store(out, trajectory_handle(traj));
        Ok(())
    })
}

/// Integrates the gauge-fixed generalized Ricci flow of `(g, H)`.
///
/// # Safety
/// `p` must be a live handle, `controls` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn nilflow_ricci_flow(
    p: *const NilflowProblem,
    orientation_sign: i32,
    t_start: f64,
    t_end: f64,
    controls_in: *const NilflowControls,
    out: *mut *mut NilflowTrajectory,
) -> NilflowStatus {
    guard(|| {
        let p = problem_ref(p)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let o = orientation(orientation_sign)?;
        let c = controls(controls_in)?;
        let traj = integrate_grf(
            &p.mu,
            &p.metric_or_identity(),
            &p.h_or_zero(),
            o,
            t_start,
            t_end,
            &c,
        )?;
        store(out, trajectory_handle(traj));
        Ok(())
    })
}

/// End of the maximal generalized Ricci flow solution from `t = 0` in
/// `direction` (+1 or -1), searched up to `|t| = horizon`. On success
/// `found` tells whether a blowup occurred and `time` holds its time.
///
/// # Safety
/// `p` must be a live handle, `controls` null or valid, outputs valid.
#[no_mangle]
pub unsafe extern "C" fn nilflow_blowup_time(
    p: *const NilflowProblem,
    orientation_sign: i32,
    direction: i32,
    horizon: f64,
    controls_in: *const NilflowControls,
    found: *mut bool,
    time: *mut f64,
) -> NilflowStatus {
    guard(|| {
        let p = problem_ref(p)?;
        let found = found.as_mut().ok_or_else(|| null("found"))?;
        let time = time.as_mut().ok_or_else(|| null("time"))?;
        let o = orientation(orientation_sign)?;
        let c = controls(controls_in)?;
        let outcome = blowup_time(
            &p.mu,
            &p.metric_or_identity(),
            &p.h_or_zero(),
            o,
            direction,
            horizon,
            &c,
        )?;
        match outcome {
            BlowupOutcome::Blowup { time: t, .. } => {
                *found = true;
                *time = t;
            }
            BlowupOutcome::NoBlowupWithinHorizon { horizon } => {
                *found = false;
                *time = direction as f64 * horizon;
            }
        }
        Ok(())
    })
}

/// Number of stored time samples, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nilflow_trajectory_len(t: *const NilflowTrajectory) -> usize {
    t.as_ref().map_or(0, |t| t.inner.len())
}

/// Number of state columns, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nilflow_trajectory_width(t: *const NilflowTrajectory) -> usize {
    t.as_ref().map_or(0, |t| t.inner.labels.len())
}

/// Label of state column `col`, or null when out of range. Owned by the handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nilflow_trajectory_label(
    t: *const NilflowTrajectory,
    col: usize,
) -> *const c_char {
    t.as_ref()
        .and_then(|t| t.labels.get(col))
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// Copies the `len` sample times into `out`.
///
/// # Safety
/// `t` must be a live handle and `out` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn nilflow_trajectory_times(
    t: *const NilflowTrajectory,
    out: *mut f64,
) -> NilflowStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("trajectory"))?;
        write_out(out, &t.inner.times, "out")
    })
}

/// Copies the states row by row (`len × width` values) into `out`.
///
/// # Safety
/// `t` must be a live handle and `out` must hold `len × width` values.
#[no_mangle]
pub unsafe extern "C" fn nilflow_trajectory_states(
    t: *const NilflowTrajectory,
    out: *mut f64,
) -> NilflowStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("trajectory"))?;
        let flat: Vec<f64> = t.inner.states.concat();
        write_out(out, &flat, "out")
    })
}

/// Writes the trajectory as CSV.
///
/// # Safety
/// `t` must be a live handle and `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nilflow_trajectory_write_csv(
    t: *const NilflowTrajectory,
    path: *const c_char,
) -> NilflowStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("trajectory"))?;
        let path = string_arg(path, "path")?;
        emit_trajectory_csv(&t.inner, Path::new(&path))?;
        Ok(())
    })
}

/// # Safety
/// `t` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nilflow_trajectory_free(t: *mut NilflowTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}
