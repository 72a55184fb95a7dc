//! Gauge-fixed generalized Ricci flow of left-invariant data,
//! `ġ = -2 Rc_g + ½ H∘H`, `Ḣ = -Δ_g H`.

use rayon::prelude::*;

use crate::config::{
    BLOWUP_BISECT_TOL, BLOWUP_EIGEN_FLOOR, BLOWUP_HORIZON, SWEEP_FORWARD_TIME, ZERO_TOL,
};
use crate::curvature::{h_circ_h, rc_metric, require_closed, SymBilinear};
use crate::flows::integrator::{integrate, Controls, Halt};
use crate::flows::{metric_labels, pack_metric_state, unpack_metric_state, StateKind, Trajectory};
use crate::hodge::{hodge_laplacian, Metric, Orientation};
use crate::lie::LieBracket;
use crate::{Error, KForm, Result};

/// A point `(g, H)` of the flow.
#[derive(Clone, Debug, PartialEq)]
pub struct GrfState {
    pub g: Metric,
    pub h: KForm,
}

/// Velocities `(-2 Rc_g + ½ H∘H, -Δ_g H)`.
pub fn grf_rhs(mu: &LieBracket, state: &GrfState, o: Orientation) -> Result<(SymBilinear, KForm)> {
    let rc = rc_metric(mu, &state.g)?;
    let hh = h_circ_h(&state.g, &state.h)?;
    let dg = SymBilinear::symmetrize(rc.matrix() * -2.0 + hh.matrix() * 0.5);
    let dh = hodge_laplacian(mu, &state.g, o, &state.h)?.scaled(-1.0);
    Ok((dg, dh))
}

fn validate(mu: &LieBracket, g0: &Metric, h0: &KForm) -> Result<()> {
    if g0.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: g0.dim(),
        });
    }
    if mu.nilpotency_step()?.is_none() {
        return Err(Error::NotNilpotent);
    }
    require_closed(mu, h0, ZERO_TOL)
}

/// Integrates in direction `dir` over the parameter span; stops (without an
/// error) when the metric degenerates.
fn run_grf(
    mu: &LieBracket,
    start: &GrfState,
    o: Orientation,
    t0: f64,
    dir: f64,
    span: f64,
    controls: &Controls,
) -> Result<crate::flows::integrator::Run> {
    let n = mu.dim();
    let rhs = |_t: f64, y: &[f64]| -> Option<Vec<f64>> {
        let (g, h) = unpack_metric_state(n, y).ok()?;
        let state = GrfState {
            g: Metric::new(g).ok()?,
            h,
        };
        let (dg, dh) = grf_rhs(mu, &state, o).ok()?;
        let mut out = Vec::with_capacity(y.len());
        for i in 0..n {
            for j in i..n {
                out.push(dg.get(i, j));
            }
        }
        out.extend_from_slice(dh.coeffs());
        Some(out)
    };
    let monitor = |_t: f64, y: &[f64]| -> Result<Option<String>> {
        let (g, _) = unpack_metric_state(n, y)?;
        let low = g.symmetric_eigenvalues().min();
        if !(low >= BLOWUP_EIGEN_FLOOR) {
            return Ok(Some(format!("metric eigenvalue {low:e} below floor")));
        }
        Ok(None)
    };
    integrate(
        rhs,
        t0,
        dir,
        pack_metric_state(&start.g, &start.h),
        span,
        controls,
        monitor,
    )
}

/// Integrates the flow forward over `[t_start, t_end]`. A degenerating metric
/// is reported as [`Error::Blowup`] with the last valid time.
#[allow(clippy::too_many_arguments)]
pub fn integrate_grf(
    mu: &LieBracket,
    g0: &Metric,
    h0: &KForm,
    o: Orientation,
    t_start: f64,
    t_end: f64,
    controls: &Controls,
) -> Result<Trajectory> {
    if !(t_end > t_start) {
        return Err(Error::InvalidArgument(format!(
            "t_end = {t_end} must exceed t_start = {t_start}"
        )));
    }
    validate(mu, g0, h0)?;
    let start = GrfState {
        g: g0.clone(),
        h: h0.clone(),
    };
    let run = run_grf(mu, &start, o, t_start, 1.0, t_end - t_start, controls)?;
    if let Some(halt) = run.halt {
        return Err(Error::Blowup {
            t_last: t_start + halt.s_good,
            cause: halt.cause,
        });
    }
    let n = mu.dim();
    Ok(Trajectory {
        kind: StateKind::Metric { dim: n },
        labels: metric_labels(n),
        times: run.s.iter().map(|s| t_start + s).collect(),
        states: run.states,
        stats: run.stats,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum BlowupOutcome {
    /// The maximal solution ends at `time`.
    Blowup {
        time: f64,
        cause: String,
    },
    NoBlowupWithinHorizon {
        horizon: f64,
    },
}

impl BlowupOutcome {
    pub fn time(&self) -> Option<f64> {
        match self {
            BlowupOutcome::Blowup { time, .. } => Some(*time),
            BlowupOutcome::NoBlowupWithinHorizon { .. } => None,
        }
    }
}

/// Finds the end of the maximal solution starting at `t = 0`, searching in
/// direction `direction` (`+1` forward, `-1` backward) up to `|t| = horizon`.
///
/// A blowup is declared when a state entry exceeds the magnitude limit, a
/// metric eigenvalue drops below [`BLOWUP_EIGEN_FLOOR`] or the step size
/// underflows; the failing interval is then bisected down to
/// [`BLOWUP_BISECT_TOL`].
#[allow(clippy::too_many_arguments)]
pub fn blowup_time(
    mu: &LieBracket,
    g0: &Metric,
    h0: &KForm,
    o: Orientation,
    direction: i32,
    horizon: f64,
    controls: &Controls,
) -> Result<BlowupOutcome> {
    if direction != 1 && direction != -1 {
        return Err(Error::InvalidArgument("direction must be +1 or -1".into()));
    }
    if !(horizon > 0.0) {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    validate(mu, g0, h0)?;
    let dir = direction as f64;
    let n = mu.dim();
    let start = GrfState {
        g: g0.clone(),
        h: h0.clone(),
    };
    let run = run_grf(mu, &start, o, 0.0, dir, horizon, controls)?;
    let Some(Halt {
        mut s_good,
        mut s_bad,
        mut cause,
    }) = run.halt
    else {
        return Ok(BlowupOutcome::NoBlowupWithinHorizon { horizon });
    };
    let mut y_good = run.states.last().expect("initial state stored").clone();
    while s_bad - s_good > BLOWUP_BISECT_TOL {
        let mid = 0.5 * (s_good + s_bad);
        let (g, h) = unpack_metric_state(n, &y_good)?;
        let from = GrfState {
            g: Metric::new(g)?,
            h,
        };
        let sub = run_grf(mu, &from, o, dir * s_good, dir, mid - s_good, controls)?;
        let last = sub.states.last().expect("initial state stored").clone();
        match sub.halt {
            Some(h) => {
                s_bad = s_good + h.s_bad;
                s_good += h.s_good;
                cause = h.cause;
            }
            None => s_good = mid,
        }
        y_good = last;
    }
    Ok(BlowupOutcome::Blowup {
        time: dir * 0.5 * (s_good + s_bad),
        cause,
    })
}

/// One row of [`tmin_sweep`].
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub a: f64,
    /// Left end of the maximal interval; `None` if no blowup was found.
    pub t_min: Option<f64>,
    /// `g_1` at the end of the forward run.
    pub g1_end: Option<f64>,
    /// `g_3` at the end of the forward run, an estimate of `lim g_3`.
    pub g3_limit: Option<f64>,
    pub error: Option<String>,
}

/// For each `a`, runs the flow on the 3-dimensional Heisenberg algebra from
/// `g = Id`, `H = a e^{123}`: backward to locate `T_min(a)` and forward to
/// `t = 1e3`. Values of `a` are processed in parallel; rows come back sorted
/// by `a`. Failures are recorded per row.
pub fn tmin_sweep(a_values: &[f64], controls: &Controls) -> Vec<SweepRow> {
    let mut rows: Vec<SweepRow> = a_values
        .par_iter()
        .map(|&a| sweep_one(a, controls))
        .collect();
    rows.sort_by(|x, y| x.a.total_cmp(&y.a));
    rows
}

fn sweep_one(a: f64, controls: &Controls) -> SweepRow {
    let mut row = SweepRow {
        a,
        t_min: None,
        g1_end: None,
        g3_limit: None,
        error: None,
    };
    let mu = LieBracket::heisenberg3();
    let g0 = Metric::identity(3);
    let h0 = KForm::basis(3, &[0, 1, 2]).expect("valid").scaled(a);
    let o = Orientation::default();
    match blowup_time(&mu, &g0, &h0, o, -1, BLOWUP_HORIZON, controls) {
        Ok(outcome) => row.t_min = outcome.time(),
        Err(e) => row.error = Some(e.to_string()),
    }
    match integrate_grf(&mu, &g0, &h0, o, 0.0, SWEEP_FORWARD_TIME, controls) {
        Ok(traj) => {
            let last = traj.states.last().expect("nonempty");
            row.g1_end = Some(last[0]);
            row.g3_limit = Some(last[5]);
        }
        Err(e) => {
            let msg = e.to_string();
            row.error = Some(match row.error.take() {
                Some(prev) => format!("{prev}; {msg}"),
                None => msg,
            });
        }
    }
    row
}
