//! Classical fourth-order Runge–Kutta with step-doubling error control.
//!
//! The integrator works in a forward parameter `s ≥ 0`; a direction of `-1`
//! integrates `y' = f(t, y)` backward through `t = t0 - s` by reversing the
//! right-hand side.

use crate::config::{ATOL, BLOWUP_MAGNITUDE, BLOWUP_STEP_FLOOR, MAX_STEPS, RTOL};
use crate::{Error, Result};

/// Step-size and stopping controls.
#[derive(Clone, Debug, PartialEq)]
pub struct Controls {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; defaults to `min(1e-3, span)`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    /// Use this constant step instead of adaptive control.
    pub fixed_step: Option<f64>,
    pub max_steps: usize,
    /// Halt when any state entry exceeds this magnitude.
    pub magnitude_limit: f64,
    /// Halt when the adaptive step falls below this value.
    pub step_floor: f64,
}

impl Default for Controls {
    fn default() -> Self {
        Self {
            rtol: RTOL,
            atol: ATOL,
            h_init: None,
            h_max: f64::INFINITY,
            fixed_step: None,
            max_steps: MAX_STEPS,
            magnitude_limit: BLOWUP_MAGNITUDE,
            step_floor: BLOWUP_STEP_FLOOR,
        }
    }
}

impl Controls {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("{what} must be positive")));
        if !(self.rtol > 0.0) {
            return bad("rtol");
        }
        if !(self.atol > 0.0) {
            return bad("atol");
        }
        if let Some(h) = self.fixed_step {
            if !(h > 0.0) {
                return bad("fixed step");
            }
        }
        if !(self.h_max > 0.0) {
            return bad("h_max");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Why an integration stopped before its end point.
#[derive(Clone, Debug, PartialEq)]
pub struct Halt {
    /// Last parameter value with an accepted state.
    pub s_good: f64,
    /// Parameter value at which the failure showed up.
    pub s_bad: f64,
    pub cause: String,
}

/// Accepted states of one integration, in the forward parameter `s`.
#[derive(Clone, Debug)]
pub struct Run {
    pub s: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub stats: StepStats,
    pub halt: Option<Halt>,
}

/// A right-hand side; `None` marks a state outside the domain (for example a
/// metric that is no longer positive definite) and rejects the step.
pub trait Rhs {
    fn eval(&mut self, t: f64, y: &[f64]) -> Option<Vec<f64>>;
}

impl<F: FnMut(f64, &[f64]) -> Option<Vec<f64>>> Rhs for F {
    fn eval(&mut self, t: f64, y: &[f64]) -> Option<Vec<f64>> {
        self(t, y)
    }
}

fn axpy(y: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn rk4_step<R: Rhs>(f: &mut R, t0: f64, dir: f64, s: f64, y: &[f64], h: f64) -> Option<Vec<f64>> {
    let mut g = |s: f64, y: &[f64]| -> Option<Vec<f64>> {
        let v = f.eval(t0 + dir * s, y)?;
        if v.iter().all(|x| x.is_finite()) {
            Some(v.into_iter().map(|x| dir * x).collect())
        } else {
            None
        }
    };
    let k1 = g(s, y)?;
    let k2 = g(s + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = g(s + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
    let k4 = g(s + h, &axpy(y, h, &k3))?;
    Some(
        (0..y.len())
            .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect(),
    )
}

/// Integrates from `t0` over the parameter range `[0, span]` in direction
/// `dir = ±1`.
///
/// After each accepted step `monitor(t, y)` may return `Ok(Some(cause))` to
/// declare a halt (the state is then not stored) or an error to abort.
pub fn integrate<R, M>(
    mut f: R,
    t0: f64,
    dir: f64,
    y0: Vec<f64>,
    span: f64,
    controls: &Controls,
    mut monitor: M,
) -> Result<Run>
where
    R: Rhs,
    M: FnMut(f64, &[f64]) -> Result<Option<String>>,
{
    controls.validate()?;
    if !(span >= 0.0) || !span.is_finite() {
        return Err(Error::InvalidArgument(format!("invalid time span {span}")));
    }
    let mut run = Run {
        s: vec![0.0],
        states: vec![y0.clone()],
        stats: StepStats::default(),
        halt: None,
    };
    if span == 0.0 {
        return Ok(run);
    }
    let mut s = 0.0;
    let mut y = y0;
    let mut h = controls
        .fixed_step
        .or(controls.h_init)
        .unwrap_or(1e-3)
        .min(span)
        .min(controls.h_max);
    let fixed = controls.fixed_step.is_some();
    let n_fixed = controls
        .fixed_step
        .map(|hf| ((span / hf).round() as usize).max(1));
    let tiny = 1e-12 * span.max(1.0);
    loop {
        if let Some(nf) = n_fixed {
            if run.stats.accepted == nf {
                return Ok(run);
            }
            h = span / nf as f64;
        } else if span - s <= tiny {
            return Ok(run);
        }
        if run.stats.accepted + run.stats.rejected >= controls.max_steps {
            return Err(Error::StepBudget(controls.max_steps));
        }
        let last = !fixed && s + h >= span - tiny;
        if last {
            h = span - s;
        }
        let (candidate, factor) = if fixed {
            (rk4_step(&mut f, t0, dir, s, &y, h), 1.0)
        } else {
            let full = rk4_step(&mut f, t0, dir, s, &y, h);
            let half = rk4_step(&mut f, t0, dir, s, &y, 0.5 * h)
                .and_then(|m| rk4_step(&mut f, t0, dir, s + 0.5 * h, &m, 0.5 * h));
            match (full, half) {
                (Some(a), Some(b)) => {
                    let err = a
                        .iter()
                        .zip(&b)
                        .zip(&y)
                        .map(|((a, b), y0)| {
                            let scale = controls.atol + controls.rtol * y0.abs().max(b.abs());
                            (a - b).abs() / 15.0 / scale
                        })
                        .fold(0.0f64, f64::max);
                    let factor = if err == 0.0 {
                        5.0
                    } else {
                        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    if err <= 1.0 {
                        (Some(b), factor)
                    } else {
                        (None, factor)
                    }
                }
                _ => (None, 0.25),
            }
        };
        let Some(next) = candidate else {
            run.stats.rejected += 1;
            if fixed {
                return Ok(halted(run, s, s + h, "state left the domain"));
            }
            h *= factor.min(0.9);
            if h < controls.step_floor {
                return Ok(halted(run, s, s + h, "step size underflow"));
            }
            continue;
        };
        let s_next = if last { span } else { s + h };
        if next.iter().any(|v| !(v.abs() <= controls.magnitude_limit)) {
            return Ok(halted(run, s, s_next, "state magnitude exceeded"));
        }
        if let Some(cause) = monitor(t0 + dir * s_next, &next)? {
            return Ok(halted(run, s, s_next, &cause));
        }
        run.stats.accepted += 1;
        s = s_next;
        y = next;
        run.s.push(s);
        run.states.push(y.clone());
        if !fixed {
            h = (h * factor).min(controls.h_max);
            if h < controls.step_floor && span - s > tiny {
                return Ok(halted(run, s, s + h, "step size underflow"));
            }
        }
    }
}

fn halted(mut run: Run, s_good: f64, s_bad: f64, cause: &str) -> Run {
    run.halt = Some(Halt {
        s_good,
        s_bad,
        cause: cause.to_string(),
    });
    run
}
