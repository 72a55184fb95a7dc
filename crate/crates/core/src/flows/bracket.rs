//! Generalized bracket flows `μ̇ = -π(φ)μ`, `Ḣ = -π(φ)H`.

use crate::config::{STRUCTURE_DRIFT_TOL, ZERO_TOL};
use crate::curvature::{closedness_residual, h_squared_neutral, require_closed, ric_orthonormal};
use crate::flows::integrator::{integrate, Controls};
use crate::flows::{
    bracket_labels, pack_bracket_state, unpack_bracket_state, StateKind, Trajectory,
};
use crate::lie::{Endo, LieBracket};
use crate::{Error, KForm, Result};

/// Choice of `φ` in the bracket flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiSpec {
    /// `φ = Ric_μ`.
    Ric,
    /// `φ = Ric_μ - ¼ H²`.
    RicMinusQuarterHsq,
}

impl PhiSpec {
    pub fn phi(self, mu: &LieBracket, h: &KForm) -> Result<Endo> {
        let ric = ric_orthonormal(mu);
        match self {
            PhiSpec::Ric => Ok(ric),
            PhiSpec::RicMinusQuarterHsq => {
                let h2 = h_squared_neutral(h)?;
                Endo::from_matrix(ric.matrix() - h2.matrix() * 0.25)
            }
        }
    }
}

/// Velocities `(-π(φ)μ, -π(φ)H)`.
pub fn gbf_rhs(spec: PhiSpec, mu: &LieBracket, h: &KForm) -> Result<(LieBracket, KForm)> {
    let phi = spec.phi(mu, h)?;
    Ok((
        mu.pi_action(&phi)?.scaled(-1.0),
        h.pi_action(&phi)?.scaled(-1.0),
    ))
}

/// Integrates the bracket flow from a nilpotent `μ₀` and closed `H₀` over
/// `[t_start, t_end]`. The Jacobi residual and `‖d_μ H‖` are checked at every
/// accepted step against [`STRUCTURE_DRIFT_TOL`].
pub fn integrate_gbf(
    spec: PhiSpec,
    mu0: &LieBracket,
    h0: &KForm,
    t_start: f64,
    t_end: f64,
    controls: &Controls,
) -> Result<Trajectory> {
    if !(t_end > t_start) {
        return Err(Error::InvalidArgument(format!(
            "t_end = {t_end} must exceed t_start = {t_start}"
        )));
    }
    if mu0.nilpotency_step()?.is_none() {
        return Err(Error::NotNilpotent);
    }
    require_closed(mu0, h0, ZERO_TOL)?;
    let n = mu0.dim();
    let rhs = |_t: f64, y: &[f64]| -> Option<Vec<f64>> {
        let (mu, h) = unpack_bracket_state(n, y).ok()?;
        let (dmu, dh) = gbf_rhs(spec, &mu, &h).ok()?;
        Some(pack_bracket_state(&dmu, &dh))
    };
    let monitor = |t: f64, y: &[f64]| -> Result<Option<String>> {
        let (mu, h) = unpack_bracket_state(n, y)?;
        let jac = mu.jacobi_residual();
        if jac > STRUCTURE_DRIFT_TOL {
            return Err(Error::StructureDrift {
                t,
                what: "Jacobi residual",
                residual: jac,
                tol: STRUCTURE_DRIFT_TOL,
            });
        }
        let closed = closedness_residual(&mu, &h)?;
        if closed > STRUCTURE_DRIFT_TOL {
            return Err(Error::StructureDrift {
                t,
                what: "|d H|",
                residual: closed,
                tol: STRUCTURE_DRIFT_TOL,
            });
        }
        Ok(None)
    };
    let run = integrate(
        rhs,
        t_start,
        1.0,
        pack_bracket_state(mu0, h0),
        t_end - t_start,
        controls,
        monitor,
    )?;
    if let Some(halt) = run.halt {
        return Err(Error::Blowup {
            t_last: t_start + halt.s_good,
            cause: halt.cause,
        });
    }
    Ok(Trajectory {
        kind: StateKind::Bracket { dim: n },
        labels: bracket_labels(n),
        times: run.s.iter().map(|s| t_start + s).collect(),
        states: run.states,
        stats: run.stats,
    })
}

/// Checks `x² + y² ≤ (1 + a²) / (1 + (1 + a²) t)` at every stored time, with
/// `x = μ_{12}^3`, `y = H_{123}` and a slack of `1e-9`. Times are measured
/// from the first sample. The trajectory must stay in the Heisenberg family
/// `(x e^{12} ⊗ e_3, y e^{123})`.
pub fn gbf_decay_bound_check(traj: &Trajectory, a: f64) -> Result<bool> {
    if traj.kind != (StateKind::Bracket { dim: 3 }) {
        return Err(Error::InvalidArgument(
            "decay bound applies to 3-dimensional bracket trajectories".into(),
        ));
    }
    let xi = traj.column_index("mu_12_3").expect("label present");
    let yi = traj.column_index("H_123").expect("label present");
    let t0 = traj.times.first().copied().unwrap_or(0.0);
    let c = 1.0 + a * a;
    let mut ok = true;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let stray = s
            .iter()
            .enumerate()
            .filter(|&(p, _)| p != xi && p != yi)
            .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        if stray > ZERO_TOL {
            return Err(Error::InvalidArgument(format!(
                "state at t = {t} leaves the Heisenberg family"
            )));
        }
        let (x, y) = (s[xi], s[yi]);
        if x * x + y * y > c / (1.0 + c * (t - t0)) + 1e-9 {
            ok = false;
        }
    }
    Ok(ok)
}
