//! Flows on structure constants and on left-invariant data.
//!
//! * [`bracket`]: generalized bracket flows `μ̇ = -π(φ)μ`, `Ḣ = -π(φ)H`.
//! * [`ricci`]: the gauge-fixed generalized Ricci flow
//!   `ġ = -2 Rc + ½ H∘H`, `Ḣ = -Δ_g H`, blowup times and `T_min` sweeps.
//! * [`integrator`]: the adaptive RK4 driver shared by both.

pub mod bracket;
pub mod integrator;
pub mod ricci;

pub use bracket::{gbf_decay_bound_check, gbf_rhs, integrate_gbf, PhiSpec};
pub use integrator::{Controls, StepStats};
pub use ricci::{
    blowup_time, grf_rhs, integrate_grf, tmin_sweep, BlowupOutcome, GrfState, SweepRow,
};

use crate::hodge::Metric;
use crate::lie::LieBracket;
use crate::{Error, KForm, Result};

/// What a trajectory's state vector encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateKind {
    /// `μ_{ij}^k` for `i < j`, then the coefficients of `H`.
    Bracket { dim: usize },
    /// `g_{ij}` for `i ≤ j`, then the coefficients of `H`.
    Metric { dim: usize },
}

/// Time-stamped flow states with column labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub kind: StateKind,
    pub labels: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn column_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn column(&self, label: &str) -> Option<Vec<f64>> {
        let c = self.column_index(label)?;
        Some(self.states.iter().map(|s| s[c]).collect())
    }

    pub fn bracket_state(&self, i: usize) -> Result<(LieBracket, KForm)> {
        match self.kind {
            StateKind::Bracket { dim } => unpack_bracket_state(dim, &self.states[i]),
            StateKind::Metric { .. } => Err(Error::InvalidArgument(
                "trajectory holds metrics, not brackets".into(),
            )),
        }
    }

    pub fn metric_state(&self, i: usize) -> Result<(Metric, KForm)> {
        match self.kind {
            StateKind::Metric { dim } => {
                let (g, h) = unpack_metric_state(dim, &self.states[i])?;
                Ok((Metric::new(g)?, h))
            }
            StateKind::Bracket { .. } => Err(Error::InvalidArgument(
                "trajectory holds brackets, not metrics".into(),
            )),
        }
    }
}

fn h_labels(dim: usize) -> impl Iterator<Item = String> {
    crate::forms::combinations(dim, 3)
        .into_iter()
        .map(|t| format!("H_{}{}{}", t[0] + 1, t[1] + 1, t[2] + 1))
}

pub(crate) fn bracket_labels(dim: usize) -> Vec<String> {
    let mut out = Vec::new();
    for i in 0..dim {
        for j in i + 1..dim {
            for k in 0..dim {
                out.push(format!("mu_{}{}_{}", i + 1, j + 1, k + 1));
            }
        }
    }
    out.extend(h_labels(dim));
    out
}

pub(crate) fn metric_labels(dim: usize) -> Vec<String> {
    let mut out = Vec::new();
    for i in 0..dim {
        for j in i..dim {
            if i == j {
                out.push(format!("g_{}", i + 1));
            } else {
                out.push(format!("g_{}_{}", i + 1, j + 1));
            }
        }
    }
    out.extend(h_labels(dim));
    out
}

pub(crate) fn pack_bracket_state(mu: &LieBracket, h: &KForm) -> Vec<f64> {
    let n = mu.dim();
    let mut out = Vec::with_capacity(n * n * (n - 1) / 2 + h.coeffs().len());
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                out.push(mu.get(i, j, k));
            }
        }
    }
    out.extend_from_slice(h.coeffs());
    out
}

pub(crate) fn unpack_bracket_state(dim: usize, y: &[f64]) -> Result<(LieBracket, KForm)> {
    let mut entries = Vec::new();
    let mut p = 0;
    for i in 0..dim {
        for j in i + 1..dim {
            for k in 0..dim {
                entries.push((i, j, k, y[p]));
                p += 1;
            }
        }
    }
    let mu = LieBracket::from_entries(dim, &entries)?;
    let h = KForm::from_packed(dim, 3, y[p..].to_vec())?;
    Ok((mu, h))
}

pub(crate) fn pack_metric_state(g: &Metric, h: &KForm) -> Vec<f64> {
    let n = g.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            out.push(g.get(i, j));
        }
    }
    out.extend_from_slice(h.coeffs());
    out
}

pub(crate) fn unpack_metric_state(
    dim: usize,
    y: &[f64],
) -> Result<(nalgebra::DMatrix<f64>, KForm)> {
    let mut g = nalgebra::DMatrix::zeros(dim, dim);
    let mut p = 0;
    for i in 0..dim {
        for j in i..dim {
            g[(i, j)] = y[p];
            g[(j, i)] = y[p];
            p += 1;
        }
    }
    let h = KForm::from_packed(dim, 3, y[p..].to_vec())?;
    Ok((g, h))
}
