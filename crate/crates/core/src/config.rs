//! Numeric defaults in one place. Every value here can be overridden through
//! the corresponding struct field or CLI flag.
//!
//! | constant | value | used by |
//! |---|---|---|
//! | [`ZERO_TOL`] | 1e-9 | Jacobi / closedness / derivation checks |
//! | [`RANK_REL_TOL`] | 1e-9 | singular-value rank decisions (relative) |
//! | [`RTOL`], [`ATOL`] | 1e-9, 1e-10 | adaptive RK4 error control |
//! | [`STRUCTURE_DRIFT_TOL`] | 1e-7 | invariants along bracket flows |
//! | [`SOLITON_TOL`] | 1e-8 | soliton acceptance |
//! | [`BLOWUP_MAGNITUDE`] | 1e8 | blowup: state magnitude |
//! | [`BLOWUP_EIGEN_FLOOR`] | 1e-10 | blowup: smallest metric eigenvalue |
//! | [`BLOWUP_STEP_FLOOR`] | 1e-13 | blowup: smallest accepted step |
//! | [`BLOWUP_BISECT_TOL`] | 1e-5 | blowup time bracketing |
//! | [`BLOWUP_HORIZON`] | 1e3 | default search horizon |

pub const ZERO_TOL: f64 = 1e-9;
pub const RANK_REL_TOL: f64 = 1e-9;
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Largest condition number accepted for `GL_n` elements.
pub const MAX_CONDITION: f64 = 1e13;

pub const RTOL: f64 = 1e-9;
pub const ATOL: f64 = 1e-10;
pub const MAX_STEPS: usize = 2_000_000;
pub const STRUCTURE_DRIFT_TOL: f64 = 1e-7;

pub const SOLITON_TOL: f64 = 1e-8;

pub const BLOWUP_MAGNITUDE: f64 = 1e8;
pub const BLOWUP_EIGEN_FLOOR: f64 = 1e-10;
pub const BLOWUP_STEP_FLOOR: f64 = 1e-13;
pub const BLOWUP_BISECT_TOL: f64 = 1e-5;
pub const BLOWUP_HORIZON: f64 = 1e3;
/// Forward time used by `T_min` sweeps to estimate `lim g_3`.
pub const SWEEP_FORWARD_TIME: f64 = 1e3;
