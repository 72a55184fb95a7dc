//! Left-invariant generalized geometry on simply connected nilpotent Lie groups.
//!
//! Everything is expressed through structure constants on `R^n` with the
//! standard basis `e_1, ..., e_n` (0-based in code):
//!
//! * [`lie`]: brackets `mu_{ij}^k`, endomorphisms, the `GL_n` action and its
//!   differential `pi`, the Chevalley–Eilenberg differential.
//! * [`forms`]: alternating forms stored over increasing index tuples.
//! * [`hodge`]: metrics, Hodge star, codifferential, Hodge Laplacian.
//! * [`curvature`]: Ricci tensors, `H∘H`, Christoffel symbols, the Bismut
//!   term `∇⁺θ` and the generalized Ricci tensor `Rc⁺`.
//! * [`soliton`]: derivation spaces, soliton residuals and least-squares fits.
//! * [`dorfman`]: left-invariant Dorfman brackets on `R^n ⊕ (R^n)*`.
//! * [`flows`]: generalized bracket flows, the gauge-fixed generalized Ricci
//!   flow, blowup detection and `T_min` sweeps.
//! * [`io`]: JSON problem files, built-in fixtures, CSV and SVG output.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod curvature;
pub mod dorfman;
mod error;
pub mod flows;
pub mod forms;
pub mod hodge;
pub mod io;
pub mod lie;
pub mod soliton;

pub use error::{Error, Result};
pub use forms::KForm;
pub use hodge::{Metric, Orientation};
pub use lie::{Endo, LieBracket};
