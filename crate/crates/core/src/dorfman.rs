//! Left-invariant Dorfman brackets on `R^n ⊕ (R^n)^*`.
//!
//! A pair `(μ, H)` with `μ` a Lie bracket and `d_μ H = 0` determines
//!
//! ```text
//! [X + ξ, Y + η] = μ(X, Y) - η∘μ(X, ·) + ξ∘μ(Y, ·) + H(X, Y, ·)
//! ```
//!
//! Generalized basis vectors are numbered `0..n` for `e_i` and `n..2n` for
//! the dual covectors `e^i`.

use crate::config::ZERO_TOL;
use crate::curvature::{closedness_residual, require_closed};
use crate::lie::{Endo, LieBracket};
use crate::{Error, KForm, Result};

/// An element `X + ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedVector {
    pub vec: Vec<f64>,
    pub covec: Vec<f64>,
}

impl GeneralizedVector {
    pub fn new(vec: Vec<f64>, covec: Vec<f64>) -> Result<Self> {
        if vec.len() != covec.len() {
            return Err(Error::DimensionMismatch {
                expected: vec.len(),
                found: covec.len(),
            });
        }
        if vec.iter().chain(&covec).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("generalized vector"));
        }
        Ok(Self { vec, covec })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            vec: vec![0.0; n],
            covec: vec![0.0; n],
        }
    }

    /// Basis element `alpha` of `R^n ⊕ (R^n)^*`.
    pub fn basis(n: usize, alpha: usize) -> Self {
        let mut z = Self::zero(n);
        if alpha < n {
            z.vec[alpha] = 1.0;
        } else {
            z.covec[alpha - n] = 1.0;
        }
        z
    }

    pub fn dim(&self) -> usize {
        self.vec.len()
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        let f = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + s * y).collect();
        Self {
            vec: f(&self.vec, &other.vec),
            covec: f(&self.covec, &other.covec),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.vec
            .iter()
            .chain(&self.covec)
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `X + ξ ↦ AX + ξ∘A⁻¹`.
    pub fn gl_transform(&self, a: &Endo) -> Result<Self> {
        let inv = a.checked_inverse()?;
        let covec = (0..self.dim())
            .map(|j| (0..self.dim()).map(|i| self.covec[i] * inv[(i, j)]).sum())
            .collect();
        Ok(Self {
            vec: a.apply(&self.vec),
            covec,
        })
    }
}

/// `⟨X + ξ, Y + η⟩ = ½ (η(X) + ξ(Y))`.
pub fn neutral_pairing(z1: &GeneralizedVector, z2: &GeneralizedVector) -> f64 {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    0.5 * (dot(&z2.covec, &z1.vec) + dot(&z1.covec, &z2.vec))
}

/// The Dorfman bracket of a pair `(μ, H)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DorfmanBracket {
    mu: LieBracket,
    h: KForm,
}

impl DorfmanBracket {
    /// Requires `μ` to satisfy Jacobi and `H` to be `d_μ`-closed, both to
    /// [`ZERO_TOL`].
    pub fn new(mu: LieBracket, h: KForm) -> Result<Self> {
        let residual = mu.jacobi_residual();
        if residual > ZERO_TOL {
            return Err(Error::NotLie {
                residual,
                tol: ZERO_TOL,
            });
        }
        require_closed(&mu, &h, ZERO_TOL)?;
        Ok(Self { mu, h })
    }

    /// Skips the Lie and closedness checks; the bracket may then fail the
    /// Jacobi identity. Only the shapes are checked.
    pub fn new_unchecked(mu: LieBracket, h: KForm) -> Result<Self> {
        closedness_residual(&mu, &h)?;
        Ok(Self { mu, h })
    }

    pub fn mu(&self) -> &LieBracket {
        &self.mu
    }

    pub fn h(&self) -> &KForm {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.mu.dim()
    }

    pub fn eval(&self, z1: &GeneralizedVector, z2: &GeneralizedVector) -> GeneralizedVector {
        let n = self.dim();
        let vec = self.mu.bracket(&z1.vec, &z2.vec);
        let mut covec = vec![0.0; n];
        for (m, c) in covec.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..n {
                for k in 0..n {
                    acc += -z2.covec[k] * z1.vec[i] * self.mu.get(i, m, k)
                        + z1.covec[k] * z2.vec[i] * self.mu.get(i, m, k);
                }
                for j in 0..n {
                    let x = z1.vec[i] * z2.vec[j];
                    if x != 0.0 {
                        acc += x * self.h.get(&[i, j, m]);
                    }
                }
            }
            *c = acc;
        }
        GeneralizedVector { vec, covec }
    }

    /// Structure constants `2⟨[e_α, e_β], e_γ⟩` obtained by evaluating the
    /// bracket on basis pairs.
    pub fn table(&self) -> DorfmanTable {
        let n = self.dim();
        let mut t = DorfmanTable::zero(n);
        for a in 0..2 * n {
            for b in 0..2 * n {
                let w = self.eval(
                    &GeneralizedVector::basis(n, a),
                    &GeneralizedVector::basis(n, b),
                );
                for c in 0..2 * n {
                    let v = 2.0 * neutral_pairing(&w, &GeneralizedVector::basis(n, c));
                    t.set(a, b, c, v);
                }
            }
        }
        t
    }

    pub fn total_skew_residual(&self) -> f64 {
        self.table().total_skew_residual()
    }

    /// Largest sup-norm of `[z1,[z2,z3]] - [[z1,z2],z3] - [z2,[z1,z3]]` over
    /// basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim();
        let basis: Vec<_> = (0..2 * n).map(|a| GeneralizedVector::basis(n, a)).collect();
        let mut worst: f64 = 0.0;
        for z1 in &basis {
            for z2 in &basis {
                let z12 = self.eval(z1, z2);
                for z3 in &basis {
                    let lhs = self.eval(z1, &self.eval(z2, z3));
                    let r = lhs
                        .add_scaled(&self.eval(&z12, z3), -1.0)
                        .add_scaled(&self.eval(z2, &self.eval(z1, z3)), -1.0);
                    worst = worst.max(r.max_abs());
                }
            }
        }
        worst
    }

    /// `‖d_μ H‖_∞`.
    pub fn closedness_residual(&self) -> f64 {
        closedness_residual(&self.mu, &self.h).expect("shape checked at construction")
    }
}

/// Dense `(2n)³` table of Dorfman structure constants.
#[derive(Clone, Debug, PartialEq)]
pub struct DorfmanTable {
    n: usize,
    coeffs: Vec<f64>,
}

impl DorfmanTable {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            coeffs: vec![0.0; 8 * n * n * n],
        }
    }

    /// The table read off directly from `(μ, H)`: the unbarred triple is
    /// `H_{ijk}`, one barred slot gives `μ_{ij}^k` with the barred index in
    /// last position, extended by total skew symmetry.
    pub fn from_pair(mu: &LieBracket, h: &KForm) -> Self {
        let n = mu.dim();
        let mut t = Self::zero(n);
        let mut put = |a: usize, b: usize, c: usize, v: f64| {
            for (p, s) in [
                ((a, b, c), 1.0),
                ((b, c, a), 1.0),
                ((c, a, b), 1.0),
                ((b, a, c), -1.0),
                ((a, c, b), -1.0),
                ((c, b, a), -1.0),
            ] {
                t.set(p.0, p.1, p.2, s * v);
            }
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    put(i, j, n + k, mu.get(i, j, k));
                    put(i, j, k, h.get(&[i, j, k]));
                }
            }
        }
        t
    }

    fn at(&self, a: usize, b: usize, c: usize) -> usize {
        let m = 2 * self.n;
        (a * m + b) * m + c
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.coeffs[self.at(a, b, c)]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        let p = self.at(a, b, c);
        self.coeffs[p] = v;
    }

    /// Bracket of basis elements reconstructed from the table.
    pub fn bracket_basis(&self, a: usize, b: usize) -> GeneralizedVector {
        let n = self.n;
        GeneralizedVector {
            vec: (0..n).map(|k| self.get(a, b, n + k)).collect(),
            covec: (0..n).map(|k| self.get(a, b, k)).collect(),
        }
    }

    /// Largest deviation from alternation under the transpositions of the
    /// first two and of the last two slots.
    pub fn total_skew_residual(&self) -> f64 {
        let m = 2 * self.n;
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let v = self.get(a, b, c);
                    worst = worst
                        .max((v + self.get(b, a, c)).abs())
                        .max((v + self.get(a, c, b)).abs());
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}
