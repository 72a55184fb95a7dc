//! Structure constants of skew-symmetric brackets on `R^n` and the linear
//! algebra around them.
//!
//! A bracket is stored densely as `mu_{ij}^k` with `mu(e_i, e_j) = mu_{ij}^k e_k`.
//! Endomorphisms are ordinary matrices acting on column vectors, so column
//! `i` of an [`Endo`] is `φ(e_i)`; in index notation `φ(e_i) = φ_i^j e_j`
//! means `φ_i^j = matrix[(j, i)]`.

use nalgebra::{DMatrix, DVector};

use crate::config::{MAX_CONDITION, RANK_REL_TOL, ZERO_TOL};
use crate::forms::{combinations, KForm};
use crate::{Error, Result};

/// An element of `gl_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Endo(DMatrix<f64>);

impl Endo {
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("endomorphism"));
        }
        Ok(Self(m))
    }

    /// Row-major square array.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// `φ_i^j`, the `e_j` component of `φ(e_i)`.
    pub fn component(&self, i: usize, j: usize) -> f64 {
        self.0[(j, i)]
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (&self.0 * DVector::from_column_slice(v))
            .as_slice()
            .to_vec()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect()
    }

    /// Inverse, rejecting matrices whose 2-norm condition number exceeds
    /// [`MAX_CONDITION`].
    pub fn checked_inverse(&self) -> Result<DMatrix<f64>> {
        let sv = self.0.singular_values();
        let smax = sv.max();
        let smin = sv.min();
        let condition = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };
        if !(condition <= MAX_CONDITION) {
            return Err(Error::Singular { condition });
        }
        self.0
            .clone()
            .try_inverse()
            .ok_or(Error::Singular { condition })
    }
}

/// Structure constants `mu_{ij}^k` of a skew-symmetric bracket on `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieBracket {
    dim: usize,
    coeffs: Vec<f64>,
}

impl LieBracket {
    #[inline]
    fn at(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    /// The abelian bracket on `R^n`.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            coeffs: vec![0.0; dim * dim * dim],
        }
    }

    /// The 3-dimensional Heisenberg bracket `mu = e^1 ∧ e^2 ⊗ e_3`.
    pub fn heisenberg3() -> Self {
        Self::heisenberg(1)
    }

    /// The `(2m+1)`-dimensional Heisenberg bracket `mu(e_i, e_{i+m}) = e_{2m+1}`.
    pub fn heisenberg(m: usize) -> Self {
        let n = 2 * m + 1;
        let entries: Vec<_> = (0..m).map(|i| (i, i + m, n - 1, 1.0)).collect();
        Self::from_entries(n, &entries).expect("Heisenberg entries are consistent")
    }

    /// Builds a bracket from `(i, j, k, value)` entries (0-based) meaning
    /// `mu_{ij}^k = value`; the `(j, i)` entry is completed by skew symmetry.
    /// Entries that name the same constant must agree.
    pub fn from_entries(dim: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut out = Self::zero(dim);
        let mut seen = vec![false; out.coeffs.len()];
        for &(i, j, k, v) in entries {
            for idx in [i, j, k] {
                if idx >= dim {
                    return Err(Error::IndexOutOfRange { index: idx, dim });
                }
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("structure constant"));
            }
            if i == j {
                if v != 0.0 {
                    return Err(Error::SkewViolation(format!(
                        "mu_{{{}{}}}^{} must vanish",
                        i + 1,
                        j + 1,
                        k + 1
                    )));
                }
                continue;
            }
            let (a, b, s) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
            let p = out.at(a, b, k);
            if seen[p] && out.coeffs[p] != s * v {
                return Err(Error::SkewViolation(format!(
                    "mu_{{{}{}}}^{} given inconsistently",
                    a + 1,
                    b + 1,
                    k + 1
                )));
            }
            seen[p] = true;
            out.coeffs[p] = s * v;
            let q = out.at(b, a, k);
            out.coeffs[q] = -s * v;
        }
        Ok(out)
    }

    /// Builds a bracket from a dense `n^3` tensor, which must be skew in its
    /// first two indices to `1e-12`.
    pub fn from_tensor(dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("structure constants"));
        }
        let out = Self { dim, coeffs };
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let a = out.get(i, j, k);
                    let b = out.get(j, i, k);
                    if (a + b).abs() > 1e-12 * (1.0 + a.abs()) {
                        return Err(Error::SkewViolation(format!(
                            "mu_{{{}{}}}^{} = {a} but mu_{{{}{}}}^{} = {b}",
                            i + 1,
                            j + 1,
                            k + 1,
                            j + 1,
                            i + 1,
                            k + 1
                        )));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.coeffs[self.at(i, j, k)]
    }

    /// Dense tensor, index `(i * n + j) * n + k`.
    pub fn tensor(&self) -> &[f64] {
        &self.coeffs
    }

    /// Nonzero constants with `i < j`, 0-based.
    pub fn entries(&self) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    if v != 0.0 {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let c = x[i] * y[j];
                if c == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += c * self.get(i, j, k);
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Result<Self> {
        self.check_dim(other.dim)?;
        Ok(Self {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + s * b)
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.add_scaled(other, -1.0)?.max_abs())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }

    /// Largest sup-norm of the Jacobiator over basis triples; zero exactly
    /// when the bracket satisfies the Jacobi identity.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        // mu(mu(e_i, e_j), e_k)
        let double = |i: usize, j: usize, k: usize, out: &mut [f64]| {
            for l in 0..n {
                let c = self.get(i, j, l);
                if c != 0.0 {
                    for (m, o) in out.iter_mut().enumerate() {
                        *o += c * self.get(l, k, m);
                    }
                }
            }
        };
        let mut acc = vec![0.0; n];
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    acc.iter_mut().for_each(|a| *a = 0.0);
                    double(i, j, k, &mut acc);
                    double(j, k, i, &mut acc);
                    double(k, i, j, &mut acc);
                    worst = acc.iter().fold(worst, |m, a| m.max(a.abs()));
                }
            }
        }
        worst
    }

    fn require_lie(&self, tol: f64) -> Result<()> {
        let residual = self.jacobi_residual();
        if residual > tol {
            return Err(Error::NotLie { residual, tol });
        }
        Ok(())
    }

    /// Step of nilpotency: the first `s` with `C^s g = 0` in the lower
    /// central series `C^0 g = g`, `C^{m+1} g = [g, C^m g]`. `None` when the
    /// series stabilizes above zero.
    ///
    /// Ranks are decided by singular values above `RANK_REL_TOL` times the
    /// larger of the largest singular value and the largest structure constant.
    pub fn nilpotency_step(&self) -> Result<Option<usize>> {
        self.nilpotency_step_with(ZERO_TOL)
    }

    pub fn nilpotency_step_with(&self, tol: f64) -> Result<Option<usize>> {
        self.require_lie(tol)?;
        let n = self.dim;
        let scale = self.max_abs();
        let mut basis: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        let mut step = 0;
        loop {
            step += 1;
            let mut spanning = Vec::with_capacity(n * basis.len());
            for i in 0..n {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                for v in &basis {
                    spanning.push(self.bracket(&e, v));
                }
            }
            let next = orthonormal_span(n, &spanning, scale);
            if next.is_empty() {
                return Ok(Some(step));
            }
            if next.len() == basis.len() {
                return Ok(None);
            }
            basis = next;
        }
    }

    /// Chevalley–Eilenberg differential
    /// `(dω)(X_0..X_k) = Σ_{p<q} (-1)^{p+q} ω(mu(X_p, X_q), X_0, ..^p..^q.., X_k)`.
    ///
    /// For a top-degree form the result is the (empty) form of degree `n + 1`.
    pub fn ce_differential(&self, form: &KForm) -> Result<KForm> {
        let n = self.dim;
        self.check_dim(form.dim())?;
        let k = form.degree();
        if k > n {
            return Err(Error::DegreeOutOfRange { degree: k, dim: n });
        }
        let mut out = KForm::zero(n, k + 1);
        if k == 0 || k == n {
            // d of a constant vanishes; degree n + 1 is the zero space
            return Ok(out);
        }
        let mut coeffs = vec![0.0; out.coeffs().len()];
        let mut slots = vec![0usize; k];
        for (r, idx) in combinations(n, k + 1).into_iter().enumerate() {
            let mut acc = 0.0;
            for p in 0..=k {
                for q in p + 1..=k {
                    let sign = if (p + q) % 2 == 0 { 1.0 } else { -1.0 };
                    let rest = idx
                        .iter()
                        .enumerate()
                        .filter(|&(m, _)| m != p && m != q)
                        .map(|(_, &v)| v);
                    for (s, v) in slots[1..].iter_mut().zip(rest) {
                        *s = v;
                    }
                    for l in 0..n {
                        let c = self.get(idx[p], idx[q], l);
                        if c != 0.0 {
                            slots[0] = l;
                            acc += sign * c * form.get(&slots);
                        }
                    }
                }
            }
            coeffs[r] = acc;
        }
        out = KForm::from_packed(n, k + 1, coeffs)?;
        Ok(out)
    }

    /// `(A·mu)(X, Y) = A mu(A^{-1} X, A^{-1} Y)`.
    pub fn gl_action(&self, a: &Endo) -> Result<Self> {
        self.check_dim(a.dim())?;
        let inv = a.checked_inverse()?;
        Ok(self.change_basis(a.matrix(), &inv))
    }

    /// The `GL_n` action with a precomputed inverse and no conditioning check.
    pub(crate) fn change_basis(&self, a: &DMatrix<f64>, inv: &DMatrix<f64>) -> Self {
        let n = self.dim;
        let mut s = vec![0.0; n * n * n];
        // s[i][q][r] = Σ_p inv[p][i] mu[p][q][r]
        for i in 0..n {
            for p in 0..n {
                let b = inv[(p, i)];
                if b == 0.0 {
                    continue;
                }
                for q in 0..n {
                    for r in 0..n {
                        s[(i * n + q) * n + r] += b * self.get(p, q, r);
                    }
                }
            }
        }
        let mut t = vec![0.0; n * n * n];
        // t[i][j][r] = Σ_q inv[q][j] s[i][q][r]
        for i in 0..n {
            for j in 0..n {
                for q in 0..n {
                    let b = inv[(q, j)];
                    if b == 0.0 {
                        continue;
                    }
                    for r in 0..n {
                        t[(i * n + j) * n + r] += b * s[(i * n + q) * n + r];
                    }
                }
            }
        }
        let mut out = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = 0.0;
                    for r in 0..n {
                        acc += a[(k, r)] * t[(i * n + j) * n + r];
                    }
                    out[(i * n + j) * n + k] = acc;
                }
            }
        }
        Self {
            dim: n,
            coeffs: out,
        }
    }

    /// Differential of the `GL_n` action,
    /// `(π(φ)mu)(X, Y) = φ mu(X, Y) - mu(φX, Y) - mu(X, φY)`.
    pub fn pi_action(&self, phi: &Endo) -> Result<Self> {
        self.check_dim(phi.dim())?;
        let n = self.dim;
        let m = phi.matrix();
        let mut out = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = 0.0;
                    for l in 0..n {
                        // φ_l^k mu_{ij}^l - φ_i^l mu_{lj}^k - φ_j^l mu_{il}^k
                        acc += m[(k, l)] * self.get(i, j, l)
                            - m[(l, i)] * self.get(l, j, k)
                            - m[(l, j)] * self.get(i, l, k);
                    }
                    out[(i * n + j) * n + k] = acc;
                }
            }
        }
        Ok(Self {
            dim: n,
            coeffs: out,
        })
    }
}

impl KForm {
    /// `A·ω = (A^{-1})^* ω`, i.e. `(A·ω)(X_1..X_k) = ω(A^{-1}X_1, .., A^{-1}X_k)`.
    pub fn gl_action(&self, a: &Endo) -> Result<KForm> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        let inv = a.checked_inverse()?;
        Ok(self.pullback(&inv))
    }

    /// `(B^* ω)(X_1..X_k) = ω(B X_1, .., B X_k)`, via `k × k` minors of `B`.
    pub(crate) fn pullback(&self, b: &DMatrix<f64>) -> KForm {
        let n = self.dim();
        let k = self.degree();
        let tuples = combinations(n, k);
        let mut coeffs = vec![0.0; tuples.len()];
        for (r, cols) in tuples.iter().enumerate() {
            let mut acc = 0.0;
            for (rows, w) in tuples.iter().zip(self.coeffs()) {
                if *w == 0.0 {
                    continue;
                }
                let minor = DMatrix::from_fn(k, k, |p, q| b[(rows[p], cols[q])]);
                acc += w * minor.determinant();
            }
            coeffs[r] = acc;
        }
        KForm::from_packed(n, k, coeffs).expect("shape preserved")
    }

    /// Differential of the `GL_n` action on forms,
    /// `π(φ)ω = -Σ_slots ω(.., φ·, ..)`.
    pub fn pi_action(&self, phi: &Endo) -> Result<KForm> {
        let n = self.dim();
        if phi.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: phi.dim(),
            });
        }
        let m = phi.matrix();
        let k = self.degree();
        let tuples = combinations(n, k);
        let mut coeffs = vec![0.0; tuples.len()];
        let mut slots = vec![0usize; k];
        for (r, idx) in tuples.iter().enumerate() {
            let mut acc = 0.0;
            for s in 0..k {
                slots.copy_from_slice(idx);
                for l in 0..n {
                    let c = m[(l, idx[s])];
                    if c != 0.0 {
                        slots[s] = l;
                        acc -= c * self.get(&slots);
                    }
                }
            }
            coeffs[r] = acc;
        }
        Ok(KForm::from_packed(n, k, coeffs).expect("shape preserved"))
    }
}

/// Orthonormal basis of the span of `vectors`, dropping directions whose
/// singular value is below `RANK_REL_TOL * max(σ_max, scale)`.
fn orthonormal_span(n: usize, vectors: &[Vec<f64>], scale: f64) -> Vec<Vec<f64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = DMatrix::from_fn(n, vectors.len(), |r, c| vectors[c][r]);
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let threshold = RANK_REL_TOL * smax.max(scale);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s > threshold && s > 0.0)
        .map(|(c, _)| u.column(c).iter().copied().collect())
        .collect()
}
