//! Metric exterior algebra on `(R^n)^*`: induced inner products, Hodge star,
//! codifferential and Hodge Laplacian of left-invariant forms.

use nalgebra::DMatrix;

use crate::config::SYMMETRY_TOL;
use crate::forms::{combinations, rank, shuffle_sign, KForm};
use crate::lie::{Endo, LieBracket};
use crate::{Error, Result};

/// A positive-definite inner product on `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    g: DMatrix<f64>,
    inv: DMatrix<f64>,
    det: f64,
}

impl Metric {
    /// Validates symmetry (to `1e-12` relative to the largest entry) and
    /// positive definiteness. The stored matrix is exactly symmetrized.
    pub fn new(g: DMatrix<f64>) -> Result<Self> {
        if !g.is_square() {
            return Err(Error::DimensionMismatch {
                expected: g.nrows(),
                found: g.ncols(),
            });
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("metric"));
        }
        let asym = (&g - g.transpose()).amax();
        if asym > SYMMETRY_TOL * g.amax().max(1.0) {
            return Err(Error::NotPositiveDefinite(format!("asymmetry {asym:e}")));
        }
        let g = (&g + g.transpose()) * 0.5;
        let chol = g
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite("Cholesky factorization failed".into()))?;
        let det = chol.l_dirty().diagonal().iter().map(|d| d * d).product();
        let inv = chol.inverse();
        Ok(Self { g, inv, det })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n)).expect("identity is SPD")
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(
            &nalgebra::DVector::from_column_slice(d),
        ))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// `g^{ij}`.
    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inv
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.g[(i, j)]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.g.symmetric_eigenvalues().min()
    }

    /// `g(X, Y)`.
    pub fn apply(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += x[i] * self.g[(i, j)] * y[j];
            }
        }
        acc
    }

    /// Metric dual `g^{-1} ξ` of a 1-form.
    pub fn raise(&self, xi: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.inv[(i, j)] * xi[j]).sum())
            .collect()
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

/// Orientation relative to `e_1 ∧ ... ∧ e_n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Orientation {
    #[default]
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }
}

/// Gram matrix `⟨e^I, e^J⟩ = det(g^{-1}[I, J])` of the induced metric on
/// `Λ^k`.
fn gram(g: &Metric, k: usize) -> DMatrix<f64> {
    let tuples = combinations(g.dim(), k);
    let m = tuples.len();
    let inv = g.inverse();
    DMatrix::from_fn(m, m, |a, b| {
        let (i, j) = (&tuples[a], &tuples[b]);
        DMatrix::from_fn(k, k, |p, q| inv[(i[p], j[q])]).determinant()
    })
}

fn check_form(g: &Metric, form: &KForm) -> Result<()> {
    g.check_dim(form.dim())?;
    if form.degree() > form.dim() {
        return Err(Error::DegreeOutOfRange {
            degree: form.degree(),
            dim: form.dim(),
        });
    }
    Ok(())
}

/// Induced inner product on `k`-forms.
pub fn form_inner(g: &Metric, alpha: &KForm, beta: &KForm) -> Result<f64> {
    check_form(g, alpha)?;
    check_form(g, beta)?;
    if alpha.degree() != beta.degree() {
        return Err(Error::DegreeOutOfRange {
            degree: beta.degree(),
            dim: beta.dim(),
        });
    }
    let gm = gram(g, alpha.degree());
    let a = nalgebra::DVector::from_column_slice(alpha.coeffs());
    let b = nalgebra::DVector::from_column_slice(beta.coeffs());
    Ok(a.dot(&(gm * b)))
}

/// Hodge star, characterized by `α ∧ ⋆β = ⟨α, β⟩ vol` with
/// `vol = o √det g e^{1..n}`.
pub fn hodge_star(g: &Metric, o: Orientation, beta: &KForm) -> Result<KForm> {
    check_form(g, beta)?;
    let n = g.dim();
    let k = beta.degree();
    let gm = gram(g, k);
    let raised = gm * nalgebra::DVector::from_column_slice(beta.coeffs());
    let scale = o.sign() * g.det().sqrt();
    let mut coeffs = vec![0.0; crate::forms::binomial(n, n - k)];
    for (r, idx) in combinations(n, k).iter().enumerate() {
        if raised[r] == 0.0 {
            continue;
        }
        let comp: Vec<usize> = (0..n).filter(|i| !idx.contains(i)).collect();
        let s = shuffle_sign(idx, &comp) as f64;
        coeffs[rank(n, &comp)] += scale * s * raised[r];
    }
    KForm::from_packed(n, n - k, coeffs)
}

/// Codifferential `d* = (-1)^{n(k+1)+1} ⋆ d ⋆`, the formal adjoint of `d`
/// on unimodular algebras.
pub fn codifferential(mu: &LieBracket, g: &Metric, o: Orientation, form: &KForm) -> Result<KForm> {
    check_form(g, form)?;
    let n = g.dim();
    let k = form.degree();
    if k == 0 {
        return Err(Error::DegreeOutOfRange { degree: 0, dim: n });
    }
    let star = hodge_star(g, o, form)?;
    let d = mu.ce_differential(&star)?;
    let out = hodge_star(g, o, &d)?;
    let sign = if (n * (k + 1) + 1).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    Ok(out.scaled(sign))
}

/// Hodge Laplacian `d d* + d* d`; terms whose intermediate degree leaves
/// `0..=n` are absent.
pub fn hodge_laplacian(mu: &LieBracket, g: &Metric, o: Orientation, form: &KForm) -> Result<KForm> {
    check_form(g, form)?;
    let n = g.dim();
    let k = form.degree();
    let mut out = KForm::zero(n, k);
    if k >= 1 {
        let dd = mu.ce_differential(&codifferential(mu, g, o, form)?)?;
        out = out.add_scaled(&dd, 1.0)?;
    }
    if k < n {
        let dd = codifferential(mu, g, o, &mu.ce_differential(form)?)?;
        out = out.add_scaled(&dd, 1.0)?;
    }
    Ok(out)
}

/// Upper-triangular `h` with `g = hᵀ h`.
pub fn orthonormalize(g: &Metric) -> Endo {
    let chol = g
        .matrix()
        .clone()
        .cholesky()
        .expect("validated metric is positive definite");
    Endo::from_matrix(chol.unpack().transpose()).expect("finite factor")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, idx: &[usize]) -> KForm {
        KForm::basis(n, idx).unwrap()
    }

    #[test]
    fn inner_examples() {
        let id = Metric::identity(3);
        assert_eq!(
            form_inner(&id, &e(3, &[0, 1]), &e(3, &[0, 1])).unwrap(),
            1.0
        );
        assert_eq!(form_inner(&id, &e(3, &[0]), &e(3, &[1])).unwrap(), 0.0);
        let g = Metric::diagonal(&[4.0, 1.0, 1.0]).unwrap();
        assert_eq!(form_inner(&g, &e(3, &[0]), &e(3, &[0])).unwrap(), 0.25);
    }

    #[test]
    fn star_examples() {
        let id = Metric::identity(3);
        let o = Orientation::default();
        assert_eq!(hodge_star(&id, o, &e(3, &[0])).unwrap(), e(3, &[1, 2]));
        assert_eq!(
            hodge_star(&id, o, &e(3, &[1])).unwrap(),
            e(3, &[0, 2]).scaled(-1.0)
        );
        assert_eq!(
            hodge_star(&id, o, &e(3, &[0, 1, 2])).unwrap(),
            KForm::scalar(3, 1.0)
        );
        let g = Metric::diagonal(&[2.0, 2.0, 5.0]).unwrap();
        let top = hodge_star(&g, o, &e(3, &[0, 1, 2])).unwrap();
        assert!((top.get(&[]) - 1.0 / (2.0 * 5f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn codifferential_examples() {
        let mu = LieBracket::heisenberg3();
        let id = Metric::identity(3);
        let o = Orientation::default();
        let d = codifferential(&mu, &id, o, &e(3, &[0, 1])).unwrap();
        assert_eq!(d, e(3, &[2]).scaled(-1.0));
        let g = Metric::diagonal(&[0.3, 2.0, 7.0]).unwrap();
        let top = codifferential(&mu, &g, o, &e(3, &[0, 1, 2])).unwrap();
        assert!(top.is_zero());
        assert!(codifferential(&mu, &id, o, &KForm::zero(3, 2))
            .unwrap()
            .is_zero());
        assert!(codifferential(&mu, &id, o, &KForm::scalar(3, 1.0)).is_err());
    }

    #[test]
    fn laplacian_examples() {
        let mu = LieBracket::heisenberg3();
        let id = Metric::identity(3);
        let o = Orientation::default();
        assert_eq!(
            hodge_laplacian(&mu, &id, o, &e(3, &[2])).unwrap(),
            e(3, &[2])
        );
        let g = Metric::diagonal(&[0.3, 2.0, 7.0]).unwrap();
        assert!(hodge_laplacian(&mu, &g, o, &e(3, &[0, 1, 2]))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn orthonormalize_examples() {
        assert_eq!(orthonormalize(&Metric::identity(3)), Endo::identity(3));
        let h = orthonormalize(&Metric::diagonal(&[4.0, 1.0, 1.0]).unwrap());
        assert_eq!(h, Endo::from_diagonal(&[2.0, 1.0, 1.0]));
    }

    #[test]
    fn rejects_bad_metrics() {
        assert!(Metric::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
        assert!(Metric::from_rows(&[vec![1.0, 0.1], vec![0.0, 1.0]]).is_err());
        assert!(Metric::diagonal(&[1.0, f64::NAN]).is_err());
    }
}
