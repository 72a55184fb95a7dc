//! Curvature of left-invariant metrics: Ricci tensors, `H∘H`, Levi-Civita
//! coefficients, the Bismut term `∇⁺θ` and the generalized Ricci tensor.
//!
//! Bilinear forms are returned in the standard basis as `n × n` matrices with
//! entry `(i, j)` equal to `B(e_i, e_j)`.

use nalgebra::DMatrix;

use crate::config::{SYMMETRY_TOL, ZERO_TOL};
use crate::hodge::{codifferential, orthonormalize, Metric, Orientation};
use crate::lie::{Endo, LieBracket};
use crate::{Error, KForm, Result};

/// A symmetric bilinear form.
#[derive(Clone, Debug, PartialEq)]
pub struct SymBilinear(DMatrix<f64>);

impl SymBilinear {
    /// Accepts matrices symmetric to `1e-12` relative to their largest entry
    /// and stores the exact symmetrization.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("bilinear form"));
        }
        let asym = (&m - m.transpose()).amax();
        if asym > SYMMETRY_TOL * m.amax().max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "bilinear form is not symmetric (asymmetry {asym:e})"
            )));
        }
        Ok(Self::symmetrize(m))
    }

    pub(crate) fn symmetrize(m: DMatrix<f64>) -> Self {
        Self((&m + m.transpose()) * 0.5)
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

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0.symmetric_eigenvalues().min()
    }
}

/// A general bilinear form with its symmetric and skew parts.
#[derive(Clone, Debug, PartialEq)]
pub struct Bilinear(DMatrix<f64>);

impl Bilinear {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// `S(B) = (B + Bᵀ) / 2`.
    pub fn symmetric(&self) -> DMatrix<f64> {
        (&self.0 + self.0.transpose()) * 0.5
    }

    /// `A(B) = (B - Bᵀ) / 2`.
    pub fn skew(&self) -> DMatrix<f64> {
        (&self.0 - self.0.transpose()) * 0.5
    }
}

/// Levi-Civita coefficients `∇_{e_i} e_j = Γ_{ij}^k e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffels {
    dim: usize,
    coeffs: Vec<f64>,
}

impl Christoffels {
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.coeffs[(i * self.dim + j) * self.dim + k]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

fn check_degree(form: &KForm, degree: usize, dim: usize) -> Result<()> {
    if form.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: form.dim(),
        });
    }
    if form.degree() != degree {
        return Err(Error::DegreeOutOfRange {
            degree: form.degree(),
            dim,
        });
    }
    Ok(())
}

fn check_metric(mu: &LieBracket, g: &Metric) -> Result<()> {
    if g.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: g.dim(),
        });
    }
    Ok(())
}

/// `‖d_μ H‖_∞`, rejecting forms of the wrong shape.
pub fn closedness_residual(mu: &LieBracket, h: &KForm) -> Result<f64> {
    check_degree(h, 3, mu.dim())?;
    Ok(mu.ce_differential(h)?.max_abs())
}

pub(crate) fn require_closed(mu: &LieBracket, h: &KForm, tol: f64) -> Result<()> {
    let residual = closedness_residual(mu, h)?;
    if residual > tol {
        return Err(Error::NotClosed { residual, tol });
    }
    Ok(())
}

/// Ricci endomorphism of the standard inner product,
/// `Ric_i^j = -½ μ_{ik}^l μ_{jk}^l + ¼ μ_{kl}^i μ_{kl}^j`.
pub fn ric_orthonormal(mu: &LieBracket) -> Endo {
    let n = mu.dim();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = 0.0;
            for k in 0..n {
                for l in 0..n {
                    acc += -0.5 * mu.get(i, k, l) * mu.get(j, k, l)
                        + 0.25 * mu.get(k, l, i) * mu.get(k, l, j);
                }
            }
            m[(i, j)] = acc;
            m[(j, i)] = acc;
        }
    }
    Endo::from_matrix(m).expect("finite")
}

/// Ricci tensor of `g`, by transporting to an orthonormal frame:
/// with `g = hᵀh`, `Rc_g = hᵀ Ric_{h·μ} h`.
pub fn rc_metric(mu: &LieBracket, g: &Metric) -> Result<SymBilinear> {
    check_metric(mu, g)?;
    let h = orthonormalize(g).into_matrix();
    let inv = h.clone().try_inverse().ok_or(Error::Singular {
        condition: f64::INFINITY,
    })?;
    let moved = mu.change_basis(&h, &inv);
    let ric = ric_orthonormal(&moved).into_matrix();
    Ok(SymBilinear::symmetrize(h.transpose() * ric * h))
}

/// Levi-Civita coefficients from the Koszul formula
/// `2 g(∇_i e_j, e_k) = g(μ_ij, e_k) - g(μ_jk, e_i) + g(μ_ki, e_j)`.
pub fn christoffels(mu: &LieBracket, g: &Metric) -> Result<Christoffels> {
    check_metric(mu, g)?;
    let n = mu.dim();
    let gm = g.matrix();
    // lowered[a][b][c] = g(μ(e_a, e_b), e_c)
    let mut lowered = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                lowered[(a * n + b) * n + c] = (0..n).map(|l| mu.get(a, b, l) * gm[(l, c)]).sum();
            }
        }
    }
    let low = |a: usize, b: usize, c: usize| lowered[(a * n + b) * n + c];
    let inv = g.inverse();
    let mut coeffs = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = 0.0;
                for m in 0..n {
                    let c = 0.5 * (low(i, j, m) - low(j, m, i) + low(m, i, j));
                    acc += c * inv[(m, k)];
                }
                coeffs[(i * n + j) * n + k] = acc;
            }
        }
    }
    Ok(Christoffels { dim: n, coeffs })
}

/// Ricci tensor of `g` computed directly from the curvature of the
/// Levi-Civita connection, `Rc(Y, Z) = tr(X ↦ R(X, Y) Z)`.
pub fn rc_metric_koszul(mu: &LieBracket, g: &Metric) -> Result<SymBilinear> {
    let gamma = christoffels(mu, g)?;
    let n = mu.dim();
    let mut rc = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                // R(e_i, e_j) e_k, component along e_i
                for l in 0..n {
                    acc += gamma.get(j, k, l) * gamma.get(i, l, i)
                        - gamma.get(i, k, l) * gamma.get(j, l, i)
                        - mu.get(i, j, l) * gamma.get(l, k, i);
                }
            }
            rc[(j, k)] = acc;
        }
    }
    SymBilinear::new(rc)
}

/// `(H∘H)_{ij} = g^{rl} g^{st} H_{irs} H_{jlt}`.
pub fn h_circ_h(g: &Metric, h: &KForm) -> Result<SymBilinear> {
    let n = g.dim();
    check_degree(h, 3, n)?;
    let full = h.unpacked();
    let inv = g.inverse();
    let slice = |i: usize| DMatrix::from_fn(n, n, |r, s| full[(i * n + r) * n + s]);
    let raised: Vec<DMatrix<f64>> = (0..n).map(|i| inv * slice(i) * inv).collect();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = raised[i].dot(&slice(j));
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(SymBilinear(out))
}

/// `(H²)_i^j = H_{ikl} H_{jkl}`, the contraction against the standard inner
/// product.
pub fn h_squared_neutral(h: &KForm) -> Result<Endo> {
    let n = h.dim();
    check_degree(h, 3, n)?;
    Ok(Endo::from_matrix(h_circ_h(&Metric::identity(n), h)?.into_matrix()).expect("finite"))
}

/// Bismut term `(∇⁺θ)_{ij} = -θ_k (Γ_{ij}^k + ½ g^{kl} H_{ijl})`.
pub fn bismut_nabla_theta(
    mu: &LieBracket,
    g: &Metric,
    h: &KForm,
    theta: &KForm,
) -> Result<Bilinear> {
    let n = mu.dim();
    check_degree(h, 3, n)?;
    check_degree(theta, 1, n)?;
    let gamma = christoffels(mu, g)?;
    let theta_up = g.raise(theta.coeffs());
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for (k, t) in theta.coeffs().iter().enumerate() {
                acc -= t * gamma.get(i, j, k);
            }
            // θ_k g^{kl} H_{ijl} = H(e_i, e_j, g^{-1}θ)
            for (l, t) in theta_up.iter().enumerate() {
                acc -= 0.5 * t * h.get(&[i, j, l]);
            }
            out[(i, j)] = acc;
        }
    }
    Ok(Bilinear(out))
}

/// Generalized Ricci tensor `Rc⁺ = Rc - ¼ H∘H - ½ d*H + ½ ∇⁺θ`, with the
/// 2-form `d*H` read as the skew matrix `(d*H)(e_i, e_j)`.
pub fn generalized_ricci_plus(
    mu: &LieBracket,
    g: &Metric,
    o: Orientation,
    h: &KForm,
    theta: &KForm,
) -> Result<Bilinear> {
    check_metric(mu, g)?;
    require_closed(mu, h, ZERO_TOL)?;
    let n = mu.dim();
    let rc = rc_metric(mu, g)?;
    let hh = h_circ_h(g, h)?;
    let dstar = codifferential(mu, g, o, h)?;
    let nabla = bismut_nabla_theta(mu, g, h, theta)?;
    let dstar_m = DMatrix::from_fn(n, n, |i, j| dstar.get(&[i, j]));
    let full = rc.matrix() - hh.matrix() * 0.25 - dstar_m * 0.5 + nabla.matrix() * 0.5;
    Ok(Bilinear(full))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn top(a: f64) -> KForm {
        KForm::basis(3, &[0, 1, 2]).unwrap().scaled(a)
    }

    #[test]
    fn heisenberg_ricci() {
        let ric = ric_orthonormal(&LieBracket::heisenberg3());
        assert_eq!(ric, Endo::from_diagonal(&[-0.5, -0.5, 0.5]));
        assert_eq!(ric_orthonormal(&LieBracket::zero(3)).max_abs(), 0.0);
        let ric3 = ric_orthonormal(&LieBracket::heisenberg3().scaled(3.0));
        assert_eq!(ric3, Endo::from_diagonal(&[-4.5, -4.5, 4.5]));
    }

    #[test]
    fn heisenberg_ricci_diagonal_metric() {
        let (g1, g2, g3) = (1.7, 0.6, 2.3);
        let g = Metric::diagonal(&[g1, g2, g3]).unwrap();
        let mu = LieBracket::heisenberg3();
        let want = [
            -g3 / (2.0 * g2),
            -g3 / (2.0 * g1),
            g3 * g3 / (2.0 * g1 * g2),
        ];
        for rc in [
            rc_metric(&mu, &g).unwrap(),
            rc_metric_koszul(&mu, &g).unwrap(),
        ] {
            for i in 0..3 {
                for j in 0..3 {
                    let w = if i == j { want[i] } else { 0.0 };
                    assert!((rc.get(i, j) - w).abs() < 1e-14, "{i}{j}");
                }
            }
        }
    }

    #[test]
    fn heisenberg_christoffels() {
        let gamma = christoffels(&LieBracket::heisenberg3(), &Metric::identity(3)).unwrap();
        let mut nonzero = vec![];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let v = gamma.get(i, j, k);
                    if v != 0.0 {
                        nonzero.push((i + 1, j + 1, k + 1, v));
                    }
                }
            }
        }
        assert_eq!(
            nonzero,
            vec![
                (1, 2, 3, 0.5),
                (1, 3, 2, -0.5),
                (2, 1, 3, -0.5),
                (2, 3, 1, 0.5),
                (3, 1, 2, -0.5),
                (3, 2, 1, 0.5),
            ]
        );
    }

    #[test]
    fn h_circ_h_examples() {
        let a = 1.3;
        let id = Metric::identity(3);
        let hh = h_circ_h(&id, &top(a)).unwrap();
        assert_eq!(hh.matrix(), &(DMatrix::identity(3, 3) * (2.0 * a * a)));
        let (g1, g2, g3) = (1.7, 0.6, 2.3);
        let g = Metric::diagonal(&[g1, g2, g3]).unwrap();
        let hh = h_circ_h(&g, &top(a)).unwrap();
        let want = [g2 * g3, g1 * g3, g1 * g2].map(|d| 2.0 * a * a / d);
        for i in 0..3 {
            assert!((hh.get(i, i) - want[i]).abs() < 1e-14);
        }
        assert_eq!(
            h_squared_neutral(&top(a)).unwrap(),
            Endo::from_diagonal(&[2.0 * a * a; 3])
        );
    }

    #[test]
    fn bismut_examples() {
        let mu = LieBracket::heisenberg3();
        let id = Metric::identity(3);
        let (a, t3) = (0.7, -2.0);
        let theta = KForm::basis(3, &[2]).unwrap().scaled(t3);
        let b = bismut_nabla_theta(&mu, &id, &top(a), &theta).unwrap();
        let mut want = DMatrix::zeros(3, 3);
        want[(0, 1)] = -0.5 * t3 * (1.0 + a);
        want[(1, 0)] = 0.5 * t3 * (1.0 + a);
        assert!((b.matrix() - want).amax() < 1e-15);

        let e1 = KForm::basis(3, &[0]).unwrap();
        let s = bismut_nabla_theta(&mu, &id, &KForm::zero(3, 3), &e1)
            .unwrap()
            .symmetric();
        assert_eq!(s[(0, 2)], 0.0);
        assert_eq!(s[(1, 2)], -0.5);
        assert_eq!(s[(2, 1)], -0.5);
    }

    #[test]
    fn generalized_ricci_examples() {
        let mu = LieBracket::heisenberg3();
        let id = Metric::identity(3);
        let o = Orientation::default();
        let zero1 = KForm::zero(3, 1);
        let a = 0.4;
        let rc = generalized_ricci_plus(&mu, &id, o, &top(a), &zero1).unwrap();
        let q = 0.5 * a * a;
        let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            -0.5 - q,
            -0.5 - q,
            0.5 - q,
        ]));
        assert!((rc.matrix() - want).amax() < 1e-15);
        let flat = generalized_ricci_plus(&LieBracket::zero(3), &id, o, &KForm::zero(3, 3), &zero1)
            .unwrap();
        assert_eq!(flat.matrix().amax(), 0.0);
    }
}
