//! Generalized Ricci solitons on Lie algebras.
//!
//! A metric `g` with closed `H` and 1-form `θ` is a soliton when
//!
//! ```text
//! Rc_g - ¼ H∘H + ½ S(∇⁺θ) = λ g + g(D·, ·)
//! ω = -d*H + ½ dθ - ½ ι_{g⁻¹θ} H
//! ```
//!
//! for some `λ`, a `g`-symmetric derivation `D` and 2-form `ω`.

use nalgebra::{DMatrix, DVector};

use crate::config::{RANK_REL_TOL, SOLITON_TOL, ZERO_TOL};
use crate::curvature::{bismut_nabla_theta, h_circ_h, rc_metric, require_closed};
use crate::hodge::{codifferential, Metric, Orientation};
use crate::lie::{Endo, LieBracket};
use crate::{Error, KForm, Result};

/// Result of [`soliton_fit`].
#[derive(Clone, Debug)]
pub struct SolitonData {
    pub lambda: f64,
    pub d: Endo,
    pub omega: KForm,
    pub sym_residual: f64,
    pub skew_residual: f64,
    /// `max(sym_residual, skew_residual)`.
    pub residual_norm: f64,
    pub is_soliton: bool,
}

/// Rows `π(E_ab) μ` for the elementary matrices, as an `n³ × n²` matrix whose
/// column `a n + b` belongs to the endomorphism with matrix entry `(a, b)`.
fn derivation_constraints(mu: &LieBracket) -> DMatrix<f64> {
    let n = mu.dim();
    let mut c = DMatrix::zeros(n * n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            let mut e = DMatrix::zeros(n, n);
            e[(a, b)] = 1.0;
            let image = mu
                .pi_action(&Endo::from_matrix(e).expect("finite"))
                .expect("same dimension");
            for (r, v) in image.tensor().iter().enumerate() {
                c[(r, a * n + b)] = *v;
            }
        }
    }
    c
}

/// Orthonormal basis of the null space of `c`, using singular values below
/// `RANK_REL_TOL` times the largest one.
fn null_space(c: &DMatrix<f64>, n: usize) -> Vec<Endo> {
    let cols = c.ncols();
    // pad so the decomposition always yields a full V
    let mut tall = DMatrix::zeros(c.nrows().max(cols), cols);
    tall.rows_mut(0, c.nrows()).copy_from(c);
    let svd = tall.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let smax = svd.singular_values.max();
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s <= RANK_REL_TOL * smax || smax == 0.0)
        .map(|(r, _)| {
            let m = DMatrix::from_fn(n, n, |a, b| vt[(r, a * n + b)]);
            Endo::from_matrix(m).expect("finite")
        })
        .collect()
}

/// Basis of `Der(μ)`, the null space of `φ ↦ π(φ)μ`.
pub fn derivation_space(mu: &LieBracket) -> Result<Vec<Endo>> {
    check_lie(mu)?;
    Ok(null_space(&derivation_constraints(mu), mu.dim()))
}

/// Basis of the derivations that are symmetric with respect to `g`, i.e.
/// with `g(Dx, y) = g(x, Dy)`.
pub fn symmetric_derivations(mu: &LieBracket, g: &Metric) -> Result<Vec<Endo>> {
    check_lie(mu)?;
    let n = mu.dim();
    if g.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.dim(),
        });
    }
    let der = derivation_constraints(mu);
    let gm = g.matrix();
    let mut c = DMatrix::zeros(der.nrows() + n * n, n * n);
    c.rows_mut(0, der.nrows()).copy_from(&der);
    // (Mᵀ g - g M)_{pq} = Σ_a M_{ap} g_{aq} - g_{pa} M_{aq}
    for p in 0..n {
        for q in 0..n {
            let row = der.nrows() + p * n + q;
            for a in 0..n {
                c[(row, a * n + p)] += gm[(a, q)];
                c[(row, a * n + q)] -= gm[(p, a)];
            }
        }
    }
    Ok(null_space(&c, n))
}

fn check_lie(mu: &LieBracket) -> Result<()> {
    let residual = mu.jacobi_residual();
    if residual > ZERO_TOL {
        return Err(Error::NotLie {
            residual,
            tol: ZERO_TOL,
        });
    }
    Ok(())
}

/// Symmetric target `Rc - ¼ H∘H + ½ S(∇⁺θ)`.
fn symmetric_target(mu: &LieBracket, g: &Metric, h: &KForm, theta: &KForm) -> Result<DMatrix<f64>> {
    let rc = rc_metric(mu, g)?;
    let hh = h_circ_h(g, h)?;
    let nabla = bismut_nabla_theta(mu, g, h, theta)?;
    Ok(rc.matrix() - hh.matrix() * 0.25 + nabla.symmetric() * 0.5)
}

/// The 2-form `-d*H + ½ dθ - ½ ι_{g⁻¹θ} H` forced by the skew equation.
pub fn soliton_omega(
    mu: &LieBracket,
    g: &Metric,
    o: Orientation,
    h: &KForm,
    theta: &KForm,
) -> Result<KForm> {
    require_closed(mu, h, ZERO_TOL)?;
    if theta.degree() != 1 || theta.dim() != mu.dim() {
        return Err(Error::DegreeOutOfRange {
            degree: theta.degree(),
            dim: theta.dim(),
        });
    }
    let dstar = codifferential(mu, g, o, h)?;
    let dtheta = mu.ce_differential(theta)?;
    let contracted = h.interior(&g.raise(theta.coeffs()))?;
    dstar
        .scaled(-1.0)
        .add_scaled(&dtheta, 0.5)?
        .add_scaled(&contracted, -0.5)
}

/// Sup-norm residuals of the symmetric and skew soliton equations.
#[allow(clippy::too_many_arguments)]
pub fn soliton_residual(
    mu: &LieBracket,
    g: &Metric,
    o: Orientation,
    h: &KForm,
    theta: &KForm,
    lambda: f64,
    d: &Endo,
    omega: &KForm,
) -> Result<(f64, f64)> {
    let want = soliton_omega(mu, g, o, h, theta)?;
    let target = symmetric_target(mu, g, h, theta)?;
    if d.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: d.dim(),
        });
    }
    let gm = g.matrix();
    let sym = (target - gm * lambda - d.matrix().transpose() * gm).amax();
    let skew = omega.distance(&want)?;
    Ok((sym, skew))
}

/// Least-squares soliton fit: `ω` from the skew equation, then `(λ, D)`
/// minimizing the Frobenius norm of the symmetric equation over `λ ∈ R` and
/// `D` in the span of [`symmetric_derivations`]. Rank-deficient systems get
/// the minimum-norm solution.
pub fn soliton_fit(
    mu: &LieBracket,
    g: &Metric,
    o: Orientation,
    h: &KForm,
    theta: &KForm,
) -> Result<SolitonData> {
    let omega = soliton_omega(mu, g, o, h, theta)?;
    let target = symmetric_target(mu, g, h, theta)?;
    let basis = symmetric_derivations(mu, g)?;
    let n = mu.dim();
    let gm = g.matrix();
    let mut design = DMatrix::zeros(n * n, basis.len() + 1);
    design.column_mut(0).copy_from_slice(gm.as_slice());
    for (c, b) in basis.iter().enumerate() {
        let col = b.matrix().transpose() * gm;
        design.column_mut(c + 1).copy_from_slice(col.as_slice());
    }
    let rhs = DVector::from_column_slice(target.as_slice());
    let smax = design.singular_values().max();
    let pinv = design
        .pseudo_inverse(RANK_REL_TOL * smax.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let x = pinv * rhs;
    let lambda = x[0];
    let mut dm = DMatrix::zeros(n, n);
    for (c, b) in basis.iter().enumerate() {
        dm += b.matrix() * x[c + 1];
    }
    let d = Endo::from_matrix(dm)?;
    let (sym_residual, skew_residual) = soliton_residual(mu, g, o, h, theta, lambda, &d, &omega)?;
    let residual_norm = sym_residual.max(skew_residual);
    Ok(SolitonData {
        lambda,
        d,
        omega,
        sym_residual,
        skew_residual,
        residual_norm,
        is_soliton: residual_norm <= SOLITON_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn top(a: f64) -> KForm {
        KForm::basis(3, &[0, 1, 2]).unwrap().scaled(a)
    }

    fn span_dim(basis: &[Endo]) -> usize {
        if basis.is_empty() {
            return 0;
        }
        let n = basis[0].dim();
        let m = DMatrix::from_fn(n * n, basis.len(), |r, c| basis[c].matrix().as_slice()[r]);
        m.rank(1e-9)
    }

    #[test]
    fn heisenberg_derivations() {
        let mu = LieBracket::heisenberg3();
        let der = derivation_space(&mu).unwrap();
        assert_eq!(der.len(), 6);
        for d in &der {
            assert!(mu.pi_action(d).unwrap().max_abs() < 1e-12);
            let m = d.matrix();
            // third column vanishes above the diagonal, (3,3) = a1 + a4
            assert!(m[(0, 2)].abs() < 1e-12 && m[(1, 2)].abs() < 1e-12);
            assert!((m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).abs() < 1e-12);
        }
        assert_eq!(derivation_space(&LieBracket::zero(3)).unwrap().len(), 9);
    }

    #[test]
    fn heisenberg_symmetric_derivations() {
        let mu = LieBracket::heisenberg3();
        let sym = symmetric_derivations(&mu, &Metric::identity(3)).unwrap();
        assert_eq!(sym.len(), 3);
        assert_eq!(span_dim(&sym), 3);
        let g = Metric::diagonal(&[1.0, 1.0, 4.0]).unwrap();
        assert_eq!(symmetric_derivations(&mu, &g).unwrap().len(), 3);
        let ab = symmetric_derivations(&LieBracket::zero(4), &Metric::identity(4)).unwrap();
        assert_eq!(ab.len(), 10);
    }

    #[test]
    fn heisenberg_soliton_data() {
        let mu = LieBracket::heisenberg3();
        let id = Metric::identity(3);
        let o = Orientation::default();
        let (a, t3) = (0.5, 1.0);
        let theta = KForm::basis(3, &[2]).unwrap().scaled(t3);
        let d = Endo::from_diagonal(&[1.0, 1.0, 2.0]);
        let mut omega = KForm::zero(3, 2);
        omega.set(&[0, 1], -0.5 * t3 * (1.0 + a)).unwrap();
        let lambda = -(3.0 + a * a) / 2.0;
        let (s, k) = soliton_residual(&mu, &id, o, &top(a), &theta, lambda, &d, &omega).unwrap();
        assert!(s < 1e-15 && k < 1e-15, "{s} {k}");

        let zero = Endo::zeros(3);
        let (s, k) = soliton_residual(
            &mu,
            &id,
            o,
            &KForm::zero(3, 3),
            &KForm::zero(3, 1),
            0.0,
            &zero,
            &KForm::zero(3, 2),
        )
        .unwrap();
        assert_eq!((s, k), (0.5, 0.0));
    }

    #[test]
    fn fit_classical_and_flat() {
        let o = Orientation::default();
        let id = Metric::identity(3);
        let fit = soliton_fit(
            &LieBracket::heisenberg3(),
            &id,
            o,
            &KForm::zero(3, 3),
            &KForm::zero(3, 1),
        )
        .unwrap();
        assert!((fit.lambda + 1.5).abs() < 1e-12);
        assert!((fit.d.matrix() - Endo::from_diagonal(&[1.0, 1.0, 2.0]).matrix()).amax() < 1e-12);
        assert!(fit.is_soliton);

        let flat = soliton_fit(
            &LieBracket::zero(3),
            &id,
            o,
            &KForm::zero(3, 3),
            &KForm::zero(3, 1),
        )
        .unwrap();
        assert_eq!(flat.lambda, 0.0);
        assert_eq!(flat.d.max_abs(), 0.0);
        assert!(flat.omega.is_zero());
    }
}
