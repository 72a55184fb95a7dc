//! Alternating forms on `R^n`, stored packed over strictly increasing index
//! tuples in lexicographic order.
//!
//! The packed coefficient of the tuple `I = (i_1 < ... < i_k)` is the tensor
//! component `ω(e_{i_1}, ..., e_{i_k})`, so that `ω = Σ_I ω_I e^I` with the
//! determinant convention `e^{12}(e_1, e_2) = 1`.
//!
//! Degrees above `n` are allowed and denote the zero space (no coefficients);
//! this is what the exterior derivative of a top-degree form lands in.

use std::fmt;

use crate::{Error, Result};

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All strictly increasing `k`-tuples from `0..n`, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance the rightmost position that still has room
        let Some(p) = (0..k).rev().find(|&p| cur[p] < n - k + p) else {
            return out;
        };
        cur[p] += 1;
        for q in p + 1..k {
            cur[q] = cur[q - 1] + 1;
        }
    }
}

/// Lexicographic rank of a strictly increasing tuple.
pub fn rank(n: usize, tuple: &[usize]) -> usize {
    let k = tuple.len();
    let mut r = 0;
    let mut start = 0;
    for (m, &c) in tuple.iter().enumerate() {
        for v in start..c {
            r += binomial(n - v - 1, k - m - 1);
        }
        start = c + 1;
    }
    r
}

/// Sorts `indices` in place and returns the sign of the sorting permutation,
/// or `0` if an index repeats.
pub fn sort_with_sign(indices: &mut [usize]) -> i32 {
    let mut sign = 1;
    // insertion sort; k is tiny
    for a in 1..indices.len() {
        let mut b = a;
        while b > 0 && indices[b - 1] > indices[b] {
            indices.swap(b - 1, b);
            sign = -sign;
            b -= 1;
        }
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

/// Sign of the shuffle that sorts the concatenation `(first, second)` of two
/// disjoint increasing tuples; `0` if they overlap.
pub fn shuffle_sign(first: &[usize], second: &[usize]) -> i32 {
    let mut all: Vec<usize> = first.iter().chain(second).copied().collect();
    sort_with_sign(&mut all)
}

#[derive(Clone, PartialEq)]
pub struct KForm {
    dim: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

impl fmt::Debug for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KForm(n={}, k={}, ", self.dim, self.degree)?;
        let mut first = true;
        for (idx, c) in self.iter() {
            if c != 0.0 {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                let label: String = idx.iter().map(|i| (i + 1).to_string()).collect();
                write!(f, "{c} e^{label}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl KForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Self {
            dim,
            degree,
            coeffs: vec![0.0; binomial(dim, degree)],
        }
    }

    /// Constant function `c` viewed as a 0-form.
    pub fn scalar(dim: usize, c: f64) -> Self {
        Self {
            dim,
            degree: 0,
            coeffs: vec![c],
        }
    }

    pub fn from_packed(dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        let expected = binomial(dim, degree);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("form coefficients"));
        }
        Ok(Self {
            dim,
            degree,
            coeffs,
        })
    }

    /// The basis monomial `e^{i_1} ∧ ... ∧ e^{i_k}` (indices in any order,
    /// 0-based). Repeated indices give the zero form.
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        let mut out = Self::zero(dim, indices.len());
        out.set(indices, 1.0)?;
        Ok(out)
    }

    /// Builds a form from `(indices, value)` entries; each entry is skew
    /// completed. Entries naming the same component must agree.
    pub fn from_entries(dim: usize, degree: usize, entries: &[(Vec<usize>, f64)]) -> Result<Self> {
        let mut out = Self::zero(dim, degree);
        let mut seen = vec![false; out.coeffs.len()];
        for (indices, value) in entries {
            if indices.len() != degree {
                return Err(Error::DegreeOutOfRange {
                    degree: indices.len(),
                    dim,
                });
            }
            if !value.is_finite() {
                return Err(Error::NonFinite("form entry"));
            }
            let mut sorted = indices.clone();
            for &i in &sorted {
                if i >= dim {
                    return Err(Error::IndexOutOfRange { index: i, dim });
                }
            }
            let sign = sort_with_sign(&mut sorted);
            if sign == 0 {
                if *value != 0.0 {
                    return Err(Error::SkewViolation(format!(
                        "repeated index in {:?} with nonzero value",
                        one_based(indices)
                    )));
                }
                continue;
            }
            let r = rank(dim, &sorted);
            let v = sign as f64 * value;
            if seen[r] && out.coeffs[r] != v {
                return Err(Error::SkewViolation(format!(
                    "component {:?} given twice with inconsistent values",
                    one_based(&sorted)
                )));
            }
            seen[r] = true;
            out.coeffs[r] = v;
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Iterates over `(increasing tuple, coefficient)`.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        combinations(self.dim, self.degree)
            .into_iter()
            .zip(self.coeffs.iter().copied())
    }

    /// Component `ω(e_{i_1}, ..., e_{i_k})` for indices in any order.
    pub fn get(&self, indices: &[usize]) -> f64 {
        debug_assert_eq!(indices.len(), self.degree);
        let mut sorted = indices.to_vec();
        let sign = sort_with_sign(&mut sorted);
        if sign == 0 {
            return 0.0;
        }
        sign as f64 * self.coeffs[rank(self.dim, &sorted)]
    }

    /// Sets component `ω(e_{i_1}, ..., e_{i_k}) = value`, skew completing.
    pub fn set(&mut self, indices: &[usize], value: f64) -> Result<()> {
        if indices.len() != self.degree {
            return Err(Error::DegreeOutOfRange {
                degree: indices.len(),
                dim: self.dim,
            });
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.dim) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                dim: self.dim,
            });
        }
        let mut sorted = indices.to_vec();
        let sign = sort_with_sign(&mut sorted);
        if sign == 0 {
            if value != 0.0 {
                return Err(Error::SkewViolation("repeated index".into()));
            }
            return Ok(());
        }
        let r = rank(self.dim, &sorted);
        self.coeffs[r] = sign as f64 * value;
        Ok(())
    }

    /// Full `n^k` tensor, row-major in the slot order.
    pub fn unpacked(&self) -> Vec<f64> {
        let n = self.dim;
        let k = self.degree;
        let total = n.pow(k as u32);
        let mut out = vec![0.0; total];
        let mut idx = vec![0usize; k];
        for (flat, slot) in out.iter_mut().enumerate() {
            let mut rem = flat;
            for p in (0..k).rev() {
                idx[p] = rem % n;
                rem /= n;
            }
            *slot = self.get(&idx);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeOutOfRange {
                degree: other.degree,
                dim: other.dim,
            });
        }
        Ok(())
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            dim: self.dim,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + s * b)
                .collect(),
        })
    }

    /// Sup-norm distance between two forms of the same shape.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.add_scaled(other, -1.0)?.max_abs())
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let n = self.dim;
        let mut out = Self::zero(n, self.degree + other.degree);
        if out.coeffs.is_empty() {
            return Ok(out);
        }
        for (i, a) in self.iter() {
            if a == 0.0 {
                continue;
            }
            for (j, b) in other.iter() {
                if b == 0.0 {
                    continue;
                }
                let mut all: Vec<usize> = i.iter().chain(&j).copied().collect();
                let sign = sort_with_sign(&mut all);
                if sign != 0 {
                    out.coeffs[rank(n, &all)] += sign as f64 * a * b;
                }
            }
        }
        Ok(out)
    }

    /// Interior product `ι_v ω`, contracting the first slot.
    pub fn interior(&self, v: &[f64]) -> Result<Self> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        if self.degree == 0 {
            return Err(Error::DegreeOutOfRange {
                degree: 0,
                dim: self.dim,
            });
        }
        let n = self.dim;
        let mut out = Self::zero(n, self.degree - 1);
        let mut slots = vec![0usize; self.degree];
        for (r, j) in combinations(n, self.degree - 1).into_iter().enumerate() {
            slots[1..].copy_from_slice(&j);
            let mut acc = 0.0;
            for (i, vi) in v.iter().enumerate() {
                if *vi != 0.0 {
                    slots[0] = i;
                    acc += vi * self.get(&slots);
                }
            }
            out.coeffs[r] = acc;
        }
        Ok(out)
    }

    /// Evaluates the form on `k` vectors.
    pub fn eval(&self, vectors: &[&[f64]]) -> Result<f64> {
        if vectors.len() != self.degree {
            return Err(Error::DegreeOutOfRange {
                degree: vectors.len(),
                dim: self.dim,
            });
        }
        let mut cur = self.clone();
        for v in vectors {
            cur = cur.interior(v)?;
        }
        Ok(cur.coeffs.first().copied().unwrap_or(0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|i| i + 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_are_lexicographic_and_ranked() {
        for n in 0..6 {
            for k in 0..=n + 1 {
                let combos = combinations(n, k);
                assert_eq!(combos.len(), binomial(n, k));
                for (r, c) in combos.iter().enumerate() {
                    assert_eq!(rank(n, c), r);
                }
                assert!(combos.windows(2).all(|w| w[0] < w[1]));
            }
        }
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn sign_of_permutations() {
        assert_eq!(sort_with_sign(&mut [0, 1, 2]), 1);
        assert_eq!(sort_with_sign(&mut [1, 0, 2]), -1);
        assert_eq!(sort_with_sign(&mut [2, 0, 1]), 1);
        assert_eq!(sort_with_sign(&mut [1, 1, 0]), 0);
    }

    #[test]
    fn alternation_of_unpacked_view() {
        let w = KForm::from_packed(4, 3, vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let t = w.unpacked();
        let n = 4;
        let at = |i: usize, j: usize, k: usize| t[(i * n + j) * n + k];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    assert_eq!(at(i, j, k), -at(j, i, k));
                    assert_eq!(at(i, j, k), -at(i, k, j));
                    assert_eq!(at(i, j, k), at(j, k, i));
                }
            }
        }
    }

    #[test]
    fn wedge_of_basis_covectors() {
        let e1 = KForm::basis(3, &[0]).unwrap();
        let e2 = KForm::basis(3, &[1]).unwrap();
        let e12 = e1.wedge(&e2).unwrap();
        assert_eq!(e12.get(&[0, 1]), 1.0);
        assert_eq!(e2.wedge(&e1).unwrap().get(&[0, 1]), -1.0);
        let e3 = KForm::basis(3, &[2]).unwrap();
        let top = e12.wedge(&e3).unwrap();
        assert_eq!(top.coeffs(), &[1.0]);
        // degree above n is the zero space
        assert!(top.wedge(&e1).unwrap().coeffs().is_empty());
    }

    #[test]
    fn interior_of_volume_form() {
        let vol = KForm::basis(3, &[0, 1, 2]).unwrap();
        let i3 = vol.interior(&[0.0, 0.0, 1.0]).unwrap();
        // ι_{e_3} e^{123} = e^{12}
        assert_eq!(i3.get(&[0, 1]), 1.0);
        let i1 = vol.interior(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(i1.get(&[1, 2]), 1.0);
        assert_eq!(
            vol.eval(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]])
                .unwrap(),
            1.0
        );
    }

    #[test]
    fn inconsistent_entries_are_rejected() {
        let err = KForm::from_entries(3, 2, &[(vec![0, 1], 1.0), (vec![1, 0], 1.0)]);
        assert!(matches!(err, Err(Error::SkewViolation(_))));
        let ok = KForm::from_entries(3, 2, &[(vec![0, 1], 1.0), (vec![1, 0], -1.0)]).unwrap();
        assert_eq!(ok.get(&[0, 1]), 1.0);
        assert!(matches!(
            KForm::from_entries(3, 2, &[(vec![0, 3], 1.0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
    }
}
