//! Truncated two-mode Fock space and dense complex operators.
//!
//! Basis kets |m,n⟩ hold `m` photons in mode `a` and `n` in mode `b`. They are
//! stored m-major: the flat index of |m,n⟩ is `m * (n_max_b + 1) + n`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Sub};

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::state::DensityMatrix;
use crate::C64;

/// Cavity mode selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    A,
    B,
}

impl Mode {
    pub fn other(self) -> Mode {
        match self {
            Mode::A => Mode::B,
            Mode::B => Mode::A,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockBasis {
    n_max_a: usize,
    n_max_b: usize,
}

impl FockBasis {
    /// Truncation limits must leave room for |30⟩, |21⟩ and |02⟩.
    pub fn new(n_max_a: usize, n_max_b: usize) -> Result<Self> {
        if n_max_a < 2 || n_max_b < 1 {
            return Err(Error::TruncationTooSmall { n_max_a, n_max_b });
        }
        Ok(Self { n_max_a, n_max_b })
    }

    pub fn n_max_a(&self) -> usize {
        self.n_max_a
    }

    pub fn n_max_b(&self) -> usize {
        self.n_max_b
    }

    pub fn dim(&self) -> usize {
        (self.n_max_a + 1) * (self.n_max_b + 1)
    }

    /// Flat index of |m,n⟩. Panics outside the truncation.
    pub fn index(&self, m: usize, n: usize) -> usize {
        self.checked_index(m, n)
            .unwrap_or_else(|| panic!("|{m},{n}> lies outside the truncated basis"))
    }

    pub fn checked_index(&self, m: usize, n: usize) -> Option<usize> {
        (m <= self.n_max_a && n <= self.n_max_b).then(|| m * (self.n_max_b + 1) + n)
    }

    /// Occupation numbers `(m, n)` of a flat index.
    pub fn occupation(&self, flat: usize) -> (usize, usize) {
        debug_assert!(flat < self.dim());
        (flat / (self.n_max_b + 1), flat % (self.n_max_b + 1))
    }

    /// Fock ket |m,n⟩ as a coefficient vector.
    pub fn ket(&self, m: usize, n: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        v[self.index(m, n)] = C64::new(1.0, 0.0);
        v
    }

    /// Grown truncation, used for convergence checks.
    pub fn enlarged(&self, extra_a: usize, extra_b: usize) -> Self {
        Self {
            n_max_a: self.n_max_a + extra_a,
            n_max_b: self.n_max_b + extra_b,
        }
    }
}

impl Default for FockBasis {
    fn default() -> Self {
        Self { n_max_a: 6, n_max_b: 4 }
    }
}

pub fn build_basis(n_max_a: usize, n_max_b: usize) -> Result<FockBasis> {
    FockBasis::new(n_max_a, n_max_b)
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<C64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// |ψ⟩⟨φ|
    pub fn outer(ket: &[C64], bra: &[C64]) -> Result<Self> {
        if ket.len() != bra.len() {
            return Err(Error::DimMismatch {
                expected: ket.len(),
                found: bra.len(),
            });
        }
        Ok(Self::from_fn(ket.len(), |i, j| ket[i] * bra[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &Operator) -> Result<Self> {
        self.check_dim(rhs.dim)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let lhs = self.data[i * n + k];
                if lhs == C64::new(0.0, 0.0) {
                    continue;
                }
                let rk = &rhs.data[k * n..(k + 1) * n];
                for (o, r) in row.iter_mut().zip(rk) {
                    *o += lhs * r;
                }
            }
        }
        Ok(out)
    }

    /// `[self, rhs]`
    pub fn commutator(&self, rhs: &Operator) -> Result<Self> {
        Ok(&self.compose(rhs)? - &rhs.compose(self)?)
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        self.check_dim(v.len())?;
        Ok((0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest entry modulus of `self - self†`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                err = err.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        err
    }

    pub(crate) fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim != other {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: other,
            });
        }
        Ok(())
    }

    /// Nonzero pattern per row, for repeated products with a fixed operator.
    pub(crate) fn row_entries(&self) -> Vec<Vec<(usize, C64)>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .filter_map(|j| {
                        let z = self.get(i, j);
                        (z != C64::new(0.0, 0.0)).then_some((j, z))
                    })
                    .collect()
            })
            .collect()
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        Operator {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        Operator {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Add for Operator {
    type Output = Operator;

    fn add(self, rhs: Operator) -> Operator {
        &self + &rhs
    }
}

/// Annihilation operator of `mode`: â|m,n⟩ = √m |m−1,n⟩, b̂|m,n⟩ = √n |m,n−1⟩.
pub fn lowering_operator(basis: &FockBasis, mode: Mode) -> Operator {
    let mut op = Operator::zeros(basis.dim());
    for col in 0..basis.dim() {
        let (m, n) = basis.occupation(col);
        match mode {
            Mode::A if m > 0 => op.set(basis.index(m - 1, n), col, C64::new((m as f64).sqrt(), 0.0)),
            Mode::B if n > 0 => op.set(basis.index(m, n - 1), col, C64::new((n as f64).sqrt(), 0.0)),
            _ => {}
        }
    }
    op
}

/// Creation operator of `mode`.
pub fn raising_operator(basis: &FockBasis, mode: Mode) -> Operator {
    lowering_operator(basis, mode).adjoint()
}

/// ĥ†ĥ, diagonal with the occupation of `mode`.
pub fn number_operator(basis: &FockBasis, mode: Mode) -> Operator {
    let mut op = Operator::zeros(basis.dim());
    for i in 0..basis.dim() {
        let (m, n) = basis.occupation(i);
        let k = match mode {
            Mode::A => m,
            Mode::B => n,
        };
        op.set(i, i, C64::new(k as f64, 0.0));
    }
    op
}

/// ĥ†²ĥ², diagonal with k(k−1).
pub fn pair_number_operator(basis: &FockBasis, mode: Mode) -> Operator {
    let mut op = Operator::zeros(basis.dim());
    for i in 0..basis.dim() {
        let (m, n) = basis.occupation(i);
        let k = match mode {
            Mode::A => m,
            Mode::B => n,
        } as f64;
        op.set(i, i, C64::new(k * (k - 1.0), 0.0));
    }
    op
}

/// Tr[X ρ].
pub fn expectation(x: &Operator, rho: &DensityMatrix) -> Result<C64> {
    x.check_dim(rho.dim())?;
    let n = x.dim;
    let r = rho.as_slice();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += x.data[i * n + k] * r[k * n + i];
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn basis_sizes_and_indexing() {
        assert_eq!(build_basis(2, 1).unwrap().dim(), 6);
        let b = build_basis(6, 4).unwrap();
        assert_eq!(b.dim(), 35);
        assert_eq!(b.index(3, 1), 16);
        assert_eq!(b.occupation(16), (3, 1));
        for flat in 0..b.dim() {
            let (m, n) = b.occupation(flat);
            assert_eq!(b.index(m, n), flat);
        }
        assert_eq!(b.checked_index(7, 0), None);
    }

    #[test]
    fn rejects_truncation_without_ladder() {
        assert!(matches!(
            build_basis(1, 4),
            Err(Error::TruncationTooSmall { .. })
        ));
        assert!(matches!(
            build_basis(6, 0),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn ladder_coefficients() {
        let basis = build_basis(6, 4).unwrap();
        let a = lowering_operator(&basis, Mode::A);
        let b = lowering_operator(&basis, Mode::B);
        let out = a.apply(&basis.ket(1, 0)).unwrap();
        assert_eq!(out, basis.ket(0, 0));
        assert!((b.get(basis.index(0, 1), basis.index(0, 2)) - c(2f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn modes_commute_exactly() {
        let basis = build_basis(4, 3).unwrap();
        let a = lowering_operator(&basis, Mode::A);
        let b = lowering_operator(&basis, Mode::B);
        assert_eq!(a.commutator(&b).unwrap().max_abs(), 0.0);
        let ad = a.adjoint();
        assert_eq!(ad.commutator(&b).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn canonical_commutator_below_truncation_edge() {
        // [â, â†] = 1 except on the top a-level, where truncation gives 1 - (n_max_a + 1).
        let basis = build_basis(5, 2).unwrap();
        let a = lowering_operator(&basis, Mode::A);
        let comm = a.commutator(&a.adjoint()).unwrap();
        for i in 0..basis.dim() {
            let (m, _) = basis.occupation(i);
            for j in 0..basis.dim() {
                let expected = if i == j && m < basis.n_max_a() {
                    c(1.0)
                } else if i == j {
                    c(-(basis.n_max_a() as f64))
                } else {
                    c(0.0)
                };
                assert!((comm.get(i, j) - expected).norm() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn number_operators_are_diagonal_occupations() {
        let basis = build_basis(3, 2).unwrap();
        let a = lowering_operator(&basis, Mode::A);
        let na = a.adjoint().compose(&a).unwrap();
        assert!((&na - &number_operator(&basis, Mode::A)).max_abs() < 1e-12);
        let b = lowering_operator(&basis, Mode::B);
        let bb = b.compose(&b).unwrap();
        let pairs = bb.adjoint().compose(&bb).unwrap();
        assert!((&pairs - &pair_number_operator(&basis, Mode::B)).max_abs() < 1e-12);
    }

    #[test]
    fn expectation_values_on_fock_states() {
        let basis = build_basis(2, 1).unwrap();
        let na = number_operator(&basis, Mode::A);
        let one_a = DensityMatrix::fock(&basis, 1, 0);
        let one_b = DensityMatrix::fock(&basis, 0, 1);
        assert_eq!(expectation(&na, &one_a).unwrap(), c(1.0));
        assert_eq!(expectation(&na, &one_b).unwrap(), c(0.0));
        let id = Operator::identity(basis.dim());
        assert_eq!(expectation(&id, &one_b).unwrap(), c(1.0));
        let wrong = Operator::identity(4);
        assert!(matches!(
            expectation(&wrong, &one_b),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn compose_rejects_mismatched_dims() {
        let a = Operator::identity(3);
        let b = Operator::identity(4);
        assert!(a.compose(&b).is_err());
    }
}
