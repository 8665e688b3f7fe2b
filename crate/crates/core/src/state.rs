use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{FockBasis, Operator};
use crate::linalg;
use crate::C64;

/// Density matrix of the two-mode system, row-major over the flat Fock index.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: FockBasis,
    data: Vec<C64>,
}

/// Deviation of a density matrix from the physical constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    /// Largest |ρ_ij − ρ_ji*| divided by the largest |ρ_ij|.
    pub hermiticity: f64,
    /// |Tr ρ − 1|
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub const HERMITICITY_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-10;
    pub const POSITIVITY_TOL: f64 = -1e-8;

    pub fn is_physical(&self) -> bool {
        self.hermiticity <= Self::HERMITICITY_TOL
            && self.trace_error <= Self::TRACE_TOL
            && self.min_eigenvalue >= Self::POSITIVITY_TOL
    }
}

impl DensityMatrix {
    pub fn vacuum(basis: &FockBasis) -> Self {
        Self::fock(basis, 0, 0)
    }

    /// |m,n⟩⟨m,n|
    pub fn fock(basis: &FockBasis, m: usize, n: usize) -> Self {
        let mut data = vec![C64::new(0.0, 0.0); basis.dim() * basis.dim()];
        let k = basis.index(m, n);
        data[k * basis.dim() + k] = C64::new(1.0, 0.0);
        Self { basis: *basis, data }
    }

    /// Normalized projector onto `ket`.
    pub fn pure(basis: &FockBasis, ket: &[C64]) -> Result<Self> {
        if ket.len() != basis.dim() {
            return Err(Error::DimMismatch {
                expected: basis.dim(),
                found: ket.len(),
            });
        }
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if !(norm > 0.0) {
            return Err(Error::InvalidParams {
                name: "ket",
                reason: "zero vector has no projector",
            });
        }
        let op = Operator::outer(ket, ket)?.scaled(C64::new(1.0 / norm, 0.0));
        Ok(Self {
            basis: *basis,
            data: op.into_vec(),
        })
    }

    /// Wrap an operator without checking trace or positivity.
    pub fn from_operator(basis: &FockBasis, op: Operator) -> Result<Self> {
        op.check_dim(basis.dim())?;
        Ok(Self {
            basis: *basis,
            data: op.into_vec(),
        })
    }

    pub(crate) fn from_raw(basis: FockBasis, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), basis.dim() * basis.dim());
        Self { basis, data }
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn to_operator(&self) -> Operator {
        Operator::from_row_major(self.dim(), self.data.clone()).expect("square by construction")
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// Diagonal entry ⟨m,n|ρ|m,n⟩.
    pub fn population(&self, m: usize, n: usize) -> f64 {
        let k = self.basis.index(m, n);
        self.get(k, k).re
    }

    /// Replace ρ by (ρ + ρ†)/2.
    pub fn symmetrize(&mut self) {
        let n = self.dim();
        for i in 0..n {
            self.data[i * n + i].im = 0.0;
            for j in i + 1..n {
                let avg = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg.conj();
            }
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(self.dim(), &self.data)
            .unwrap_or_else(|| vec![f64::nan(); self.dim()])
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::infinity(), f64::min)
    }

    /// ½‖ρ − σ‖₁
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let diff: Vec<C64> = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        let eig = linalg::hermitian_eigenvalues(self.dim(), &diff).ok_or(Error::NoConvergence {
            residual: f64::nan(),
        })?;
        Ok(0.5 * eig.iter().map(|e| e.abs()).sum::<f64>())
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        let scale = self.data.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let herm = self.to_operator().hermiticity_error();
        StateDiagnostics {
            hermiticity: if scale > 0.0 { herm / scale } else { herm },
            trace_error: (self.trace() - C64::new(1.0, 0.0)).norm(),
            min_eigenvalue: self.min_eigenvalue(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_basis;

    #[test]
    fn fock_state_is_physical() {
        let basis = build_basis(3, 2).unwrap();
        let rho = DensityMatrix::fock(&basis, 2, 1);
        let d = rho.diagnostics();
        assert!(d.is_physical(), "{d:?}");
        assert_eq!(rho.population(2, 1), 1.0);
    }

    #[test]
    fn pure_state_normalizes() {
        let basis = build_basis(2, 1).unwrap();
        let mut ket = vec![C64::new(0.0, 0.0); basis.dim()];
        ket[0] = C64::new(3.0, 0.0);
        ket[basis.index(1, 0)] = C64::new(0.0, 4.0);
        let rho = DensityMatrix::pure(&basis, &ket).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        assert!((rho.population(1, 0) - 0.64).abs() < 1e-15);
        assert!(rho.min_eigenvalue() > -1e-14);
    }

    #[test]
    fn trace_distance_of_orthogonal_states_is_one() {
        let basis = build_basis(2, 1).unwrap();
        let a = DensityMatrix::fock(&basis, 0, 0);
        let b = DensityMatrix::fock(&basis, 1, 1);
        assert!((a.trace_distance(&b).unwrap() - 1.0).abs() < 1e-12);
        assert!(a.trace_distance(&a).unwrap() < 1e-15);
    }

    #[test]
    fn symmetrize_removes_antihermitian_part() {
        let basis = build_basis(2, 1).unwrap();
        let mut rho = DensityMatrix::vacuum(&basis);
        rho.as_mut_slice()[1] = C64::new(0.2, 0.1);
        rho.symmetrize();
        assert_eq!(rho.get(0, 1), C64::new(0.1, 0.05));
        assert_eq!(rho.get(1, 0), C64::new(0.1, -0.05));
    }
}
