use alloc::vec::Vec;

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use crate::C64;

/// Eigenvalues of a Hermitian row-major matrix, ascending.
pub(crate) fn hermitian_eigenvalues(dim: usize, data: &[C64]) -> Option<Vec<f64>> {
    let m = Mat::<C64>::from_fn(dim, dim, |i, j| data[i * dim + j]);
    m.self_adjoint_eigenvalues(Side::Lower).ok()
}

/// Eigenpairs of a Hermitian row-major matrix, ascending by eigenvalue.
pub(crate) fn hermitian_eigen(dim: usize, data: &[C64]) -> Option<Vec<(f64, Vec<C64>)>> {
    let m = Mat::<C64>::from_fn(dim, dim, |i, j| data[i * dim + j]);
    let evd = m.self_adjoint_eigen(Side::Lower).ok()?;
    let s = evd.S().column_vector();
    let u = evd.U();
    Some(
        (0..dim)
            .map(|k| (s[k].re, (0..dim).map(|i| u[(i, k)]).collect()))
            .collect(),
    )
}

/// Solve the dense real system `A x = rhs` with A given column-major.
pub(crate) fn solve_real(n: usize, a_col_major: &[f64], rhs: &[f64]) -> Vec<f64> {
    let a = Mat::<f64>::from_fn(n, n, |i, j| a_col_major[j * n + i]);
    let b = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
    let x = a.partial_piv_lu().solve(&b);
    (0..n).map(|i| x[(i, 0)]).collect()
}

/// Solve the sparse real system `A x = rhs` from (row, col, value) entries;
/// repeated positions are summed. `None` if the factorization fails.
pub(crate) fn solve_sparse_real(n: usize, entries: &[(usize, usize, f64)], rhs: &[f64]) -> Option<Vec<f64>> {
    let triplets: Vec<Triplet<usize, usize, f64>> = entries.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets).ok()?;
    let lu = a.sp_lu().ok()?;
    let mut b = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
    lu.solve_in_place(b.as_mut());
    Some((0..n).map(|i| b[(i, 0)]).collect())
}

/// Solve the dense complex system `A x = rhs` with A given row-major.
pub(crate) fn solve_complex(n: usize, a_row_major: &[C64], rhs: &[C64]) -> Vec<C64> {
    let a = Mat::<C64>::from_fn(n, n, |i, j| a_row_major[i * n + j]);
    let b = Mat::<C64>::from_fn(n, 1, |i, _| rhs[i]);
    let x = a.partial_piv_lu().solve(&b);
    (0..n).map(|i| x[(i, 0)]).collect()
}
