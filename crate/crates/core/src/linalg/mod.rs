//! Dense complex linear algebra: Hermitian eigensolvers, singular values,
//! Kronecker products and tensor-factor manipulation.
//!
//! Conventions used everywhere in the crate:
//!
//! * matrices are stored row-major;
//! * composite spaces are ordered big-endian, so the first tensor factor is
//!   the most significant block of a basis index. For a shape `[d0, d1, d2]`
//!   the basis index of `|i0 i1 i2⟩` is `(i0 * d1 + i1) * d2 + i2`.

mod eigen;
mod matrix;
mod svd;
mod tensor;

pub use eigen::{eig_hermitian, eig_hermitian_tridiagonal, eigvals_symmetric_tridiagonal, EigenDecomposition};
pub use matrix::{dense_from_upper, hermitian_basis, ComplexMatrix, HermitianMatrix, C64};
pub(crate) use matrix::{ONE, ZERO};
pub use svd::singular_values;
pub use tensor::{kron, partial_trace, partial_trace_general, partial_transpose, permute_factors, TensorShape};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (entry defect {0:.3e})")]
    NonHermitianInput(f64),
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),
    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("bad tensor shape: {0}")]
    BadShape(String),
    #[error("bad permutation: {0}")]
    BadPermutation(String),
    #[error("matrix has non-finite entries")]
    NonFinite,
}

/// Applies `f` to the eigenvalues of a Hermitian matrix.
pub fn hermitian_function(m: &HermitianMatrix, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix, LinalgError> {
    let eig = eig_hermitian_tridiagonal(m)?;
    Ok(eig.reconstruct_with(f))
}

/// Minimum eigenvalue, computed with the Jacobi solver.
pub fn min_eigenvalue(m: &HermitianMatrix) -> Result<f64, LinalgError> {
    Ok(eig_hermitian(m)?.values[0])
}

/// Trace norm of a Hermitian matrix.
pub fn trace_norm(m: &HermitianMatrix) -> Result<f64, LinalgError> {
    Ok(eig_hermitian_tridiagonal(m)?.values.iter().map(|l| l.abs()).sum())
}
