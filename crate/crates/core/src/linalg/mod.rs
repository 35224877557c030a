//! Dense real linear-algebra kernels used by the solvers and projection
//! oracles: the regularized least-squares solve, full and partial symmetric
//! eigendecomposition, and projection onto the unit simplex.

mod dense;
mod eig;
mod lanczos;
mod qr;
mod simplex;
pub mod vec;

pub use dense::{DenseMatrix, SparseRowMat, SymMatrix};
pub use eig::{sym_eig_full, EigPair, JACOBI_MAX_DIM, JACOBI_MAX_SWEEPS};
pub use lanczos::sym_eig_topk;
pub use qr::{cholesky_solve, householder_lstsq, solve_lm_system, solve_lm_system_sparse};
pub use simplex::project_simplex;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("non-finite value in input")]
    NonFinite,
    #[error("eigensolver did not converge within its iteration budget")]
    NoConverge,
    #[error("matrix is not positive definite")]
    NotSpd,
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
}

pub(crate) fn check_finite(xs: &[f64]) -> Result<(), LinalgError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite)
    }
}
