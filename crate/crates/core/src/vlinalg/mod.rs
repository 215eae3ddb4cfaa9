//! Validated linear algebra: floating-point solvers produce candidates,
//! interval residual bounds turn them into certified enclosures.

mod cg;
mod csr;
pub mod dense;
mod eigen;
mod saddle;
mod spd;
mod verify;

use thiserror::Error;

pub use cg::{cg_solve, CgResult, Preconditioner};
pub use csr::{axpy, dot, norm2, CsrMatrix};
pub use eigen::{fp_eigs, FpEigen, SparseCholesky};
pub use saddle::{saddle_enclosure, SaddleRhs, SaddleSolution};
pub use spd::cholesky_spd_check;
pub use verify::{eigvec_error_bound, krawczyk_eigenpair, residual_enclosure, EigenEnclosure, EnclosureMethod};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not (numerically) positive definite")]
    NotPositiveDefinite,
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("breakdown at iteration {iterations} (residual {residual:e})")]
    Breakdown { iterations: usize, residual: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("cannot certify: {0}")]
    Uncertified(String),
}
