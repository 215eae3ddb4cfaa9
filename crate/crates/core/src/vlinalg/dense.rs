//! Small dense helpers (row-major `Vec<Vec<f64>>`) backed by faer.

use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, Side};

use super::LinalgError;

pub(crate) fn to_mat(a: &[Vec<f64>]) -> Mat<f64> {
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    Mat::from_fn(n, m, |i, j| a[i][j])
}

pub(crate) fn from_mat(a: &Mat<f64>) -> Vec<Vec<f64>> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect()).collect()
}

/// Dense symmetric-definite generalized eigenproblem `A v = λ B v`.
///
/// Returns ascending eigenvalues and B-orthonormal eigenvectors (as
/// columns, stored one vector per entry).
pub fn generalized_sym_eig(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>), LinalgError> {
    let n = a.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let bm = to_mat(b);
    let llt = bm.llt(Side::Lower).map_err(|_| LinalgError::NotPositiveDefinite)?;
    let l = llt.L().to_owned();
    // C = L⁻¹ A L⁻ᵀ, formed by two triangular solves.
    let mut c = to_mat(a);
    lower_solve_cols(&l, &mut c);
    let mut ct = c.transpose().to_owned();
    lower_solve_cols(&l, &mut ct);
    let sym = Mat::from_fn(n, n, |i, j| 0.5 * (ct[(i, j)] + ct[(j, i)]));
    let evd = sym
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| LinalgError::NoConvergence { iterations: 0, residual: f64::NAN })?;
    let values: Vec<f64> = (0..n).map(|i| evd.S()[i]).collect();
    // v = L⁻ᵀ w
    let mut w = evd.U().to_owned();
    upper_t_solve_cols(&l, &mut w);
    let vectors = (0..n).map(|k| (0..n).map(|i| w[(i, k)]).collect()).collect();
    Ok((values, vectors))
}

/// Solves `L X = B` in place (column by column).
fn lower_solve_cols(l: &Mat<f64>, b: &mut Mat<f64>) {
    let n = l.nrows();
    for k in 0..b.ncols() {
        for i in 0..n {
            let mut s = b[(i, k)];
            for j in 0..i {
                s -= l[(i, j)] * b[(j, k)];
            }
            b[(i, k)] = s / l[(i, i)];
        }
    }
}

/// Solves `Lᵀ X = B` in place.
fn upper_t_solve_cols(l: &Mat<f64>, b: &mut Mat<f64>) {
    let n = l.nrows();
    for k in 0..b.ncols() {
        for i in (0..n).rev() {
            let mut s = b[(i, k)];
            for j in i + 1..n {
                s -= l[(j, i)] * b[(j, k)];
            }
            b[(i, k)] = s / l[(i, i)];
        }
    }
}

/// Inverse of a dense nonsingular matrix (partial-pivot LU).
pub fn inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let lu = to_mat(a).partial_piv_lu();
    from_mat(&lu.inverse())
}

/// Dense solve of `A x = b` (partial-pivot LU).
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    use faer::linalg::solvers::Solve;
    let lu = to_mat(a).partial_piv_lu();
    let mut rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    lu.solve_in_place(rhs.as_mut());
    (0..b.len()).map(|i| rhs[(i, 0)]).collect()
}
