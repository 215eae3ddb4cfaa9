//! Preconditioned conjugate gradients, started from the zero vector.

use super::eigen::SparseCholesky;
use super::{axpy, dot, norm2, CsrMatrix, LinalgError};

/// Preconditioner applied as `z = P⁻¹ r`.
#[derive(Debug)]
pub enum Preconditioner<'a> {
    Identity,
    /// Diagonal scaling.
    Jacobi(Vec<f64>),
    /// Exact solve with a nearby SPD matrix.
    Cholesky(&'a SparseCholesky),
}

impl Preconditioner<'_> {
    pub fn jacobi(a: &CsrMatrix) -> Self {
        Preconditioner::Jacobi(a.diagonal().into_iter().map(|d| if d != 0.0 { 1.0 / d } else { 1.0 }).collect())
    }

    fn apply(&self, r: &[f64]) -> Vec<f64> {
        match self {
            Preconditioner::Identity => r.to_vec(),
            Preconditioner::Jacobi(d) => r.iter().zip(d).map(|(a, b)| a * b).collect(),
            Preconditioner::Cholesky(c) => c.solve(r),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CgResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `‖b − Ax‖₂ / ‖b‖₂` (recomputed explicitly at the end).
    pub relative_residual: f64,
}

/// Solves `A x = b`. The iterates stay in the Krylov space of `b`, so a
/// right-hand side orthogonal to a null direction yields an orthogonal
/// solution.
pub fn cg_solve(
    a: &CsrMatrix,
    b: &[f64],
    tol: f64,
    maxiter: usize,
    precond: &Preconditioner<'_>,
) -> Result<CgResult, LinalgError> {
    let n = a.nrows;
    if b.len() != n {
        return Err(LinalgError::Dimension(format!("rhs of length {} for a {n}×{n} matrix", b.len())));
    }
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(CgResult { x, iterations: 0, relative_residual: 0.0 });
    }
    let mut r = b.to_vec();
    let mut z = precond.apply(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=maxiter {
        a.matvec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(LinalgError::Breakdown { iterations: it, residual: norm2(&r) / bnorm });
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        if norm2(&r) <= tol * bnorm {
            let relative_residual = true_residual(a, &x, b) / bnorm;
            if relative_residual <= tol * 10.0 {
                return Ok(CgResult { x, iterations: it, relative_residual });
            }
            // Recurrence drifted: restart from the explicit residual.
            r = b.iter().zip(a.matvec(&x)).map(|(u, v)| u - v).collect();
        }
        z = precond.apply(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    Err(LinalgError::NoConvergence { iterations: maxiter, residual: true_residual(a, &x, b) / bnorm })
}

fn true_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.matvec(x);
    b.iter().zip(ax).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt()
}
