//! Floating-point generalized eigensolver (no rigor claimed).

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::{Mat, Side};

use super::dense::generalized_sym_eig;
use super::{dot, CsrMatrix, LinalgError};

/// Sparse Cholesky factorization of an SPD matrix.
pub struct SparseCholesky {
    llt: Llt<usize, f64>,
    dim: usize,
}

impl std::fmt::Debug for SparseCholesky {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseCholesky").field("dim", &self.dim).finish()
    }
}

impl SparseCholesky {
    pub fn new(a: &CsrMatrix) -> Result<Self, LinalgError> {
        let llt = a.to_faer_lower().sp_cholesky(Side::Lower).map_err(|_| LinalgError::NotPositiveDefinite)?;
        Ok(SparseCholesky { llt, dim: a.nrows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut rhs = Mat::from_fn(self.dim, 1, |i, _| b[i]);
        self.llt.solve_in_place(rhs.as_mut());
        (0..self.dim).map(|i| rhs[(i, 0)]).collect()
    }

    /// Solves for several right-hand sides at once.
    pub fn solve_many(&self, bs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut rhs = Mat::from_fn(self.dim, bs.len(), |i, k| bs[k][i]);
        self.llt.solve_in_place(rhs.as_mut());
        (0..bs.len()).map(|k| (0..self.dim).map(|i| rhs[(i, k)]).collect()).collect()
    }
}

/// Approximate eigenpairs, ascending, with M-normalized vectors.
#[derive(Clone, Debug)]
pub struct FpEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub iterations: usize,
    /// Relative residuals `‖Kx − λMx‖ / (λ‖Mx‖)`.
    pub residuals: Vec<f64>,
}

/// Below this size the problem is solved densely.
const DENSE_LIMIT: usize = 400;
const MAX_SWEEPS: usize = 500;
const TOL: f64 = 1e-13;
const STALL_TOL: f64 = 1e-8;
const STALL_SWEEPS: usize = 6;

/// The `count` smallest generalized eigenpairs of `(K, M)`.
pub fn fp_eigs(k: &CsrMatrix, m: &CsrMatrix, count: usize) -> Result<FpEigen, LinalgError> {
    let n = k.nrows;
    if count == 0 || count > n {
        return Err(LinalgError::Dimension(format!("requested {count} eigenpairs of a {n}×{n} problem")));
    }
    if n <= DENSE_LIMIT {
        let (values, vectors) = generalized_sym_eig(&k.to_dense(), &m.to_dense())?;
        return Ok(finish(k, m, values[..count].to_vec(), vectors[..count].to_vec(), 0));
    }
    subspace_iteration(k, m, count)
}

fn finish(k: &CsrMatrix, m: &CsrMatrix, values: Vec<f64>, mut vectors: Vec<Vec<f64>>, iterations: usize) -> FpEigen {
    for v in &mut vectors {
        // Fix the sign so that the largest entry is positive.
        let big = v.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        if big < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let residuals = values.iter().zip(&vectors).map(|(&l, v)| relative_residual(k, m, l, v)).collect();
    FpEigen { values, vectors, iterations, residuals }
}

fn relative_residual(k: &CsrMatrix, m: &CsrMatrix, lambda: f64, v: &[f64]) -> f64 {
    let kv = k.matvec(v);
    let mv = m.matvec(v);
    let r: f64 = kv.iter().zip(&mv).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
    r / (lambda.abs() * dot(&mv, &mv).sqrt()).max(f64::MIN_POSITIVE)
}

/// Shift-free inverse subspace iteration with Rayleigh–Ritz projection.
fn subspace_iteration(k: &CsrMatrix, m: &CsrMatrix, count: usize) -> Result<FpEigen, LinalgError> {
    let n = k.nrows;
    let p = (count + 4).min(n);
    let chol = SparseCholesky::new(k)?;
    // Deterministic, well-mixed start block; the first vector is positive.
    let mut x: Vec<Vec<f64>> = (0..p)
        .map(|b| (0..n).map(|i| if b == 0 { 1.0 } else { ((i + 1) as f64 * (0.7 + b as f64 * 1.3)).sin() }).collect())
        .collect();
    let mut last = f64::INFINITY;
    let mut best = f64::INFINITY;
    let mut since_best = 0;
    for sweep in 1..=MAX_SWEEPS {
        let mx: Vec<Vec<f64>> = x.iter().map(|v| m.matvec(v)).collect();
        let y = chol.solve_many(&mx);
        let ky: Vec<Vec<f64>> = y.iter().map(|v| k.matvec(v)).collect();
        let my: Vec<Vec<f64>> = y.iter().map(|v| m.matvec(v)).collect();
        let proj =
            |a: &[Vec<f64>]| -> Vec<Vec<f64>> { (0..p).map(|i| (0..p).map(|j| dot(&y[i], &a[j])).collect()).collect() };
        let (kr, mr) = (proj(&ky), proj(&my));
        let sym = |a: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            (0..p).map(|i| (0..p).map(|j| 0.5 * (a[i][j] + a[j][i])).collect()).collect()
        };
        let (values, q) = generalized_sym_eig(&sym(kr), &sym(mr))?;
        x = (0..p)
            .map(|c| {
                let mut v = vec![0.0; n];
                for (j, yj) in y.iter().enumerate() {
                    super::axpy(q[c][j], yj, &mut v);
                }
                v
            })
            .collect();
        let worst = (0..count).map(|c| relative_residual(k, m, values[c], &x[c])).fold(0.0, f64::max);
        // Residuals stall at roughly u·cond; accept once they are small and
        // have stopped improving for a few sweeps.
        if worst < 0.5 * best {
            best = worst;
            since_best = 0;
        } else {
            since_best += 1;
        }
        if worst < TOL || (worst < STALL_TOL && since_best >= STALL_SWEEPS) {
            return Ok(finish(k, m, values[..count].to_vec(), x[..count].to_vec(), sweep));
        }
        last = worst;
    }
    Err(LinalgError::NoConvergence { iterations: MAX_SWEEPS, residual: last })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1D Laplacian with lumped identity mass: eigenvalues 2 − 2cos(kπ/(n+1)).
    fn laplace_1d(n: usize) -> (CsrMatrix, CsrMatrix) {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let id: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        (CsrMatrix::from_triplets(n, n, &t), CsrMatrix::from_triplets(n, n, &id))
    }

    #[test]
    fn scalar_problem() {
        let k = CsrMatrix::from_triplets(1, 1, &[(0, 0, 6.0)]);
        let m = CsrMatrix::from_triplets(1, 1, &[(0, 0, 2.0)]);
        let e = fp_eigs(&k, &m, 1).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-15);
        assert!((e.vectors[0][0] - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sparse_path_matches_closed_form() {
        let n = 600;
        let (k, m) = laplace_1d(n);
        let e = fp_eigs(&k, &m, 3).unwrap();
        assert!(e.iterations > 0);
        for (i, &v) in e.values.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((i + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-12 * exact.max(1e-3), "{v} vs {exact}");
        }
        assert!(e.vectors[0].iter().all(|&x| x > 0.0));
    }

    #[test]
    fn rejects_bad_count() {
        let (k, m) = laplace_1d(4);
        assert!(fp_eigs(&k, &m, 5).is_err());
    }
}
