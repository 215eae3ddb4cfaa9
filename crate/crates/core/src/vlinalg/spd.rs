//! Certified positive definiteness of symmetric interval matrices.
//!
//! A floating Cholesky factor `L` of `mid(A) − sI` is computed on the
//! envelope of a reverse Cuthill–McKee ordering. Then `A − sI − LLᵀ` is
//! enclosed in interval arithmetic for every matrix in the box; since
//! `LLᵀ ⪰ 0`, `λ_min(A) ≥ s − ‖A − sI − LLᵀ‖_∞`, and a positive right side
//! proves definiteness.

use std::collections::VecDeque;

use crate::interval::{add_up, Interval, SparseIntervalMatrix};

/// Returns `true` only if every symmetric matrix in `a` is positive
/// definite. `false` means "not proven".
pub fn cholesky_spd_check(a: &SparseIntervalMatrix) -> bool {
    let n = a.dim;
    if n == 0 {
        return true;
    }
    if !a.is_structurally_symmetric() || a.diagonal().iter().any(|d| !(d.lo > 0.0)) {
        return false;
    }
    let scaled = equilibrate(a);
    let a = &scaled;
    let perm = reverse_cuthill_mckee(a);
    let mut inv = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    // Lower envelope rows in the permuted numbering.
    let mut first = (0..n).collect::<Vec<_>>();
    let mut rows: Vec<Vec<(usize, Interval)>> = vec![Vec::new(); n];
    for i in 0..n {
        for (j, v) in a.row(i) {
            let (pi, pj) = (inv[i], inv[j]);
            if pj <= pi {
                first[pi] = first[pi].min(pj);
                rows[pi].push((pj, v));
            }
        }
    }
    let dense_row = |i: usize| -> Vec<Interval> {
        let mut r = vec![Interval::ZERO; i - first[i] + 1];
        for &(j, v) in &rows[i] {
            r[j - first[i]] = v;
        }
        r
    };

    let mid_diag_min = a.diagonal().iter().map(|d| d.lo).fold(f64::INFINITY, f64::min);
    let spread = a.rad_norm_inf_upper();
    let mut shift = 0.0;
    for _ in 0..6 {
        let Some(l) = envelope_cholesky(n, &first, &dense_row, shift) else {
            return false;
        };
        let defect = residual_norm(n, &first, &dense_row, &l, shift);
        if shift > 0.0 && shift > defect {
            return true;
        }
        // The defect is the matrix spread plus rounding; retry with a shift
        // covering the spread and twice the rounding part.
        let next = add_up(spread, 2.0 * (defect - spread).max(f64::MIN_POSITIVE));
        if next >= mid_diag_min {
            return false;
        }
        shift = next.max(shift * 2.0);
    }
    false
}

/// `DAD` with `D` a diagonal of powers of two bringing the diagonal near 1.
/// The scaling is exact and preserves definiteness.
fn equilibrate(a: &SparseIntervalMatrix) -> SparseIntervalMatrix {
    let d: Vec<f64> = a.diagonal().iter().map(|x| 2f64.powi(-(x.mid().sqrt().log2().round() as i32))).collect();
    let mut t = Vec::with_capacity(a.nnz());
    for i in 0..a.dim {
        for (j, v) in a.row(i) {
            // Products with powers of two are exact barring over/underflow.
            t.push((i, j, v * (d[i] * d[j])));
        }
    }
    SparseIntervalMatrix::from_triplets(a.dim, &t)
}

/// Floating Cholesky of `mid(A) − sI` on the envelope; `None` on a
/// non-positive pivot.
fn envelope_cholesky(
    n: usize,
    first: &[usize],
    dense_row: &dyn Fn(usize) -> Vec<Interval>,
    shift: f64,
) -> Option<Vec<Vec<f64>>> {
    let mut l: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let fi = first[i];
        let mut row: Vec<f64> = dense_row(i).iter().map(Interval::mid).collect();
        *row.last_mut().unwrap() -= shift;
        for j in fi..i {
            let fj = first[j];
            let lo = fi.max(fj);
            let mut s = row[j - fi];
            for k in lo..j {
                s -= row[k - fi] * l[j][k - fj];
            }
            row[j - fi] = s / l[j][j - fj];
        }
        let mut d = row[i - fi];
        for k in fi..i {
            d -= row[k - fi] * row[k - fi];
        }
        if !(d > 0.0) {
            return None;
        }
        row[i - fi] = d.sqrt();
        l.push(row);
    }
    Some(l)
}

/// Upper bound of `‖A − sI − LLᵀ‖_∞` over all `A` in the interval matrix.
fn residual_norm(
    n: usize,
    first: &[usize],
    dense_row: &dyn Fn(usize) -> Vec<Interval>,
    l: &[Vec<f64>],
    shift: f64,
) -> f64 {
    let mut rowsum = vec![0.0f64; n];
    for i in 0..n {
        let fi = first[i];
        let a = dense_row(i);
        for j in fi..=i {
            let fj = first[j];
            let mut e = a[j - fi];
            if i == j {
                e -= Interval::point(shift);
            }
            for k in fi.max(fj)..=j {
                e -= Interval::point(l[i][k - fi]) * Interval::point(l[j][k - fj]);
            }
            let mag = e.mag();
            rowsum[i] = add_up(rowsum[i], mag);
            if i != j {
                rowsum[j] = add_up(rowsum[j], mag);
            }
        }
    }
    rowsum.into_iter().fold(0.0, f64::max)
}

/// Bandwidth-reducing ordering; returns `perm[new] = old`.
fn reverse_cuthill_mckee(a: &SparseIntervalMatrix) -> Vec<usize> {
    let n = a.dim;
    let adj: Vec<Vec<usize>> = (0..n).map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j != i).collect()).collect();
    let deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let start = (0..n).filter(|&i| !seen[i]).min_by_key(|&i| deg[i]).unwrap();
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            let mut next: Vec<usize> = adj[i].iter().copied().filter(|&j| !seen[j]).collect();
            next.sort_by_key(|&j| deg[j]);
            for j in next {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}
