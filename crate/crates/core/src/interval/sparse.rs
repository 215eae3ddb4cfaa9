use super::{add_up, mul_up, sqrt_up, Interval, IntervalError, IntervalVector};
use crate::vlinalg::CsrMatrix;

/// Square sparse matrix with interval entries in compressed-row storage.
///
/// Entries that are exactly `[0, 0]` are never stored.
#[derive(Clone, Debug)]
pub struct SparseIntervalMatrix {
    pub dim: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<Interval>,
}

impl SparseIntervalMatrix {
    /// Assembles from (row, col, value) triplets. Duplicates are summed in the
    /// order they appear, so the result is reproducible bit for bit.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, Interval)]) -> Self {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&t| (triplets[t].0, triplets[t].1));
        let mut indptr = vec![0usize; dim + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<Interval> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for &t in &order {
            let (i, j, v) = triplets[t];
            assert!(i < dim && j < dim, "triplet ({i},{j}) out of range {dim}");
            if last == Some((i, j)) {
                let k = values.len() - 1;
                values[k] += v;
            } else {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..dim {
            indptr[i + 1] += indptr[i];
        }
        let mut m = SparseIntervalMatrix { dim, indptr, indices, values };
        m.prune_zeros();
        m
    }

    pub fn identity(dim: usize) -> Self {
        let t: Vec<_> = (0..dim).map(|i| (i, i, Interval::ONE)).collect();
        Self::from_triplets(dim, &t)
    }

    fn prune_zeros(&mut self) {
        let mut indptr = vec![0usize; self.dim + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.dim {
            for k in self.indptr[i]..self.indptr[i + 1] {
                let v = self.values[k];
                if !(v.lo == 0.0 && v.hi == 0.0) {
                    indices.push(self.indices[k]);
                    values.push(v);
                }
            }
            indptr[i + 1] = indices.len();
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Interval)> + '_ {
        (self.indptr[i]..self.indptr[i + 1]).map(move |k| (self.indices[k], self.values[k]))
    }

    pub fn get(&self, i: usize, j: usize) -> Option<Interval> {
        let r = &self.indices[self.indptr[i]..self.indptr[i + 1]];
        r.binary_search(&j).ok().map(|p| self.values[self.indptr[i] + p])
    }

    pub fn diagonal(&self) -> Vec<Interval> {
        (0..self.dim).map(|i| self.get(i, i).unwrap_or(Interval::ZERO)).collect()
    }

    /// Every stored (i,j) has a stored (j,i) with an identical interval.
    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| self.row(i).all(|(j, v)| self.get(j, i) == Some(v)))
    }

    pub fn is_structurally_symmetric(&self) -> bool {
        (0..self.dim).all(|i| self.row(i).all(|(j, _)| self.get(j, i).is_some()))
    }

    /// Interval product with a point vector.
    pub fn mul_point(&self, x: &[f64]) -> IntervalVector {
        assert_eq!(x.len(), self.dim);
        (0..self.dim).map(|i| self.row(i).map(|(j, a)| a * Interval::point(x[j])).sum()).collect()
    }

    /// Interval product with an interval vector.
    pub fn mul_vec(&self, x: &IntervalVector) -> Result<IntervalVector, IntervalError> {
        x.check_len(self.dim)?;
        Ok((0..self.dim).map(|i| self.row(i).map(|(j, a)| a * x[j]).sum()).collect())
    }

    /// Linear combination `a·self + b·other` (same dimension).
    pub fn lin_comb(&self, a: Interval, other: &SparseIntervalMatrix, b: Interval) -> SparseIntervalMatrix {
        assert_eq!(self.dim, other.dim);
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.dim {
            t.extend(self.row(i).map(|(j, v)| (i, j, v * a)));
            t.extend(other.row(i).map(|(j, v)| (i, j, v * b)));
        }
        SparseIntervalMatrix::from_triplets(self.dim, &t)
    }

    pub fn scale(&self, s: Interval) -> SparseIntervalMatrix {
        let mut m = self.clone();
        for v in &mut m.values {
            *v = *v * s;
        }
        m.prune_zeros();
        m
    }

    /// Principal submatrix on `keep` (sorted, distinct indices).
    pub fn restrict(&self, keep: &[usize]) -> SparseIntervalMatrix {
        let mut map = vec![usize::MAX; self.dim];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut t = Vec::new();
        for (new_i, &old_i) in keep.iter().enumerate() {
            for (j, v) in self.row(old_i) {
                if map[j] != usize::MAX {
                    t.push((new_i, map[j], v));
                }
            }
        }
        SparseIntervalMatrix::from_triplets(keep.len(), &t)
    }

    /// Upper bound of the ∞-norm (max absolute row sum) over the enclosure.
    pub fn norm_inf_upper(&self) -> f64 {
        (0..self.dim).map(|i| self.row(i).fold(0.0, |s, (_, v)| add_up(s, v.mag()))).fold(0.0, f64::max)
    }

    /// Upper bound of the maximal column sum of magnitudes.
    pub fn norm_one_upper(&self) -> f64 {
        let mut col = vec![0.0f64; self.dim];
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                col[j] = add_up(col[j], v.mag());
            }
        }
        col.into_iter().fold(0.0, f64::max)
    }

    /// Upper bound of the spectral norm of every member, `√(‖A‖₁‖A‖_∞)`.
    pub fn norm2_upper(&self) -> f64 {
        sqrt_up(mul_up(self.norm_one_upper(), self.norm_inf_upper()))
    }

    /// Upper bound of the ∞-norm of the radius matrix (bounds ‖A − mid A‖₂ for symmetric A).
    pub fn rad_norm_inf_upper(&self) -> f64 {
        (0..self.dim).map(|i| self.row(i).fold(0.0, |s, (_, v)| add_up(s, v.rad()))).fold(0.0, f64::max)
    }

    /// Floating midpoint matrix.
    pub fn mid(&self) -> CsrMatrix {
        CsrMatrix {
            nrows: self.dim,
            ncols: self.dim,
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            values: self.values.iter().map(Interval::mid).collect(),
        }
    }

    /// Dense copy (tests and small systems only).
    pub fn to_dense(&self) -> Vec<Vec<Interval>> {
        let mut d = vec![vec![Interval::ZERO; self.dim]; self.dim];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }

    /// Debug export as `i j lo hi` lines with outward-rounded decimals.
    pub fn to_triplet_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                let _ = writeln!(
                    s,
                    "{i} {j} {} {}",
                    super::format_outward(v.lo, 17, false),
                    super::format_outward(v.hi, 17, true)
                );
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_sum_and_zeros_vanish() {
        let t = vec![
            (0, 0, Interval::point(1.0)),
            (0, 1, Interval::point(2.0)),
            (0, 1, Interval::point(-2.0)),
            (1, 0, Interval::point(0.0)),
            (1, 1, Interval::point(3.0)),
            (0, 0, Interval::point(0.5)),
        ];
        let m = SparseIntervalMatrix::from_triplets(2, &t);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 0), Some(Interval::point(1.5)));
        assert!(m.get(0, 1).is_none());
        assert!(m.is_symmetric());
    }

    #[test]
    fn restriction_and_products() {
        let t = vec![
            (0, 0, Interval::point(2.0)),
            (0, 2, Interval::point(-1.0)),
            (2, 0, Interval::point(-1.0)),
            (1, 1, Interval::point(5.0)),
            (2, 2, Interval::point(2.0)),
        ];
        let m = SparseIntervalMatrix::from_triplets(3, &t);
        let r = m.restrict(&[0, 2]);
        assert_eq!(r.dim, 2);
        let y = r.mul_point(&[1.0, 1.0]);
        assert_eq!(y[0], Interval::point(1.0));
        assert_eq!(m.norm_inf_upper(), 5.0);
    }
}
