use std::ops::{Index, IndexMut};

use super::{add_down, add_up, mul_down, mul_up, sqrt_down, sqrt_up, Interval, IntervalError};

/// Vector of intervals (a box in ℝⁿ).
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IntervalVector {
    pub entries: Vec<Interval>,
}

impl IntervalVector {
    pub fn zeros(len: usize) -> Self {
        IntervalVector { entries: vec![Interval::ZERO; len] }
    }

    pub fn from_points(x: &[f64]) -> Self {
        IntervalVector { entries: x.iter().map(|&v| Interval::point(v)).collect() }
    }

    /// Box `x ± r` (same radius in every coordinate).
    pub fn from_ball(x: &[f64], r: f64) -> Self {
        IntervalVector { entries: x.iter().map(|&v| Interval::ball(v, r)).collect() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.entries.iter()
    }

    pub fn mid(&self) -> Vec<f64> {
        self.entries.iter().map(Interval::mid).collect()
    }

    pub fn max_rad(&self) -> f64 {
        self.entries.iter().map(Interval::rad).fold(0.0, f64::max)
    }

    /// Upper bound of the 2-norm of the radius vector.
    pub fn rad_norm2(&self) -> f64 {
        let mut s = 0.0;
        for e in &self.entries {
            let r = e.rad();
            s = add_up(s, mul_up(r, r));
        }
        sqrt_up(s)
    }

    pub fn check_len(&self, expected: usize) -> Result<(), IntervalError> {
        if self.len() == expected {
            Ok(())
        } else {
            Err(IntervalError::Dimension { expected, got: self.len() })
        }
    }

    /// Interval inner product Σ aᵢbᵢ.
    pub fn dot(&self, other: &IntervalVector) -> Interval {
        self.entries.iter().zip(&other.entries).map(|(&a, &b)| a * b).sum()
    }

    pub fn scale(&self, s: Interval) -> IntervalVector {
        IntervalVector { entries: self.entries.iter().map(|&e| e * s).collect() }
    }

    pub fn add(&self, other: &IntervalVector) -> IntervalVector {
        IntervalVector { entries: self.entries.iter().zip(&other.entries).map(|(&a, &b)| a + b).collect() }
    }

    pub fn sub(&self, other: &IntervalVector) -> IntervalVector {
        IntervalVector { entries: self.entries.iter().zip(&other.entries).map(|(&a, &b)| a - b).collect() }
    }

    pub fn all_finite(&self) -> bool {
        self.entries.iter().all(Interval::is_finite)
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.len() == self.len() && self.entries.iter().zip(x).all(|(e, &v)| e.contains(v))
    }
}

impl Index<usize> for IntervalVector {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.entries[i]
    }
}

impl IndexMut<usize> for IntervalVector {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.entries[i]
    }
}

impl FromIterator<Interval> for IntervalVector {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        IntervalVector { entries: iter.into_iter().collect() }
    }
}

/// Upper bound of sup{‖x‖₂ : x ∈ v}, accumulated with upward rounding.
pub fn iv_norm2_upper(v: &IntervalVector) -> f64 {
    let mut s = 0.0;
    for e in &v.entries {
        let m = e.mag();
        s = add_up(s, mul_up(m, m));
    }
    sqrt_up(s)
}

/// Lower bound of inf{‖x‖₂ : x ∈ v}.
pub fn iv_norm2_lower(v: &IntervalVector) -> f64 {
    let mut s = 0.0;
    for e in &v.entries {
        let m = e.mig();
        s = add_down(s, mul_down(m, m));
    }
    sqrt_down(s)
}

/// Upper bound of ‖x‖₂ for a point vector.
pub fn norm2_upper(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for &v in x {
        s = add_up(s, mul_up(v, v));
    }
    sqrt_up(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pythagorean_triple() {
        let v = IntervalVector::from_points(&[3.0, 4.0]);
        let n = iv_norm2_upper(&v);
        assert!((5.0..=5.0 * (1.0 + 4.0 * f64::EPSILON)).contains(&n));
    }

    #[test]
    fn zero_and_symmetric() {
        assert_eq!(iv_norm2_upper(&IntervalVector::zeros(7)), 0.0);
        let v = IntervalVector { entries: vec![Interval::new(-1.0, 1.0)] };
        assert!(iv_norm2_upper(&v) >= 1.0);
    }
}
