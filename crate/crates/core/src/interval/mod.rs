//! Outward-rounded interval arithmetic.
//!
//! Every operation is evaluated once in round-to-nearest and the result is
//! then pushed outward. Error-free transformations (two-sum, fma residuals)
//! tell us on which side of the exact value the rounded result landed, so an
//! endpoint is only nudged by one ulp when it actually has to be. This keeps
//! exact results exact and never touches the global rounding mode.

mod bessel;
mod fmt;
mod sparse;
mod trig;
mod vector;

pub use bessel::{bessel_j2, bessel_j2_derivative, bessel_zero_j21};
pub use fmt::{format_fixed, format_outward};
pub use sparse::SparseIntervalMatrix;
pub use trig::{cos_pi_rational, enclose_theta, iv_pi, sin_pi_rational, sincos_2pi_over, ThetaTrig};
pub use vector::{iv_norm2_lower, iv_norm2_upper, norm2_upper, IntervalVector};

use std::fmt as stdfmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntervalError {
    #[error("division by an interval containing zero: {0}")]
    DivisionByZero(Interval),
    #[error("square root of an interval with negative part: {0}")]
    NegativeSqrt(Interval),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// Below this magnitude fma residuals may be inexact (subnormal range), so
/// results are nudged unconditionally.
const TINY: f64 = 1e-290;

#[inline]
fn down(x: f64) -> f64 {
    if x == f64::INFINITY {
        f64::MAX
    } else {
        x.next_down()
    }
}

#[inline]
fn up(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        f64::MIN
    } else {
        x.next_up()
    }
}

/// Lower bound of a+b.
#[inline]
pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return if s == f64::INFINITY && a.is_finite() && b.is_finite() { f64::MAX } else { s };
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    if err < 0.0 {
        down(s)
    } else {
        s
    }
}

/// Upper bound of a+b.
#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return if s == f64::NEG_INFINITY && a.is_finite() && b.is_finite() { f64::MIN } else { s };
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    if err > 0.0 {
        up(s)
    } else {
        s
    }
}

#[inline]
pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

/// Lower bound of a*b.
#[inline]
pub fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p == 0.0 {
        // An exact zero product only arises from a zero factor unless it underflowed.
        return if a == 0.0 || b == 0.0 { 0.0 } else { down(p) };
    }
    if !p.is_finite() {
        return if p == f64::INFINITY && a.is_finite() && b.is_finite() { f64::MAX } else { p };
    }
    if p.abs() < TINY {
        return down(p);
    }
    let err = a.mul_add(b, -p);
    if err < 0.0 {
        down(p)
    } else {
        p
    }
}

/// Upper bound of a*b.
#[inline]
pub fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p == 0.0 {
        return if a == 0.0 || b == 0.0 { 0.0 } else { up(p) };
    }
    if !p.is_finite() {
        return if p == f64::NEG_INFINITY && a.is_finite() && b.is_finite() { f64::MIN } else { p };
    }
    if p.abs() < TINY {
        return up(p);
    }
    let err = a.mul_add(b, -p);
    if err > 0.0 {
        up(p)
    } else {
        p
    }
}

/// Lower bound of a/b for b != 0.
#[inline]
pub fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return if q == f64::INFINITY && a.is_finite() && b != 0.0 { f64::MAX } else { q };
    }
    if q == 0.0 {
        return if a == 0.0 { 0.0 } else { down(q) };
    }
    if q.abs() < TINY || b.abs() > 1e300 {
        return down(q);
    }
    // a - q*b, sign relative to b tells whether q is below the true quotient.
    let r = (-q).mul_add(b, a);
    let exact_above = if b > 0.0 { r > 0.0 } else { r < 0.0 };
    if r == 0.0 || exact_above {
        q
    } else {
        down(q)
    }
}

/// Upper bound of a/b for b != 0.
#[inline]
pub fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return if q == f64::NEG_INFINITY && a.is_finite() && b != 0.0 { f64::MIN } else { q };
    }
    if q == 0.0 {
        return if a == 0.0 { 0.0 } else { up(q) };
    }
    if q.abs() < TINY || b.abs() > 1e300 {
        return up(q);
    }
    let r = (-q).mul_add(b, a);
    let exact_below = if b > 0.0 { r < 0.0 } else { r > 0.0 };
    if r == 0.0 || exact_below {
        q
    } else {
        up(q)
    }
}

/// Lower bound of sqrt(a), a >= 0.
#[inline]
pub fn sqrt_down(a: f64) -> f64 {
    let s = a.sqrt();
    if s == 0.0 || !s.is_finite() {
        return s;
    }
    if a < TINY {
        return down(s).max(0.0);
    }
    let r = (-s).mul_add(s, a);
    if r < 0.0 {
        down(s)
    } else {
        s
    }
}

/// Upper bound of sqrt(a), a >= 0.
#[inline]
pub fn sqrt_up(a: f64) -> f64 {
    let s = a.sqrt();
    if s == 0.0 {
        return if a == 0.0 { 0.0 } else { up(s) };
    }
    if !s.is_finite() {
        return s;
    }
    if a < TINY {
        return up(s);
    }
    let r = (-s).mul_add(s, a);
    if r > 0.0 {
        up(s)
    } else {
        s
    }
}

/// Closed interval `[lo, hi]` of reals.
#[derive(Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const ENTIRE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    /// Builds `[lo, hi]`. Panics on NaN or reversed endpoints.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(!lo.is_nan() && !hi.is_nan(), "NaN interval endpoint");
        assert!(lo <= hi, "reversed interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval::new(x, x)
    }

    /// Interval `[x - r, x + r]` rounded outward.
    pub fn ball(x: f64, r: f64) -> Self {
        Interval::new(sub_down(x, r), add_up(x, r))
    }

    /// Smallest interval containing the rational p/q.
    pub fn ratio(p: i64, q: i64) -> Self {
        let (a, b) = (p as f64, q as f64);
        debug_assert!(p.unsigned_abs() < (1 << 53) && q.unsigned_abs() < (1 << 53));
        Interval::new(div_down(a, b), div_up(a, b))
    }

    pub fn mid(&self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        if self.lo.is_infinite() || self.hi.is_infinite() {
            return if self.lo.is_infinite() && self.hi.is_infinite() {
                0.0
            } else if self.lo.is_infinite() {
                f64::MIN
            } else {
                f64::MAX
            };
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Upper bound of the radius, so that `[mid - rad, mid + rad]` contains self.
    pub fn rad(&self) -> f64 {
        let m = self.mid();
        sub_up(self.hi, m).max(sub_up(m, self.lo))
    }

    pub fn width(&self) -> f64 {
        sub_up(self.hi, self.lo)
    }

    /// Upper bound of |x| over the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Lower bound of |x| over the interval.
    pub fn mig(&self) -> f64 {
        if self.lo <= 0.0 && self.hi >= 0.0 {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `self` lies strictly inside `other`.
    pub fn interior_of(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0.0
    }

    pub fn abs(&self) -> Interval {
        Interval { lo: self.mig(), hi: self.mag() }
    }

    pub fn sqr(&self) -> Interval {
        let a = self.abs();
        Interval { lo: mul_down(a.lo, a.lo), hi: mul_up(a.hi, a.hi) }
    }

    pub fn max(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.max(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn min(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.min(other.hi) }
    }

    /// Inflates by `abs + rel*|x|` on each side (epsilon-inflation).
    pub fn inflate(&self, rel: f64, abs: f64) -> Interval {
        let r = add_up(mul_up(self.width(), rel), abs);
        Interval { lo: sub_down(self.lo, r), hi: add_up(self.hi, r) }
    }

    pub fn sqrt(&self) -> Result<Interval, IntervalError> {
        iv_sqrt(*self)
    }

    /// Integer power by repeated multiplication (even powers use `sqr`).
    pub fn powi(&self, k: u32) -> Interval {
        match k {
            0 => Interval::ONE,
            1 => *self,
            _ if k.is_multiple_of(2) => self.powi(k / 2).sqr(),
            _ => *self * self.powi(k - 1),
        }
    }

    pub fn recip(&self) -> Result<Interval, IntervalError> {
        iv_div(Interval::ONE, *self)
    }
}

pub fn iv_add(a: Interval, b: Interval) -> Interval {
    Interval { lo: add_down(a.lo, b.lo), hi: add_up(a.hi, b.hi) }
}

pub fn iv_sub(a: Interval, b: Interval) -> Interval {
    Interval { lo: sub_down(a.lo, b.hi), hi: sub_up(a.hi, b.lo) }
}

pub fn iv_mul(a: Interval, b: Interval) -> Interval {
    if (a.lo == 0.0 && a.hi == 0.0) || (b.lo == 0.0 && b.hi == 0.0) {
        return Interval::ZERO;
    }
    // Case split keeps the common sign cases at two multiplications.
    if a.lo >= 0.0 && b.lo >= 0.0 {
        return Interval { lo: mul_down(a.lo, b.lo), hi: mul_up(a.hi, b.hi) };
    }
    if a.hi <= 0.0 && b.hi <= 0.0 {
        return Interval { lo: mul_down(a.hi, b.hi), hi: mul_up(a.lo, b.lo) };
    }
    if a.lo >= 0.0 && b.hi <= 0.0 {
        return Interval { lo: mul_down(a.hi, b.lo), hi: mul_up(a.lo, b.hi) };
    }
    if a.hi <= 0.0 && b.lo >= 0.0 {
        return Interval { lo: mul_down(a.lo, b.hi), hi: mul_up(a.hi, b.lo) };
    }
    let cands = [(a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi)];
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (x, y) in cands {
        // 0 * inf is treated as 0: the product set of finite reals never hits NaN.
        if (x == 0.0 && y.is_infinite()) || (y == 0.0 && x.is_infinite()) {
            lo = lo.min(0.0);
            hi = hi.max(0.0);
            continue;
        }
        lo = lo.min(mul_down(x, y));
        hi = hi.max(mul_up(x, y));
    }
    Interval { lo, hi }
}

pub fn iv_div(a: Interval, b: Interval) -> Result<Interval, IntervalError> {
    if b.contains_zero() {
        return Err(IntervalError::DivisionByZero(b));
    }
    let cands = [(a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi)];
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (x, y) in cands {
        if x.is_infinite() && y.is_infinite() {
            lo = lo.min(if x.signum() == y.signum() { 0.0 } else { f64::NEG_INFINITY });
            hi = hi.max(if x.signum() == y.signum() { f64::INFINITY } else { 0.0 });
            continue;
        }
        lo = lo.min(div_down(x, y));
        hi = hi.max(div_up(x, y));
    }
    Ok(Interval { lo, hi })
}

pub fn iv_sqrt(a: Interval) -> Result<Interval, IntervalError> {
    if a.lo < 0.0 {
        return Err(IntervalError::NegativeSqrt(a));
    }
    Ok(Interval { lo: sqrt_down(a.lo), hi: sqrt_up(a.hi) })
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        iv_add(self, rhs)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        iv_sub(self, rhs)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        iv_mul(self, rhs)
    }
}

/// Division operator. A divisor containing zero yields the entire real line,
/// which fails closed in every downstream positivity test; use [`iv_div`] to
/// get an explicit error instead.
impl Div for Interval {
    type Output = Interval;
    fn div(self, rhs: Interval) -> Interval {
        iv_div(self, rhs).unwrap_or(Interval::ENTIRE)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, rhs: f64) -> Interval {
        self - Interval::point(rhs)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self * Interval::point(rhs)
    }
}

impl Div<f64> for Interval {
    type Output = Interval;
    fn div(self, rhs: f64) -> Interval {
        self / Interval::point(rhs)
    }
}

impl Mul<Interval> for f64 {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        Interval::point(self) * rhs
    }
}

impl Add<Interval> for f64 {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::point(self) + rhs
    }
}

impl Sub<Interval> for f64 {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::point(self) - rhs
    }
}

impl Div<Interval> for f64 {
    type Output = Interval;
    fn div(self, rhs: Interval) -> Interval {
        Interval::point(self) / rhs
    }
}

impl AddAssign for Interval {
    fn add_assign(&mut self, rhs: Interval) {
        *self = *self + rhs;
    }
}

impl SubAssign for Interval {
    fn sub_assign(&mut self, rhs: Interval) {
        *self = *self - rhs;
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |a, b| a + b)
    }
}

impl stdfmt::Debug for Interval {
    fn fmt(&self, f: &mut stdfmt::Formatter<'_>) -> stdfmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl stdfmt::Display for Interval {
    fn fmt(&self, f: &mut stdfmt::Formatter<'_>) -> stdfmt::Result {
        write!(f, "[{}, {}]", format_outward(self.lo, 6, false), format_outward(self.hi, 6, true))
    }
}

/// Exact dot product enclosure of two point vectors.
pub fn dot_point(a: &[f64], b: &[f64]) -> Interval {
    a.iter().zip(b).map(|(&x, &y)| Interval::point(x) * Interval::point(y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_integer_sums_stay_exact() {
        let r = Interval::new(1.0, 2.0) + Interval::new(3.0, 4.0);
        assert_eq!(r, Interval::new(4.0, 6.0));
    }

    #[test]
    fn mixed_sign_product() {
        let r = Interval::new(-1.0, 2.0) * Interval::new(3.0, 4.0);
        assert_eq!(r, Interval::new(-4.0, 8.0));
    }

    #[test]
    fn dyadic_reciprocal() {
        let r = iv_div(Interval::ONE, Interval::new(2.0, 4.0)).unwrap();
        assert_eq!(r, Interval::new(0.25, 0.5));
    }

    #[test]
    fn division_by_zero_interval_is_an_error() {
        assert!(iv_div(Interval::ONE, Interval::new(-1.0, 1.0)).is_err());
        assert_eq!(Interval::ONE / Interval::new(0.0, 1.0), Interval::ENTIRE);
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(iv_sqrt(Interval::new(4.0, 9.0)).unwrap(), Interval::new(2.0, 3.0));
        assert_eq!(iv_sqrt(Interval::ZERO).unwrap(), Interval::ZERO);
        let s2 = iv_sqrt(Interval::point(2.0)).unwrap();
        // 1.41421356237309504880... lies between consecutive doubles.
        assert!(s2.lo < std::f64::consts::SQRT_2 && s2.hi >= std::f64::consts::SQRT_2);
        assert!(s2.hi.to_bits() - s2.lo.to_bits() <= 2);
        assert!(iv_sqrt(Interval::new(-1.0, 1.0)).is_err());
    }

    #[test]
    fn one_third_is_bracketed() {
        let t = Interval::ratio(1, 3);
        assert!(t.lo < t.hi);
        assert_eq!(t.hi.to_bits() - t.lo.to_bits(), 1);
        assert!((t * 3.0).contains(1.0));
    }

    #[test]
    fn overflow_widens_to_infinity() {
        let big = Interval::point(f64::MAX);
        let s = big + big;
        assert_eq!(s.hi, f64::INFINITY);
        assert_eq!(s.lo, f64::MAX);
        assert!(!s.is_finite());
    }

    #[test]
    fn inexact_sum_is_nudged() {
        let r = Interval::point(0.1) + Interval::point(0.2);
        assert!(r.lo < r.hi);
        assert!(r.contains(0.30000000000000004) || r.contains(0.3));
    }
}
