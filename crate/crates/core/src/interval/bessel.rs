//! First positive zero of the Bessel function J₂ (first kind).

use super::{Interval, IntervalError};

/// Number of power-series terms kept; the tail bound below assumes |x| ≤ 8.
const TERMS: usize = 40;

/// Enclosure of J₂(x) = Σ (−1)^k (x/2)^{2k+2} / (k!(k+2)!) for `x ⊂ [−8, 8]`.
pub fn bessel_j2(x: Interval) -> Result<Interval, IntervalError> {
    series(x, false)
}

/// Enclosure of J₂'(x) for `x ⊂ [−8, 8]`.
pub fn bessel_j2_derivative(x: Interval) -> Result<Interval, IntervalError> {
    series(x, true)
}

fn series(x: Interval, derivative: bool) -> Result<Interval, IntervalError> {
    if x.mag() > 8.0 {
        return Err(IntervalError::Domain("J2 series evaluated outside [-8, 8]".into()));
    }
    let half = x * 0.5;
    let q = half.sqr();
    // term_k without sign: (x/2)^{2k+2}/(k!(k+2)!) or, for the derivative,
    // (k+1)(x/2)^{2k+1}/(k!(k+2)!).
    let mut base = if derivative { half } else { q };
    base = base / Interval::point(2.0); // 1/(0!·2!)
    let mut sum = Interval::ZERO;
    let mut power_term = base;
    for k in 0..TERMS {
        let kf = k as f64;
        let term = if derivative { power_term * (kf + 1.0) } else { power_term };
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power_term = power_term * q / Interval::point((kf + 1.0) * (kf + 3.0));
    }
    // First omitted term (k = TERMS) bounds the tail up to a factor: the term
    // ratio is at most 16(k+2)/((k+1)^2(k+3)) < 1/2 for k ≥ TERMS, so the
    // geometric tail is below twice the first omitted term.
    let first = if derivative { power_term * (TERMS as f64 + 1.0) } else { power_term };
    let tail = first.mag() * 2.0;
    Ok(sum + Interval::new(-tail, tail))
}

/// Rigorous enclosure of j₂,₁ ≈ 5.1356, the first positive zero of J₂,
/// by interval Newton iteration started from a bracketing interval.
pub fn bessel_zero_j21() -> Interval {
    // Floating Newton for a candidate, then a narrow box around it; the
    // interval Newton step below is what certifies the root.
    let mut guess = 5.1;
    for _ in 0..50 {
        let f = bessel_j2(Interval::point(guess)).expect("domain").mid();
        let df = bessel_j2_derivative(Interval::point(guess)).expect("domain").mid();
        guess -= f / df;
    }
    let mut x = Interval::new(guess - 1e-9, guess + 1e-9);
    for _ in 0..60 {
        let m = Interval::point(x.mid());
        let fm = bessel_j2(m).expect("in series domain");
        let dfx = bessel_j2_derivative(x).expect("in series domain");
        assert!(!dfx.contains_zero(), "J2' vanishes on Newton interval");
        let newton = m - fm / dfx;
        let next = x.intersect(&newton).expect("Newton step left the root interval");
        if next == x {
            break;
        }
        x = next;
    }
    // Sign change on the endpoints confirms the zero is inside.
    let at_lo = bessel_j2(Interval::point(x.lo)).expect("domain");
    let at_hi = bessel_j2(Interval::point(x.hi)).expect("domain");
    debug_assert!(at_lo.lo > 0.0 || at_hi.hi < 0.0 || x.width() < 1e-12);
    x
}
