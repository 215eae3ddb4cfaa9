//! Rigorous sine/cosine of rational multiples of π.
//!
//! Angles are reduced exactly in integer arithmetic to `π·t` with
//! `t ∈ [0, 1/4]`, then evaluated by a Taylor polynomial in interval
//! arithmetic plus an explicit Lagrange remainder.

use super::{iv_div, Interval, IntervalError};

/// Enclosure of π: `std::f64::consts::PI` is the double just below π.
pub fn iv_pi() -> Interval {
    Interval::new(std::f64::consts::PI, std::f64::consts::PI.next_up())
}

const TAYLOR_TERMS: u32 = 14;

/// Remainder bound |x|^k / k! for the first omitted Taylor term.
fn taylor_remainder(x: Interval, k: u32) -> Interval {
    let mut r = Interval::point(x.mag());
    r = r.powi(k);
    for j in 2..=k {
        r = r / Interval::point(j as f64);
    }
    Interval::new(-r.hi, r.hi)
}

/// An angle known as a double `hi` plus a tiny interval correction `lo`.
#[derive(Clone, Copy)]
struct Angle {
    hi: f64,
    lo: Interval,
}

/// sin of an angle in [0, π/4]: series at `hi`, then sin(hi+lo) − sin(hi) =
/// cos(ξ)·lo with cos(ξ) ∈ [0, 1].
fn sin_taylor(x: Angle) -> Interval {
    sin_series(Interval::point(x.hi)) + x.lo * Interval::new(0.0, 1.0)
}

/// cos of an angle in [0, π/4]: cos(hi+lo) − cos(hi) = −sin(ξ)·lo, sin(ξ) ∈ [0, 1].
fn cos_taylor(x: Angle) -> Interval {
    cos_series(Interval::point(x.hi)) - x.lo * Interval::new(0.0, 1.0)
}

fn sin_series(x: Interval) -> Interval {
    let x2 = x.sqr();
    let mut acc = Interval::ONE;
    for k in (2..TAYLOR_TERMS).rev() {
        let d = ((2 * k) * (2 * k + 1)) as f64;
        acc = Interval::ONE - x2 * acc / d;
    }
    // x − x³·(…)/6: the leading term enters exactly, so rounding of the
    // correction only costs a fraction of an ulp of the result.
    x - (x * x2 * acc / 6.0 - taylor_remainder(x, 2 * TAYLOR_TERMS + 1))
}

fn cos_series(x: Interval) -> Interval {
    let x2 = x.sqr();
    let mut acc = Interval::ONE;
    for k in (2..TAYLOR_TERMS).rev() {
        let d = ((2 * k - 1) * (2 * k)) as f64;
        acc = Interval::ONE - x2 * acc / d;
    }
    Interval::ONE - (x2 * acc / 2.0 - taylor_remainder(x, 2 * TAYLOR_TERMS))
}

/// Enclosure of π − PI (the tail of π below the double `PI`).
fn pi_tail() -> Interval {
    Interval::new(1.2246467991473531e-16, 1.2246467991473533e-16)
}

/// π·num/den in double-double form.
fn pi_times(num: i64, den: i64) -> Angle {
    if num == 0 {
        return Angle { hi: 0.0, lo: Interval::ZERO };
    }
    let (r, q) = (num as f64, den as f64);
    let pi = std::f64::consts::PI;
    // PI·r = p + e exactly.
    let p = pi * r;
    let e = pi.mul_add(r, -p);
    let hi = p / q;
    // p − hi·q is exact.
    let rem = (-hi).mul_add(q, p);
    let lo = (Interval::point(rem) + Interval::point(e) + pi_tail() * r) / q;
    Angle { hi, lo }
}

fn clamp_unit(x: Interval) -> Interval {
    Interval { lo: x.lo.max(-1.0), hi: x.hi.min(1.0) }
}

/// Rigorous enclosure of sin(π·p/q), `q > 0`.
pub fn sin_pi_rational(p: i64, q: i64) -> Interval {
    assert!(q > 0, "denominator must be positive");
    let two_q = 2 * q;
    let mut r = p.rem_euclid(two_q);
    let mut sign = 1.0;
    if r >= q {
        r -= q;
        sign = -1.0;
    }
    if 2 * r > q {
        r = q - r;
    }
    // Now angle = π r/q with r/q ∈ [0, 1/2].
    let v = if r == 0 {
        Interval::ZERO
    } else if 2 * r == q {
        Interval::ONE
    } else if 4 * r == q {
        Interval::ONE / Interval::point(2.0).sqrt().expect("positive")
    } else if 6 * r == q {
        Interval::point(0.5)
    } else if 4 * r > q {
        // sin(πr/q) = cos(π(q − 2r)/(2q)), argument in [0, π/4).
        cos_taylor(pi_times(q - 2 * r, two_q))
    } else {
        sin_taylor(pi_times(r, q))
    };
    clamp_unit(v * sign)
}

/// Rigorous enclosure of cos(π·p/q), `q > 0`.
pub fn cos_pi_rational(p: i64, q: i64) -> Interval {
    // cos(πp/q) = sin(π(2p + q)/(2q)).
    sin_pi_rational(2 * p + q, 2 * q)
}

/// (sin, cos) of 2π/n.
pub fn sincos_2pi_over(n: usize) -> (Interval, Interval) {
    (sin_pi_rational(2, n as i64), cos_pi_rational(2, n as i64))
}

/// Trigonometric record of the slice angle θ = 2π/n.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ThetaTrig {
    pub n: usize,
    pub theta: Interval,
    pub sin_t: Interval,
    pub cos_t: Interval,
    pub tan_t: Interval,
    pub tan_half_t: Interval,
}

impl ThetaTrig {
    /// cot θ = cos θ / sin θ.
    pub fn cot_t(&self) -> Interval {
        self.cos_t / self.sin_t
    }

    /// cos(2π·l/n) for any integer l.
    pub fn cos_multiple(&self, l: i64) -> Interval {
        cos_pi_rational(2 * l, self.n as i64)
    }

    /// sin(2π·l/n) for any integer l.
    pub fn sin_multiple(&self, l: i64) -> Interval {
        sin_pi_rational(2 * l, self.n as i64)
    }

    /// Area of the regular n-gon inscribed in the unit circle, n·sin(θ)/2.
    pub fn polygon_area(&self) -> Interval {
        self.sin_t * Interval::point(self.n as f64) * 0.5
    }
}

/// Enclosures of θ = 2π/n and its trigonometric values.
pub fn enclose_theta(n: usize) -> Result<ThetaTrig, IntervalError> {
    if n < 3 {
        return Err(IntervalError::Domain(format!("polygon needs at least 3 vertices, got {n}")));
    }
    let q = n as i64;
    let theta = {
        let a = pi_times(2, q);
        Interval::point(a.hi) + a.lo
    };
    let sin_t = sin_pi_rational(2, q);
    let cos_t = cos_pi_rational(2, q);
    let tan_t = iv_div(sin_t, cos_t).map_err(|_| IntervalError::Domain(format!("tan(2π/{n}) is undefined")))?;
    let tan_half_t = iv_div(sin_pi_rational(1, q), cos_pi_rational(1, q))?;
    Ok(ThetaTrig { n, theta, sin_t, cos_t, tan_t, tan_half_t })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ulps(x: Interval) -> u64 {
        x.hi.to_bits().abs_diff(x.lo.to_bits())
    }

    #[test]
    fn hexagon_cosine_is_one_half() {
        let t = enclose_theta(6).unwrap();
        assert!(t.cos_t.contains(0.5));
    }

    #[test]
    fn square_tangent_is_a_domain_error() {
        assert!(enclose_theta(4).is_err());
    }

    #[test]
    fn pentagon_half_tangent() {
        // tan(π/5) = 0.72654252800536088589546675748...
        let t = enclose_theta(5).unwrap();
        assert!(t.tan_half_t.contains(0.7265425280053609));
    }

    #[test]
    fn widths_are_a_few_ulp() {
        for n in 5..=64 {
            let t = enclose_theta(n).unwrap();
            for (name, v) in
                [("theta", t.theta), ("sin", t.sin_t), ("cos", t.cos_t), ("tan", t.tan_t), ("tan_half", t.tan_half_t)]
            {
                assert!(ulps(v) <= 8, "n={n} {name} width {} ulp", ulps(v));
            }
        }
    }

    #[test]
    fn pythagoras_holds_in_enclosure() {
        for n in 3..64 {
            let (s, c) = sincos_2pi_over(n);
            assert!((s.sqr() + c.sqr()).contains(1.0), "n={n}");
        }
    }

    #[test]
    fn reduction_covers_all_quadrants() {
        for q in 1..40i64 {
            for p in -3 * q..3 * q {
                let x = std::f64::consts::PI * p as f64 / q as f64;
                let s = sin_pi_rational(p, q);
                let c = cos_pi_rational(p, q);
                assert!((s.mid() - x.sin()).abs() < 1e-14, "sin p={p} q={q}");
                assert!((c.mid() - x.cos()).abs() < 1e-14, "cos p={p} q={q}");
                assert!(s.width() < 1e-15 && c.width() < 1e-15);
            }
        }
    }
}
