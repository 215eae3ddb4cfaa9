//! A-posteriori error bound for the bordered system
//! `[[K − λ₁M, b], [bᵀ, 0]] (U, μ) = (f, 0)` with `b = γ M u₁`.

use serde::Serialize;

use super::verify::EigenEnclosure;
use super::LinalgError;
use crate::interval::{
    add_up, iv_norm2_lower, iv_norm2_upper, mul_up, sqrt_up, sub_down, Interval, IntervalVector, SparseIntervalMatrix,
};

/// Right-hand side of the bordered system.
#[derive(Clone, Copy, Debug)]
pub enum SaddleRhs<'a> {
    /// A fixed enclosure of `f`.
    Vector(&'a IntervalVector),
    /// `f = F u₁` for the exact eigenvector `u₁`; evaluated on the
    /// eigenvector ball, which avoids box wrapping.
    Operator(&'a SparseIntervalMatrix),
}

/// Enclosure of the exact discrete solution.
#[derive(Clone, Debug, Serialize)]
pub struct SaddleSolution {
    /// Floating candidate (ball centre).
    pub center: Vec<f64>,
    /// Upper bound of the residual norm `‖H(Ũ, 0) − (f, 0)‖₂`.
    pub residual_norm: f64,
    /// Upper bound of `‖U* − Ũ‖₂`.
    pub error_bound: f64,
    #[serde(skip)]
    pub solution: IntervalVector,
}

/// Per-coordinate box of the Euclidean ball `center ± error_bound`.
fn ball_box(center: &[f64], radius: f64) -> IntervalVector {
    IntervalVector::from_ball(center, radius)
}

/// Certified distance from the candidate `u_float` to the exact solution of
/// the bordered system built from the exact `λ₁ ∈ lam1`, `λ₂ ∈ lam2` and
/// eigenvector `u₁` in `u1`.
///
/// The bound is `φ · max{1/(λ₂ − λ₁), ‖K − λ₁M‖_∞/‖b‖² + w} · ‖residual‖`
/// with `w = (λ₂ − λ₁)/γ²`, `γ = γ₀/‖Mũ₁‖₂` and `φ = 2/(√5 − 1)`.
#[allow(clippy::too_many_arguments)]
pub fn saddle_enclosure(
    k: &SparseIntervalMatrix,
    m: &SparseIntervalMatrix,
    u1: &EigenEnclosure,
    lam1: Interval,
    lam2: Interval,
    rhs: SaddleRhs<'_>,
    u_float: &[f64],
    gamma0: f64,
) -> Result<SaddleSolution, LinalgError> {
    let n = k.dim;
    if u_float.len() != n {
        return Err(LinalgError::Dimension(format!("candidate of length {} for order {n}", u_float.len())));
    }
    let gap = lam2 - lam1;
    if !gap.is_positive() {
        return Err(LinalgError::Uncertified(format!("eigenvalue gap {gap} is not positive")));
    }
    let (u_center, u_radius) =
        u1.vector_ball().ok_or_else(|| LinalgError::Uncertified("eigenvector enclosure missing".into()))?;
    let m_norm2 = m.norm2_upper();

    // γ is a free floating parameter; everything below bounds the exact
    // quantities for that γ.
    let mu_center = m.mul_point(&u_center);
    let gamma = gamma0 / super::norm2(&mu_center.mid());
    let g = Interval::point(gamma);

    let ku = k.mul_point(u_float);
    let mu = m.mul_point(u_float);
    let (top, extra) = match rhs {
        SaddleRhs::Vector(f) => {
            f.check_len(n).map_err(|e| LinalgError::Dimension(e.to_string()))?;
            let top: IntervalVector = (0..n).map(|i| ku[i] - lam1 * mu[i] - f[i]).collect();
            (top, 0.0)
        }
        SaddleRhs::Operator(op) => {
            let fu = op.mul_point(&u_center);
            let top: IntervalVector = (0..n).map(|i| ku[i] - lam1 * mu[i] - fu[i]).collect();
            (top, mul_up(op.norm2_upper(), u_radius))
        }
    };
    let top_norm = add_up(iv_norm2_upper(&top), extra);
    // Constraint row γ u₁ᵀ M Ũ with u₁ in the ball.
    let constraint = g * IntervalVector::from_points(&u_center).dot(&mu);
    let constraint = add_up(constraint.mag(), mul_up(gamma, mul_up(u_radius, iv_norm2_upper(&mu))));
    let residual_norm = sqrt_up(add_up(mul_up(top_norm, top_norm), mul_up(constraint, constraint)));

    // ‖b‖₂ ≥ γ (‖Mũ‖ − ‖M‖ δ).
    let mu1_lower = sub_down(iv_norm2_lower(&mu_center), mul_up(m_norm2, u_radius));
    if !(mu1_lower > 0.0) {
        return Err(LinalgError::Uncertified("‖M u₁‖ not bounded away from zero".into()));
    }
    let b2 = (g * Interval::point(mu1_lower)).sqr();
    let a_norm = k.lin_comb(Interval::ONE, m, -lam1).norm_inf_upper();
    let gap_lo = Interval::point(gap.lo);
    let w = gap_lo / g.sqr();
    let inv_bound = Interval::ONE / gap_lo;
    let fwd_bound = Interval::point(a_norm) / Interval::new(b2.lo, b2.lo) + w;
    let phi = Interval::point(2.0) / (Interval::point(5.0).sqrt().expect("positive") - 1.0);
    let error = phi * inv_bound.max(&fwd_bound) * Interval::point(residual_norm);
    let error_bound = error.hi;
    Ok(SaddleSolution {
        center: u_float.to_vec(),
        residual_norm,
        error_bound,
        solution: ball_box(u_float, error_bound),
    })
}
