//! Explicit a-priori finite element error bounds, evaluated in interval
//! arithmetic.
//!
//! Every function returns an interval whose upper endpoint is the bound used
//! downstream. Conventions: `h` is the mesh size (the median edge of the
//! slice triangles, `1/m`), `c1` the interpolation constant per unit `h`,
//! and eigenfunctions are L²-normalized, so that `‖∇u₁‖² = λ₁` and, on a
//! convex polygon, `‖D²u₁‖ = ‖Δu₁‖ = λ₁`.

use serde::Serialize;
use thiserror::Error;

use crate::interval::{cos_pi_rational, enclose_theta, sin_pi_rational, Interval, IntervalError, ThetaTrig};

#[derive(Debug, Error)]
pub enum AprioriError {
    #[error("eigenvalue gap is not certified positive: {0}")]
    Gap(Interval),
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

type Result<T> = std::result::Result<T, AprioriError>;

fn nonneg(x: Interval) -> Interval {
    Interval::new(x.lo.max(0.0), x.hi.max(0.0))
}

/// Upper endpoint as a point interval.
fn upper(x: Interval) -> Interval {
    Interval::point(x.hi)
}

fn sqrt(x: Interval) -> Result<Interval> {
    Ok(nonneg(x).sqrt()?)
}

// ---------------------------------------------------------------------------
// Interpolation constants
// ---------------------------------------------------------------------------

/// Closed-form bound of the P1 interpolation constant of one triangle, given
/// the ratio `alpha` of its smallest to its middle edge, `cos 2τ` for the
/// angle τ between those two edges, and the middle edge length.
pub fn interp_constant_formula(alpha: Interval, cos_two_tau: Interval, middle: Interval) -> Result<Interval> {
    if !(alpha.lo > 0.0) || alpha.hi > 1.0 || !(middle.lo > 0.0) {
        return Err(AprioriError::Domain(format!("degenerate triangle: ratio {alpha}, edge {middle}")));
    }
    let a2 = alpha.sqr();
    let root = sqrt(Interval::ONE + 2.0 * a2 * cos_two_tau + a2.sqr())?;
    let num = Interval::ONE + a2 + root;
    let den_sq = 2.0 * (Interval::ONE + a2 - root);
    if !den_sq.is_positive() {
        return Err(AprioriError::Domain("degenerate triangle: flat angle".into()));
    }
    let pref = Interval::ratio(493, 1000);
    Ok(pref * middle * num / den_sq.sqrt()?)
}

/// The closed-form constant for the slice triangle of the regular n-gon
/// (apex angle 2π/n, legs of unit length, which is the median edge).
pub fn slice_interp_constant_formula(n: usize) -> Result<Interval> {
    if n < 3 {
        return Err(AprioriError::Domain(format!("polygon needs at least 3 vertices, got {n}")));
    }
    let q = n as i64;
    // Base over leg is 2 sin(π/n).
    let base = 2.0 * sin_pi_rational(1, q);
    if base.hi <= 1.0 {
        // Legs are the two shortest edges; they meet at the apex angle 2π/n.
        if n == 6 {
            return interp_constant_formula(Interval::ONE, cos_pi_rational(4, q), Interval::ONE);
        }
        interp_constant_formula(base, -cos_pi_rational(2, q), Interval::ONE)
    } else {
        interp_constant_formula(Interval::ONE, cos_pi_rational(4, q), Interval::ONE)
    }
}

/// Tabulated Morley-certified constants for the slice triangles, n = 5..10.
const MORLEY_TABLE: [(usize, f64); 6] = [(5, 0.3697), (6, 0.3200), (7, 0.3146), (8, 0.3107), (9, 0.3104), (10, 0.3128)];

/// The interpolation constant to use for the n-gon slice triangle: a freshly
/// certified Morley bound when supplied, otherwise the tabulated value.
pub fn interp_constant_table(n: usize, fresh: Option<Interval>) -> Result<Interval> {
    if let Some(c) = fresh {
        return Ok(Interval::new(0.0, c.hi));
    }
    MORLEY_TABLE
        .iter()
        .find(|(k, _)| *k == n)
        // Tabulated decimals are themselves rounded-up certificates.
        .map(|&(_, v)| Interval::new(0.0, v))
        .ok_or_else(|| AprioriError::Domain(format!("no tabulated interpolation constant for n = {n}")))
}

// ---------------------------------------------------------------------------
// Eigenvalue and eigenfunction errors
// ---------------------------------------------------------------------------

/// Eigenvalue error bound and the resulting continuous enclosure.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EigError {
    /// Upper bound of `λ_{k,h} − λ_k ≥ 0`.
    pub bound: Interval,
    /// `[λ_{k,h} − bound, λ_{k,h}]`, outward.
    pub enclosure: Interval,
}

/// `λ_{k,h} − λ_k ≤ λ_{k,h}³ C₁² h² / (1 + C₁² h² λ_{k,h}²)`.
pub fn eig_error(lam_kh: Interval, c1: Interval, h: Interval) -> EigError {
    let ch2 = (c1 * h).sqr();
    let lam = upper(lam_kh);
    // The map is increasing in λ and in C₁h, so evaluate at upper endpoints.
    let b = lam.powi(3) * upper(ch2) / (Interval::ONE + upper(ch2) * lam.sqr()).min(&(Interval::ONE + ch2 * lam.sqr()));
    let bound = Interval::new(0.0, b.hi.max(0.0));
    EigError { bound, enclosure: Interval::new((lam_kh - bound).lo, lam_kh.hi) }
}

/// Bounds of `‖∇(u₁ − u₁,ₕ)‖` and `‖u₁ − u₁,ₕ‖`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EigfunErrors {
    pub grad: Interval,
    pub l2: Interval,
    /// The (possibly bootstrapped) eigenvalue error used.
    pub lam1_err: Interval,
}

/// Number of bootstrap passes through `‖∇e‖² − λ₁‖e‖² = λ₁,ₕ − λ₁`.
pub const BOOTSTRAP_PASSES: usize = 2;

/// Eigenfunction error chain: Galerkin projection error, the component
/// orthogonal to the projection, and the normalization defect.
pub fn eigfun_errors(
    lam1h: Interval,
    lam2h: Interval,
    lam1_err: Interval,
    c1: Interval,
    h: Interval,
) -> Result<EigfunErrors> {
    let gap = lam2h - lam1h;
    if !gap.is_positive() {
        return Err(AprioriError::Gap(gap));
    }
    let mut dlam = upper(nonneg(lam1_err));
    let mut best: Option<EigfunErrors> = None;
    for _ in 0..=BOOTSTRAP_PASSES {
        let e = eigfun_pass(lam1h, lam2h, dlam, c1, h)?;
        let e = match best {
            Some(b) => {
                EigfunErrors { grad: e.grad.min(&b.grad), l2: e.l2.min(&b.l2), lam1_err: e.lam1_err.min(&b.lam1_err) }
            }
            None => e,
        };
        best = Some(e);
        // λ₁,ₕ − λ₁ = ‖∇e‖² − λ₁‖e‖² ≤ ‖∇e‖².
        let next = upper(e.grad.sqr());
        if next.hi >= dlam.hi {
            break;
        }
        dlam = next;
    }
    Ok(best.expect("at least one pass"))
}

fn eigfun_pass(lam1h: Interval, lam2h: Interval, dlam: Interval, c1: Interval, h: Interval) -> Result<EigfunErrors> {
    let lam = upper(lam1h);
    let c1h = upper(c1 * h);
    // Projection p of u₁: ‖∇(u₁ − p)‖ ≤ C₁hλ₁, ‖u₁ − p‖ ≤ (C₁h)²λ₁.
    let proj_grad = c1h * lam;
    let proj_l2 = c1h.sqr() * lam;
    // Component of p orthogonal to u₁,ₕ.
    let pref = sqrt(lam2h)? / (lam2h - lam1h);
    let perp_grad = upper(pref * (dlam + lam * proj_l2));
    let perp_l2 = upper(perp_grad / sqrt(lam2h)?);
    // Normalization defect |1 − α|.
    let alpha_dev = upper(perp_l2.sqr() + proj_l2 * (2.0 + proj_l2));
    let grad = proj_grad + alpha_dev * sqrt(lam)? + perp_grad;
    let l2 = proj_l2 + alpha_dev + perp_l2;
    Ok(EigfunErrors { grad: nonneg(upper(grad)), l2: nonneg(upper(l2)), lam1_err: dlam })
}

// ---------------------------------------------------------------------------
// Singular solutions
// ---------------------------------------------------------------------------

/// Norm bound of the extension operator from the regular n-gon to the plane.
pub fn extension_constant(n: usize) -> Result<Interval> {
    match n {
        0..=4 => Err(AprioriError::Domain(format!("extension constant needs n ≥ 5, got {n}"))),
        5 => Ok(Interval::point(4.0)),
        _ => {
            let c = cos_pi_rational(2, n as i64);
            Ok((Interval::point(4.0) + 24.0 * c.sqr()).sqrt()?)
        }
    }
}

/// Bound of `‖∂_r u₁‖²` on a ray: `‖∇u₁‖(‖∇u₁‖ + 2‖D²u₁‖)` with
/// `‖∇u₁‖ = √λ₁` and `‖D²u₁‖ = λ₁`.
pub fn radial_derivative_sq_bound(lam1: Interval) -> Result<Interval> {
    let g = sqrt(upper(lam1))?;
    Ok(upper(g * (g + 2.0 * upper(lam1))))
}

/// Upper bound of the H² seminorm of the symmetrized single-ray solution on
/// the half polygon. `lam1`, `lam2` are continuous eigenvalue enclosures.
pub fn d2_singular_bound(lam1: Interval, lam2: Interval, cn: Interval) -> Result<Interval> {
    let gap = lam2 - lam1;
    if !gap.is_positive() {
        return Err(AprioriError::Gap(gap));
    }
    let l1 = upper(lam1);
    let dr_sq = radial_derivative_sq_bound(lam1)?;
    let ratio = lam2 / gap;
    // Poincaré on the orthogonal complement of u₁.
    let grad_sq = upper(ratio.sqr() * dr_sq);
    let l2_sq = upper(lam2 / gap.sqr() * dr_sq);
    // c₀ < λ₁/4.
    let c0_sq = upper((l1 / 4.0).sqr());
    let a = upper(cn.sqr() / 2.0 * sqrt((l1.sqr() + l1) / 2.0)?);
    let b = upper(l1.sqr() * l2_sq + c0_sq / 2.0 + grad_sq);
    let c = Interval::point(grad_sq.lo);
    let root = (a + sqrt(a.sqr() + 4.0 * b)?) / 2.0;
    let x_sq = root.sqr() - c;
    if x_sq.hi < 0.0 {
        return Err(AprioriError::Domain("negative radicand in the H² bound".into()));
    }
    Ok(nonneg(upper(sqrt(x_sq)?)))
}

/// `C(q) = Σ|qᵢ| · C₁ · √2 · D2`, where `D2` bounds the half-polygon H²
/// seminorm of the single-ray solution.
pub fn c_of_q(q: &[Interval], c1: Interval, d2: Interval) -> Result<Interval> {
    let s: Interval = q.iter().map(Interval::abs).sum();
    c_of_abs_sum(s, c1, d2)
}

fn c_of_abs_sum(abs_sum: Interval, c1: Interval, d2: Interval) -> Result<Interval> {
    Ok(upper(abs_sum * upper(c1) * Interval::point(2.0).sqrt()? * upper(d2)))
}

/// Inputs of the explicit error bound for a singular source problem.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct SingularInputs {
    pub c1: Interval,
    pub h: Interval,
    pub lam1h: Interval,
    pub lam2h: Interval,
    /// `|λ₁,ₕ − λ₁|`.
    pub lam1_err: Interval,
    /// `‖u₁,ₕ − u₁‖`.
    pub u_l2_err: Interval,
    /// `‖λ₁U + f_reg‖`.
    pub reg_norm: Interval,
    /// `C(q)`.
    pub cq: Interval,
    /// `‖U‖` and `‖V‖`.
    pub u_norm: Interval,
    pub v_norm: Interval,
    /// `‖f − f_h‖_{H⁻¹}`.
    pub data_err: Interval,
}

/// Error bounds `(‖∇(U − U_h)‖, ‖U − U_h‖)` for the singular source problem.
pub fn singular_solution_error(p: &SingularInputs) -> Result<(Interval, Interval)> {
    let gap = p.lam2h - p.lam1h;
    if !gap.is_positive() {
        return Err(AprioriError::Gap(gap));
    }
    let c1h = p.c1 * p.h;
    let interp = c1h * p.reg_norm + p.cq * p.h;
    let normal = c1h.sqr() * p.reg_norm + p.c1 * p.cq * p.h.sqr() + p.v_norm * p.u_l2_err;
    let disc = p.lam1_err * p.u_norm + p.lam1h * p.c1 * p.cq * p.h.sqr() + sqrt(Interval::ONE + p.lam2h)? * p.data_err;
    let grad = interp + sqrt(p.lam1h)? * normal + sqrt(p.lam2h)? / gap * disc;
    let l2 = c1h * interp + normal + disc / gap;
    Ok((nonneg(upper(grad)), nonneg(upper(l2))))
}

// ---------------------------------------------------------------------------
// Hessian entry errors
// ---------------------------------------------------------------------------

/// Shared data of every singular-source problem on one mesh.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ErrorContext {
    pub n: usize,
    pub h: Interval,
    pub c1: Interval,
    pub lam1h: Interval,
    pub lam2h: Interval,
    /// Continuous eigenvalue enclosures.
    pub lam1: Interval,
    pub lam2: Interval,
    pub lam1_err: Interval,
    pub u_grad_err: Interval,
    pub u_l2_err: Interval,
    /// Half-polygon H² bound of the single-ray solution.
    pub d2: Interval,
}

/// Bounds of the data of `a(U, v) = f(v)`, `f = f_reg + f_sing`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RhsBounds {
    /// Dual norm of `f` against `‖∇v‖`.
    pub dual: Interval,
    /// `‖f_reg‖_{L²}`.
    pub reg: Interval,
    /// `Σ|qᵢ|` of the ray part (zero when it cancels by parity).
    pub ray_abs_sum: Interval,
    /// `‖f − f_h‖_{H⁻¹}`.
    pub data_err: Interval,
}

/// Norm and error bounds of one continuous solution and its discrete
/// surrogates `V` (projection), `Ṽ` (renormalized projection).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SolutionBounds {
    /// `‖∇U‖`, `‖U‖`.
    pub grad: Interval,
    pub l2: Interval,
    /// `‖∇V‖`, `‖V‖`.
    pub v_grad: Interval,
    pub v_l2: Interval,
    /// `‖∇(U − V)‖`, `‖U − V‖`.
    pub interp_grad: Interval,
    pub interp_l2: Interval,
    /// `‖∇(V − Ṽ)‖`, `‖V − Ṽ‖`.
    pub normal_grad: Interval,
    pub normal_l2: Interval,
    /// `‖∇(Ṽ − U_h)‖`.
    pub discrete_grad: Interval,
}

impl SolutionBounds {
    fn tilde_grad(&self) -> Interval {
        self.v_grad + self.normal_grad
    }
}

/// `‖∇U‖ ≤ λ₂/(λ₂ − λ₁)·‖f‖_*` and `‖U‖ ≤ ‖∇U‖/√λ₂` for `U ⊥ u₁`.
pub fn poincare_chain(ctx: &ErrorContext, dual: Interval) -> Result<(Interval, Interval)> {
    let gap = ctx.lam2 - ctx.lam1;
    if !gap.is_positive() {
        return Err(AprioriError::Gap(gap));
    }
    let grad = upper(ctx.lam2 / gap * dual);
    Ok((grad, upper(grad / sqrt(ctx.lam2)?)))
}

/// All constituents of the singular-source error bound for one problem.
pub fn solution_bounds(ctx: &ErrorContext, rhs: &RhsBounds) -> Result<SolutionBounds> {
    let gap_h = ctx.lam2h - ctx.lam1h;
    if !gap_h.is_positive() {
        return Err(AprioriError::Gap(gap_h));
    }
    let (grad, l2) = poincare_chain(ctx, upper(rhs.dual))?;
    let c1h = upper(ctx.c1 * ctx.h);
    let cq = c_of_abs_sum(rhs.ray_abs_sum, ctx.c1, ctx.d2)?;
    let reg_norm = upper(ctx.lam1) * l2 + rhs.reg;
    let interp_grad = upper(c1h * reg_norm + cq * ctx.h);
    // Aubin–Nitsche.
    let interp_l2 = upper(c1h * interp_grad);
    // V is the energy projection of U; two bounds of ‖V‖, keep the smaller.
    let v_grad = grad;
    let v_l2 = upper((l2 + interp_l2).min(&(v_grad / sqrt(ctx.lam1h)?)));
    let normal_l2 = upper(interp_l2 + v_l2 * ctx.u_l2_err);
    let normal_grad = upper(sqrt(ctx.lam1h)? * normal_l2);
    let discrete_grad = upper(
        sqrt(ctx.lam2h)? / gap_h
            * (ctx.lam1_err * l2 + ctx.lam1h * interp_l2 + sqrt(Interval::ONE + ctx.lam2h)? * rhs.data_err),
    );
    Ok(SolutionBounds { grad, l2, v_grad, v_l2, interp_grad, interp_l2, normal_grad, normal_l2, discrete_grad })
}

/// The three error terms of `|a(Uᵃ, Uᵇ) − a_h(U_hᵃ, U_hᵇ)|`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PairError {
    pub interpolation: Interval,
    pub normalization: Interval,
    pub discrete: Interval,
    pub total: Interval,
}

/// Three-term bound; `discrete_grad_b` bounds `‖∇U_hᵇ‖` of the computed
/// discrete solution.
pub fn pair_error(ctx: &ErrorContext, a: &SolutionBounds, b: &SolutionBounds, discrete_grad_b: Interval) -> PairError {
    let lam1 = upper(ctx.lam1);
    let interpolation = upper(a.interp_grad * b.interp_grad);
    // ‖Ṽ‖ ≤ ‖V‖: Ṽ is an L²-orthogonal projection of V.
    let normalization = upper(
        a.v_grad * b.normal_grad
            + b.tilde_grad() * a.normal_grad
            + ctx.lam1_err * a.v_l2 * b.v_l2
            + lam1 * b.v_l2 * a.normal_l2
            + lam1 * a.v_l2 * b.normal_l2,
    );
    let discrete = upper(a.tilde_grad() * b.discrete_grad + upper(discrete_grad_b) * a.discrete_grad);
    PairError { interpolation, normalization, discrete, total: upper(interpolation + normalization + discrete) }
}

/// Which Hessian building block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Entry {
    A,
    B,
    C,
}

/// Per-slice coefficients `(c_j, d_j)` of the gradient-form data
/// `Σ_j ∫_{T_j} (c_j I + d_j R_j) ∇u₁·∇v` whose solution `W` satisfies
/// `entry = a(U, W)`, and the ray coefficients of its singular part.
pub fn entry_coefficients(trig: &ThetaTrig, entry: Entry, k: usize) -> (Vec<(Interval, Interval)>, Vec<Interval>) {
    let n = trig.n;
    let k = k as i64;
    let cot = trig.cot_t();
    let sin = trig.sin_t;
    let mut slices = Vec::with_capacity(n);
    let mut rays = Vec::with_capacity(n);
    for j in 0..n as i64 {
        let (c0, c1) = (trig.cos_multiple(j * k), trig.cos_multiple((j + 1) * k));
        let (s0, s1) = (trig.sin_multiple(j * k), trig.sin_multiple((j + 1) * k));
        let one_minus = Interval::ONE - trig.cos_multiple(k);
        match entry {
            Entry::A => {
                slices.push((c1 + c0, (c1 - c0) / sin));
                rays.push(cot * 2.0 * c0 * one_minus);
            }
            Entry::B => {
                slices.push((cot * (c1 - c0), (c1 - c0) / sin));
                rays.push(2.0 * c0 * one_minus);
            }
            Entry::C => {
                slices.push((cot * (s1 - s0), (s1 - s0) / sin));
                rays.push(2.0 * s0 * one_minus);
            }
        }
    }
    (slices, rays)
}

/// Data bounds for the entry problem `W`. The ray part of the B and C
/// entries pairs a y-even with a y-odd function and cancels, so it is
/// dropped there.
pub fn entry_rhs(ctx: &ErrorContext, trig: &ThetaTrig, entry: Entry, k: usize) -> Result<RhsBounds> {
    let (slices, rays) = entry_coefficients(trig, entry, k);
    let nn = Interval::point(ctx.n as f64);
    let lam = upper(ctx.lam1);
    // ‖c I + d R‖₂ = |c| + |d| (R is a reflection).
    let op_sq: Interval = slices.iter().map(|(c, d)| (c.abs() + d.abs()).sqr()).sum();
    let c_sq: Interval = slices.iter().map(|(c, _)| c.sqr()).sum();
    let d_sq: Interval = slices.iter().map(|(_, d)| d.sqr()).sum();
    // Per slice ‖∇u₁‖² = λ₁/n, ‖u₁‖² = 1/n, ‖D²u₁‖² = λ₁²/n by symmetry;
    // the second-derivative combination is ⟨R, D²u₁⟩ with ‖R‖_F = √2.
    let dual = sqrt(lam / nn)? * sqrt(op_sq)?;
    let reg = lam * sqrt(c_sq / nn)? + Interval::point(2.0).sqrt()? * lam * sqrt(d_sq / nn)?;
    let ray_abs_sum = match entry {
        Entry::A => rays.iter().map(Interval::abs).sum(),
        Entry::B | Entry::C => Interval::ZERO,
    };
    let data_err = upper(ctx.u_grad_err) * sqrt(op_sq / nn)?;
    Ok(RhsBounds { dual: upper(dual), reg: upper(reg), ray_abs_sum: upper(ray_abs_sum), data_err: upper(data_err) })
}

/// Data bounds for the two material derivatives (x- and y-motion of the
/// first vertex).
pub fn material_rhs(ctx: &ErrorContext, trig: &ThetaTrig) -> Result<[RhsBounds; 2]> {
    let nn = Interval::point(ctx.n as f64);
    let lam = upper(ctx.lam1);
    let inv_sin = Interval::ONE / trig.sin_t;
    let cot = trig.cot_t().abs();
    let two_slices = sqrt(2.0 / nn)?;
    // ‖∇u₁‖ on the two slices supporting the vertex hat function.
    let grad_support = sqrt(2.0 * lam / nn)?;
    // |(λ₁u₁ − λ₁,ₕu₁,ₕ, v)| ≤ (|Δλ| + λ₁,ₕ‖e‖)·‖∇v‖/√λ₁.
    let mass_err = (upper(ctx.lam1_err) + upper(ctx.lam1h) * upper(ctx.u_l2_err)) / sqrt(Interval::point(ctx.lam1.lo))?;
    let op1 = Interval::ONE + inv_sin;
    let op2 = cot + inv_sin;
    let u1 = RhsBounds {
        dual: upper(op1 * grad_support + 2.0 * sqrt(lam)? / nn),
        reg: upper(2.0 * inv_sin * lam * two_slices + 2.0 * lam / nn),
        ray_abs_sum: upper(4.0 * cot),
        data_err: upper(op1 * upper(ctx.u_grad_err) * two_slices + 2.0 / nn * mass_err),
    };
    let u2 = RhsBounds {
        dual: upper(op2 * grad_support),
        reg: upper(2.0 * inv_sin * lam * two_slices),
        ray_abs_sum: Interval::point(2.0),
        data_err: upper(op2 * upper(ctx.u_grad_err) * two_slices),
    };
    Ok([u1, u2])
}

/// Error bound of one entry `a(U, W)` against its discrete counterpart.
pub fn hessian_entry_errors(
    ctx: &ErrorContext,
    trig: &ThetaTrig,
    entry: Entry,
    k: usize,
    material: &SolutionBounds,
    discrete_material_grad: Interval,
) -> Result<PairError> {
    let w = solution_bounds(ctx, &entry_rhs(ctx, trig, entry, k)?)?;
    Ok(pair_error(ctx, &w, material, discrete_material_grad))
}

// ---------------------------------------------------------------------------
// Budget
// ---------------------------------------------------------------------------

/// Norms of discrete quantities needed by the budget, all upper bounds.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct DiscreteNorms {
    /// `‖∇U_h¹‖`, `‖∇U_h²‖`.
    pub grad_material: [Interval; 2],
    /// `‖∂ₓu₁,ₕ‖_{L²(T₀)}`, `‖∂ᵧu₁,ₕ‖_{L²(T₀)}`.
    pub dx_t0: Interval,
    pub dy_t0: Interval,
}

/// Error budget of one Hessian mode `k`.
#[derive(Clone, Debug, Serialize)]
pub struct ModeBudget {
    pub k: usize,
    pub a: PairError,
    pub b: PairError,
    pub c: PairError,
    /// Entry errors of the 2×2 block `[[α, γ], [γ, β]]`.
    pub alpha: Interval,
    pub beta: Interval,
    pub gamma: Interval,
    /// Bound on the eigenvalue shift of the block (Weyl).
    pub eigen: Interval,
}

/// Every constant and bound of the a-priori analysis.
#[derive(Clone, Debug, Serialize)]
pub struct ErrorBudget {
    pub c1: Interval,
    pub h: Interval,
    pub lam1_err: Interval,
    pub lam2_err: Interval,
    pub gradu_err: Interval,
    pub l2u_err: Interval,
    pub cn: Interval,
    pub d2_us0: Interval,
    /// `C(q)` per named ray-coefficient family.
    pub cq_map: Vec<(String, Interval)>,
    pub context: ErrorContext,
    pub material: [SolutionBounds; 2],
    pub modes: Vec<ModeBudget>,
}

impl ErrorBudget {
    /// Builds the budget for the n-gon at mesh size `h` from the certified
    /// discrete eigenvalue enclosures.
    pub fn compute(
        n: usize,
        h: Interval,
        c1: Interval,
        lam1h: Interval,
        lam2h: Interval,
        disc: &DiscreteNorms,
    ) -> Result<ErrorBudget> {
        let trig = enclose_theta(n)?;
        let e1 = eig_error(lam1h, c1, h);
        let e2 = eig_error(lam2h, c1, h);
        let ef = eigfun_errors(lam1h, lam2h, e1.bound, c1, h)?;
        let lam1_err = ef.lam1_err.min(&e1.bound);
        let lam1 = Interval::new((lam1h - lam1_err).lo, lam1h.hi);
        let lam2 = e2.enclosure;
        let cn = extension_constant(n)?;
        let d2 = d2_singular_bound(lam1, lam2, cn)?;
        let ctx =
            ErrorContext { n, h, c1, lam1h, lam2h, lam1, lam2, lam1_err, u_grad_err: ef.grad, u_l2_err: ef.l2, d2 };
        let rhs = material_rhs(&ctx, &trig)?;
        let material = [solution_bounds(&ctx, &rhs[0])?, solution_bounds(&ctx, &rhs[1])?];
        let mut cq_map = vec![
            ("material-x".to_string(), c_of_abs_sum(rhs[0].ray_abs_sum, c1, d2)?),
            ("material-y".to_string(), c_of_abs_sum(rhs[1].ray_abs_sum, c1, d2)?),
        ];

        let area2 = 2.0 * trig.polygon_area();
        let nn = Interval::point(n as f64);
        let e_t0 = upper(ef.grad / sqrt(nn)?);
        let t0x = upper(e_t0 * (2.0 * upper(disc.dx_t0) + e_t0));
        let t0y = upper(e_t0 * (2.0 * upper(disc.dy_t0) + e_t0));
        let mut modes = Vec::with_capacity(n);
        for k in 0..n {
            let a = hessian_entry_errors(&ctx, &trig, Entry::A, k, &material[0], disc.grad_material[0])?;
            let b = hessian_entry_errors(&ctx, &trig, Entry::B, k, &material[1], disc.grad_material[1])?;
            let c = hessian_entry_errors(&ctx, &trig, Entry::C, k, &material[0], disc.grad_material[0])?;
            let ray = entry_rhs(&ctx, &trig, Entry::A, k)?.ray_abs_sum;
            cq_map.push((format!("entry-a-{k}"), c_of_abs_sum(ray, c1, d2)?));
            let coef = upper(2.0 * nn * (Interval::ONE - trig.cos_multiple(k as i64)) / trig.sin_t);
            let alpha = upper(area2 * a.total + coef * t0x);
            let beta = upper(area2 * b.total + coef * t0y);
            let gamma = upper(area2 * c.total);
            let eigen = upper((alpha + beta + sqrt((alpha - beta).sqr() + 4.0 * gamma.sqr())?) / 2.0);
            modes.push(ModeBudget { k, a, b, c, alpha, beta, gamma, eigen });
        }
        Ok(ErrorBudget {
            c1,
            h,
            lam1_err,
            lam2_err: e2.bound,
            gradu_err: ef.grad,
            l2u_err: ef.l2,
            cn,
            d2_us0: d2,
            cq_map,
            context: ctx,
            material,
            modes,
        })
    }

    /// Eigenvalue-shift bound for mode `k`.
    pub fn mode_error(&self, k: usize) -> f64 {
        self.modes[k].eigen.hi
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("budget serializes")
    }
}
