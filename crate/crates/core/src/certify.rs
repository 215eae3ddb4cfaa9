//! End-to-end certification: discrete eigenpair enclosures, the two
//! material-derivative systems, the 2n Hessian eigenvalues in interval
//! arithmetic and the a-priori budget that transfers them to the continuous
//! problem.

use std::time::Instant;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::apriori::{eig_error, interp_constant_table, AprioriError, DiscreteNorms, ErrorBudget};
use crate::assembly::{assemble_partials, assemble_system, material_operators, AssembledSystem, PartialBlocks};
use crate::interval::{
    add_up, bessel_zero_j21, enclose_theta, format_fixed, mul_up, sqrt_up, sub_down, Interval, IntervalError,
    IntervalVector, ThetaTrig,
};
use crate::mesh::{build_full_mesh, SymmetricMesh};
use crate::vlinalg::{
    cg_solve, eigvec_error_bound, fp_eigs, residual_enclosure, saddle_enclosure, CsrMatrix, EigenEnclosure,
    LinalgError, Preconditioner, SaddleRhs, SaddleSolution, SparseCholesky,
};

#[derive(Debug, Error)]
pub enum CertifyError {
    /// A hypothesis of the method could not be verified; the run is a sound
    /// "not certified".
    #[error("eigenvalue gate failed: {0}")]
    Gate(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Apriori(#[from] AprioriError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    /// Two enclosures of the same quantity do not intersect: a bug.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl CertifyError {
    /// True when the failure is a legitimate outcome of the verification
    /// (the inequalities could not be proved), as opposed to a bug or a bad
    /// configuration.
    pub fn is_sound_failure(&self) -> bool {
        matches!(
            self,
            CertifyError::Gate(_)
                | CertifyError::Apriori(AprioriError::Gap(_))
                | CertifyError::Linalg(LinalgError::Uncertified(_))
        )
    }
}

pub type Result<T> = std::result::Result<T, CertifyError>;

#[derive(Clone, Debug, Serialize)]
pub struct CertifyConfig {
    pub n: usize,
    pub m: usize,
    /// Scaling of the border in the bordered material systems.
    pub gamma0: f64,
    /// P1 interpolation constant of the slice triangle; the tabulated
    /// certified value is used when absent.
    pub c1: Option<Interval>,
    pub cg_tol: f64,
    /// Worker threads for the two material solves (1 = sequential).
    pub threads: usize,
}

impl CertifyConfig {
    pub fn new(n: usize, m: usize) -> Self {
        CertifyConfig { n, m, gamma0: 4.0, c1: None, cg_tol: 1e-13, threads: 2 }
    }

    fn validate(&self) -> Result<()> {
        if !(5..=8).contains(&self.n) {
            return Err(CertifyError::Config(format!("n = {} outside 5..=8", self.n)));
        }
        if self.m < 2 {
            return Err(CertifyError::Config(format!("m = {} must be at least 2", self.m)));
        }
        if !(self.gamma0 > 0.0) {
            return Err(CertifyError::Config("gamma0 must be positive".into()));
        }
        Ok(())
    }
}

/// The mesh and all interval matrices of one run.
pub struct Problem {
    pub mesh: SymmetricMesh,
    pub trig: ThetaTrig,
    pub sys: AssembledSystem,
    pub blocks: PartialBlocks,
    pub c1: Interval,
}

impl Problem {
    pub fn build(cfg: &CertifyConfig) -> Result<Problem> {
        cfg.validate()?;
        let trig = enclose_theta(cfg.n)?;
        let c1 = match cfg.c1 {
            Some(c) => c,
            None => interp_constant_table(cfg.n, None)?,
        };
        let mesh = build_full_mesh(cfg.n, cfg.m);
        let sys = assemble_system(&mesh, &trig);
        let blocks = assemble_partials(&mesh, &trig);
        Ok(Problem { mesh, trig, sys, blocks, c1 })
    }
}

/// Certified `λ₁,ₕ` (simple, with eigenvector ball) and `λ₂,ₕ`.
#[derive(Clone, Debug)]
pub struct EigenCertificate {
    pub lam1: EigenEnclosure,
    pub lam2: EigenEnclosure,
    /// A-priori bound of `λ₂,ₕ − λ₂`.
    pub lam2_err: Interval,
    /// Enclosure of `j₂,₁²`.
    pub threshold: Interval,
    /// M-norm radius of the eigenvector ball.
    pub vector_radius_m: f64,
    /// Whether every coordinate of the eigenvector box is positive.
    pub positive_vector: bool,
}

impl EigenCertificate {
    /// Euclidean eigenvector ball `(ũ, r)`.
    pub fn vector_ball(&self) -> (Vec<f64>, f64) {
        self.lam1.vector_ball().expect("simple eigenvalue carries a vector ball")
    }

    fn to_json(&self) -> serde_json::Value {
        json!({
            "lam1": interval_json(self.lam1.value),
            "lam2": interval_json(self.lam2.value),
            "lam1_approx": self.lam1.approx_value,
            "lam2_approx": self.lam2.approx_value,
            "lam2_err": interval_json(self.lam2_err),
            "threshold": interval_json(self.threshold),
            "vector_radius_m": self.vector_radius_m,
            "vector_radius_2": self.lam1.vector_radius,
            "positive_vector": self.positive_vector,
        })
    }
}

/// Encloses the two smallest discrete eigenvalues and checks that they are
/// the only ones below `j₂,₁²`.
///
/// Every discrete eigenvalue dominates its continuous counterpart and
/// `λ₄(Pₙ) ≥ j₂,₁²`, so below the threshold live only `λ₁,ₕ` and the double
/// `λ₂,ₕ = λ₃,ₕ`. Two disjoint residual enclosures below the threshold are
/// therefore `λ₁,ₕ` and `λ₂,ₕ`, and `[λ̃₁, λ₂,ₕ)` contains no other eigenvalue.
pub fn certify_eigs(sys: &AssembledSystem, c1: Interval) -> Result<EigenCertificate> {
    let eigs = enclose_eigs(sys, c1)?;
    let top = eigs.lam2.value + eigs.lam2_err;
    if !(top.hi < eigs.threshold.lo) {
        return Err(CertifyError::Gate(format!(
            "a-priori budget dominates: λ₂,ₕ plus its error {} does not stay below j₂,₁² {}",
            top, eigs.threshold
        )));
    }
    Ok(eigs)
}

/// The discrete part of [`certify_eigs`]: residual enclosures of the two
/// smallest floating eigenpairs and the eigenvector ball, assuming they are
/// `λ₁,ₕ` and `λ₂,ₕ`. Only the threshold gate of [`certify_eigs`] proves that.
pub fn enclose_eigs(sys: &AssembledSystem, c1: Interval) -> Result<EigenCertificate> {
    let k_mid = sys.k0.mid();
    let m_mid = sys.m0.mid();
    let fp = fp_eigs(&k_mid, &m_mid, 3.min(sys.dof))?;
    if fp.values.len() < 2 {
        return Err(CertifyError::Gate("fewer than two discrete eigenvalues".into()));
    }
    let mut u = fp.vectors[0].clone();
    if u.iter().sum::<f64>() < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }
    let inv_mass = sys.inv_mass_bound();
    let e1 = residual_enclosure(&sys.k0, &sys.m0, &u, fp.values[0], inv_mass)?;
    let e2 = residual_enclosure(&sys.k0, &sys.m0, &fp.vectors[1], fp.values[1], inv_mass)?;
    if !(e1.value.hi < e2.value.lo) {
        return Err(CertifyError::Gate(format!("enclosures {} and {} are not separated", e1.value, e2.value)));
    }
    let threshold = bessel_zero_j21().sqr();
    let lam2_err = eig_error(e2.value, c1, sys.h).bound;
    let gap = sub_down(e2.value.lo, e1.approx_value);
    let delta = eigvec_error_bound(&e1, gap)?;
    let lam1 = e1.with_vector_ball(delta, inv_mass);
    let positive_vector = lam1.vector.as_ref().is_some_and(|v| v.iter().all(|x| x.lo > 0.0));
    Ok(EigenCertificate { lam1, lam2: e2, lam2_err, threshold, vector_radius_m: delta, positive_vector })
}

/// Certified discrete material derivatives `U¹` (x-motion of the first
/// vertex) and `U²` (y-motion).
#[derive(Clone, Debug, Serialize)]
pub struct MaterialDerivatives {
    pub u1: SaddleSolution,
    pub u2: SaddleSolution,
    /// Enclosures of `u₁ᵀ M₀ Uⁱ`.
    pub orthogonality: [Interval; 2],
    /// `U¹` even and `U²` odd under `y → −y`, within the enclosures.
    pub symmetric: [bool; 2],
    pub cg_iterations: [usize; 2],
}

impl MaterialDerivatives {
    pub fn get(&self, i: usize) -> &SaddleSolution {
        if i == 0 {
            &self.u1
        } else {
            &self.u2
        }
    }
}

/// Floating solve of `(K − λ̃M) U = f` on the M-orthogonal complement of `ũ`.
fn material_candidate(
    a: &CsrMatrix,
    m_mid: &CsrMatrix,
    chol: &SparseCholesky,
    u: &[f64],
    mut f: Vec<f64>,
    tol: f64,
) -> Result<(Vec<f64>, usize)> {
    let mu = m_mid.matvec(u);
    let umu = crate::vlinalg::dot(u, &mu);
    let c = crate::vlinalg::dot(u, &f) / umu;
    crate::vlinalg::axpy(-c, &mu, &mut f);
    let res = cg_solve(a, &f, tol, 20 * a.nrows.max(50), &Preconditioner::Cholesky(chol))?;
    let mut x = res.x;
    let c = crate::vlinalg::dot(&mu, &x) / umu;
    crate::vlinalg::axpy(-c, u, &mut x);
    Ok((x, res.iterations))
}

pub fn solve_material(prob: &Problem, eigs: &EigenCertificate, cfg: &CertifyConfig) -> Result<MaterialDerivatives> {
    let sys = &prob.sys;
    let lam1 = eigs.lam1.value;
    let (f1, f2) = material_operators(sys, &prob.blocks, lam1);
    let k_mid = sys.k0.mid();
    let m_mid = sys.m0.mid();
    let a = k_mid.lin_comb(1.0, &m_mid, -eigs.lam1.approx_value);
    let chol = SparseCholesky::new(&k_mid)?;
    let (u, _) = eigs.vector_ball();
    let rhs = [f1.mid().matvec(&u), f2.mid().matvec(&u)];
    let candidates: Vec<Result<(Vec<f64>, usize)>> = if cfg.threads > 1 {
        std::thread::scope(|s| {
            let handles: Vec<_> = rhs
                .iter()
                .map(|f| {
                    let (a, m_mid, chol, u) = (&a, &m_mid, &chol, &u);
                    s.spawn(move || material_candidate(a, m_mid, chol, u, f.clone(), cfg.cg_tol))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("material solve thread")).collect()
        })
    } else {
        rhs.iter().map(|f| material_candidate(&a, &m_mid, &chol, &u, f.clone(), cfg.cg_tol)).collect()
    };
    let mut sols = Vec::with_capacity(2);
    let mut iters = [0; 2];
    for (i, (cand, op)) in candidates.into_iter().zip([&f1, &f2]).enumerate() {
        let (x, it) = cand?;
        iters[i] = it;
        sols.push(saddle_enclosure(
            &sys.k0,
            &sys.m0,
            &eigs.lam1,
            lam1,
            eigs.lam2.value,
            SaddleRhs::Operator(op),
            &x,
            cfg.gamma0,
        )?);
    }
    let u2 = sols.pop().expect("two solutions");
    let u1 = sols.pop().expect("two solutions");

    let u_box = eigs.lam1.vector.as_ref().expect("simple eigenvalue carries a vector box");
    let orth = |s: &SaddleSolution| -> Result<Interval> { Ok(u_box.dot(&sys.m0.mul_vec(&s.solution)?)) };
    let orthogonality = [orth(&u1)?, orth(&u2)?];
    for (i, o) in orthogonality.iter().enumerate() {
        if !o.contains_zero() {
            return Err(CertifyError::Inconsistent(format!("u₁ᵀM₀U{} = {o} excludes zero", i + 1)));
        }
    }
    let refl = prob.mesh.interior_permutation(&prob.mesh.reflection_permutation());
    let symmetric = [reflection_compatible(&u1.solution, &refl, 1.0), reflection_compatible(&u2.solution, &refl, -1.0)];
    Ok(MaterialDerivatives { u1, u2, orthogonality, symmetric, cg_iterations: iters })
}

/// Whether the box `x` intersects `sign · (reflected x)` entrywise.
pub fn reflection_compatible(x: &IntervalVector, perm: &[usize], sign: f64) -> bool {
    perm.iter().enumerate().all(|(i, &p)| x[i].overlaps(&(x[p] * sign)))
}

/// Per-k blocks and the 2n Hessian eigenvalues of the discrete problem.
#[derive(Clone, Debug, Serialize)]
pub struct HessianSpectrum {
    pub a: Vec<Interval>,
    pub b: Vec<Interval>,
    pub c: Vec<Interval>,
    pub d: Vec<Interval>,
    pub alpha: Vec<Interval>,
    pub beta: Vec<Interval>,
    pub gamma: Vec<Interval>,
    /// `μ_{2k}`, `μ_{2k+1}` for `k = 0..n`.
    pub mu: Vec<Interval>,
    /// `∫_{T₀} (∂ₓu₁)²` and `∫_{T₀} (∂ᵧu₁)²`.
    pub t0: [Interval; 2],
}

/// `∫_{T_j} ∇u·∇U` combined into the four sums of the Hessian blocks.
#[derive(Clone, Copy, Debug)]
struct SlicePairing {
    /// `P[p][q] = ∫_{T_j} ∂_p u ∂_q U` in the global frame.
    p: [[Interval; 2]; 2],
}

impl SlicePairing {
    fn trace(&self) -> Interval {
        self.p[0][0] + self.p[1][1]
    }

    /// `R ∇u · ∇U` with `R = [[−s, c], [c, s]]`.
    fn a_type(&self, c: Interval, s: Interval) -> Interval {
        -s * self.p[0][0] + c * (self.p[0][1] + self.p[1][0]) + s * self.p[1][1]
    }

    /// `R ∇u · ∇U` with `R = [[−c, −s], [−s, c]]`.
    fn b_type(&self, c: Interval, s: Interval) -> Interval {
        -c * self.p[0][0] - s * (self.p[0][1] + self.p[1][0]) + c * self.p[1][1]
    }
}

/// Mode-k sums from per-slice pairings with `U¹` (`p1`) and `U²` (`p2`).
fn mode_sums(trig: &ThetaTrig, k: usize, p1: &[SlicePairing], p2: &[SlicePairing]) -> [Interval; 4] {
    let n = trig.n as i64;
    let k = k as i64;
    let cot = trig.cot_t();
    let sin = trig.sin_t;
    let (mut a, mut b, mut c, mut d) = (Interval::ZERO, Interval::ZERO, Interval::ZERO, Interval::ZERO);
    for j in 0..n {
        let (c0, c1) = (trig.cos_multiple(j * k), trig.cos_multiple((j + 1) * k));
        let (s0, s1) = (trig.sin_multiple(j * k), trig.sin_multiple((j + 1) * k));
        let (rc, rs) = (trig.cos_multiple(2 * j + 1), trig.sin_multiple(2 * j + 1));
        let (q1, q2) = (&p1[j as usize], &p2[j as usize]);
        let dc = (c1 - c0) / sin;
        let ds = (s1 - s0) / sin;
        a += (c1 + c0) * q1.trace() + dc * q1.a_type(rc, rs);
        b += cot * (c1 - c0) * q2.trace() + dc * q2.b_type(rc, rs);
        c += cot * (s1 - s0) * q1.trace() + ds * q1.b_type(rc, rs);
        d += (s1 + s0) * q2.trace() + ds * q2.a_type(rc, rs);
    }
    [a, b, c, d]
}

/// `0.5(α + β ∓ √((α − β)² + 4γ²))`.
pub fn block_eigenvalues(alpha: Interval, beta: Interval, gamma: Interval) -> Result<(Interval, Interval)> {
    let root = ((alpha - beta).sqr() + 4.0 * gamma.sqr()).sqrt()?;
    let s = alpha + beta;
    Ok(((s - root) * 0.5, (s + root) * 0.5))
}

/// Upper bound of `√(xᵀAx)` for a point vector.
fn energy_norm(a: &crate::interval::SparseIntervalMatrix, x: &[f64]) -> f64 {
    let q = IntervalVector::from_points(x).dot(&a.mul_point(x));
    sqrt_up(q.hi.max(0.0))
}

/// Evaluates the Hessian eigenvalues with `u₁,ₕ` and `Uⁱ_h` ranging over
/// their certified balls.
///
/// For `|δ|₂ ≤ r` the pairing perturbation obeys
/// `|∫_{T_j} ∂_p a ∂_q b| ≤ |∇a|·|∇b| ≤ √κ|a|₂ · |∇b|` with `κ ≥ ‖K₀‖₂`.
pub fn hessian_spectrum(
    prob: &Problem,
    eigs: &EigenCertificate,
    mats: &MaterialDerivatives,
) -> Result<HessianSpectrum> {
    let sys = &prob.sys;
    let trig = &prob.trig;
    let n = trig.n;
    let (u, ru) = eigs.vector_ball();
    let sk = sqrt_up(sys.k0.norm2_upper());
    let grad_u = energy_norm(&sys.k0, &u);
    let pairings = |sol: &SaddleSolution| -> Vec<SlicePairing> {
        let grad_w = energy_norm(&sys.k0, &sol.center);
        let eps = sol.error_bound;
        let rad = add_up(
            add_up(mul_up(mul_up(sk, ru), grad_w), mul_up(grad_u, mul_up(sk, eps))),
            mul_up(mul_up(sk, sk), mul_up(ru, eps)),
        );
        let widen = Interval::new(-rad, rad);
        (0..n)
            .map(|j| {
                let mut p = prob.blocks.slice_pairing(j, &u, &sol.center);
                p.iter_mut().flatten().for_each(|x| *x += widen);
                SlicePairing { p }
            })
            .collect()
    };
    let p1 = pairings(&mats.u1);
    let p2 = pairings(&mats.u2);

    let own = prob.blocks.slice_pairing(0, &u, &u);
    let rad_uu = add_up(mul_up(2.0 * grad_u, mul_up(sk, ru)), mul_up(mul_up(sk, sk), mul_up(ru, ru)));
    let nonneg = |x: Interval| {
        let w = x + Interval::new(-rad_uu, rad_uu);
        Interval::new(w.lo.max(0.0), w.hi)
    };
    let t0 = [nonneg(own[0][0]), nonneg(own[1][1])];

    let area2 = 2.0 * trig.polygon_area();
    let nn = Interval::point(n as f64);
    let mut out = HessianSpectrum {
        a: vec![],
        b: vec![],
        c: vec![],
        d: vec![],
        alpha: vec![],
        beta: vec![],
        gamma: vec![],
        mu: vec![],
        t0,
    };
    for k in 0..n {
        let [a, b, c, d] = mode_sums(trig, k, &p1, &p2);
        let coef = 2.0 * nn * (Interval::ONE - trig.cos_multiple(k as i64)) / trig.sin_t;
        let alpha = coef * t0[0] - area2 * a;
        let beta = coef * t0[1] - area2 * b;
        let from_c = -(area2 * c);
        let from_d = area2 * d;
        let gamma = from_c
            .intersect(&from_d)
            .ok_or_else(|| CertifyError::Inconsistent(format!("γ_{k}: {from_c} and {from_d} are disjoint")))?;
        let (lo, hi) = if k == 0 { (Interval::ZERO, Interval::ZERO) } else { block_eigenvalues(alpha, beta, gamma)? };
        out.a.push(a);
        out.b.push(b);
        out.c.push(c);
        out.d.push(d);
        out.alpha.push(alpha);
        out.beta.push(beta);
        out.gamma.push(gamma);
        out.mu.push(lo);
        out.mu.push(hi);
    }
    Ok(out)
}

/// Norms of the discrete solutions needed by the budget.
pub fn discrete_norms(prob: &Problem, eigs: &EigenCertificate, mats: &MaterialDerivatives) -> DiscreteNorms {
    let sys = &prob.sys;
    let sk = sqrt_up(sys.k0.norm2_upper());
    let grad = |s: &SaddleSolution| Interval::point(add_up(energy_norm(&sys.k0, &s.center), mul_up(sk, s.error_bound)));
    let (u, ru) = eigs.vector_ball();
    let own = prob.blocks.slice_pairing(0, &u, &u);
    let part = |x: Interval| Interval::point(add_up(sqrt_up(x.hi.max(0.0)), mul_up(sk, ru)));
    DiscreteNorms { grad_material: [grad(&mats.u1), grad(&mats.u2)], dx_t0: part(own[0][0]), dy_t0: part(own[1][1]) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    NotCertified,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub assemble: f64,
    pub eigen: f64,
    pub material: f64,
    pub hessian: f64,
    pub budget: f64,
}

#[derive(Clone, Debug)]
pub struct CertificationReport {
    pub n: usize,
    pub m: usize,
    /// Mesh nodes, boundary included (the count printed in the report).
    pub dof: usize,
    /// Interior nodes (order of the linear systems).
    pub unknowns: usize,
    pub eigs: EigenCertificate,
    pub materials: MaterialDerivatives,
    pub spectrum: HessianSpectrum,
    pub budget: ErrorBudget,
    /// `μ_j ± E_j`, indexed like `spectrum.mu`.
    pub final_intervals: Vec<Interval>,
    pub positive_count: usize,
    pub verdict: Verdict,
    pub diagnosis: Vec<String>,
    pub timings: Timings,
}

/// Widens the discrete spectrum by the a-priori budget and counts positive
/// lower endpoints. The k = 0 pair is identically zero and is not widened.
pub fn finalize_intervals(
    n: usize,
    mu: &[Interval],
    mode_error: impl Fn(usize) -> f64,
) -> (Vec<Interval>, usize, Verdict) {
    let mut out = Vec::with_capacity(mu.len());
    for (j, x) in mu.iter().enumerate() {
        let k = j / 2;
        if k == 0 {
            out.push(*x);
        } else {
            let e = mode_error(k);
            out.push(*x + Interval::new(-e, e));
        }
    }
    let positive = out.iter().filter(|x| x.lo > 0.0).count();
    let verdict = if positive + 4 >= 2 * n { Verdict::Certified } else { Verdict::NotCertified };
    (out, positive, verdict)
}

/// Human-readable reasons for every nonzero eigenvalue that failed.
fn diagnose(n: usize, spectrum: &HessianSpectrum, budget: &ErrorBudget, finals: &[Interval]) -> Vec<String> {
    let mut out = Vec::new();
    for (j, f) in finals.iter().enumerate() {
        let k = j / 2;
        let translation = j == 2 || j == 2 * (n - 1);
        if k == 0 || translation || f.lo > 0.0 {
            continue;
        }
        let mu = spectrum.mu[j];
        let e = budget.mode_error(k);
        if mu.lo > 0.0 {
            out.push(format!(
                "mu_{j} (k = {k}): budget dominates, discrete lower bound {:.4e} < error {:.4e}",
                mu.lo, e
            ));
        } else {
            out.push(format!("mu_{j} (k = {k}): discrete enclosure {mu} is not positive"));
        }
    }
    out
}

/// Runs the whole pipeline.
pub fn certify(cfg: &CertifyConfig) -> Result<CertificationReport> {
    let t = Instant::now();
    let prob = Problem::build(cfg)?;
    let assemble = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let eigs = certify_eigs(&prob.sys, prob.c1)?;
    let eigen = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let materials = solve_material(&prob, &eigs, cfg)?;
    let material = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let spectrum = hessian_spectrum(&prob, &eigs, &materials)?;
    let hessian = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let disc = discrete_norms(&prob, &eigs, &materials);
    let budget = ErrorBudget::compute(cfg.n, prob.sys.h, prob.c1, eigs.lam1.value, eigs.lam2.value, &disc)?;
    let budget_t = t.elapsed().as_secs_f64();
    let (final_intervals, positive_count, verdict) = finalize_intervals(cfg.n, &spectrum.mu, |k| budget.mode_error(k));
    let diagnosis = diagnose(cfg.n, &spectrum, &budget, &final_intervals);
    Ok(CertificationReport {
        n: cfg.n,
        m: cfg.m,
        dof: prob.mesh.node_count(),
        unknowns: prob.sys.dof,
        eigs,
        materials,
        spectrum,
        budget,
        final_intervals,
        positive_count,
        verdict,
        diagnosis,
        timings: Timings { assemble, eigen, material, hessian, budget: budget_t },
    })
}

fn interval_json(x: Interval) -> serde_json::Value {
    json!([x.lo, x.hi])
}

/// `[   -2.8083,    2.5145]` with outward 4-decimal rounding.
pub fn format_row(x: Interval) -> String {
    format!("[{:>10},{:>10}]", format_fixed(x.lo, 4, false), format_fixed(x.hi, 4, true))
}

impl CertificationReport {
    /// Final intervals sorted by midpoint.
    pub fn sorted_final(&self) -> Vec<Interval> {
        let mut v = self.final_intervals.clone();
        v.sort_by(|a, b| a.mid().total_cmp(&b.mid()));
        v
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("Number of positive eigenvalues = {}\n", self.positive_count);
        s += match self.verdict {
            Verdict::Certified => "Proof of local minimality succeeded!\n",
            Verdict::NotCertified => "Proof of local minimality failed.\n",
        };
        s += &format!("Degrees of Freedom (full mesh) {}\n", self.dof);
        for x in self.sorted_final() {
            s += &format_row(x);
            s.push('\n');
        }
        for d in &self.diagnosis {
            s += &format!("# {d}\n");
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let iv = |v: &[Interval]| v.iter().map(|&x| interval_json(x)).collect::<Vec<_>>();
        json!({
            "schema": 1,
            "n": self.n,
            "m": self.m,
            "dof": self.dof,
            "unknowns": self.unknowns,
            "eigen": self.eigs.to_json(),
            "material": {
                "error_bound": [self.materials.u1.error_bound, self.materials.u2.error_bound],
                "residual_norm": [self.materials.u1.residual_norm, self.materials.u2.residual_norm],
                "orthogonality": iv(&self.materials.orthogonality),
                "symmetric": self.materials.symmetric,
                "cg_iterations": self.materials.cg_iterations,
            },
            "spectrum": {
                "alpha": iv(&self.spectrum.alpha),
                "beta": iv(&self.spectrum.beta),
                "gamma": iv(&self.spectrum.gamma),
                "mu": iv(&self.spectrum.mu),
            },
            "budget": self.budget.to_json(),
            "mode_errors": (0..self.n).map(|k| self.budget.mode_error(k)).collect::<Vec<_>>(),
            "final": iv(&self.final_intervals),
            "positive_count": self.positive_count,
            "verdict": self.verdict,
            "diagnosis": self.diagnosis,
            "timings": self.timings,
        })
    }

    /// Index of the smallest discrete eigenvalue expected to be positive
    /// (the k = 0 pair and the two translations excluded).
    pub fn mu_min_index(&self) -> usize {
        let n = self.n;
        (2..2 * n)
            .filter(|&j| j != 2 && j != 2 * (n - 1))
            .min_by(|&a, &b| self.spectrum.mu[a].mid().total_cmp(&self.spectrum.mu[b].mid()))
            .expect("n ≥ 3")
    }

    /// Smallest positive-expected discrete eigenvalue.
    pub fn mu_min(&self) -> Interval {
        self.spectrum.mu[self.mu_min_index()]
    }

    /// A-priori budget attached to [`Self::mu_min`].
    pub fn mu_min_budget(&self) -> f64 {
        self.budget.mode_error(self.mu_min_index() / 2)
    }

    /// Radius of the finite element enclosure of [`Self::mu_min`].
    pub fn fem_radius(&self) -> f64 {
        self.mu_min().rad()
    }
}
