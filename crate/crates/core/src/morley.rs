//! Certified upper bounds for the P1 interpolation constant of a triangle,
//! via the Morley element on a uniform refinement.
//!
//! The Morley degrees of freedom are vertex values and normal derivatives at
//! edge midpoints. Because the gradient of a quadratic is affine, the full
//! gradient at each edge midpoint follows from the tangential difference
//! quotient `(p(x_j) − p(x_i)) / ℓ_ij` and the normal derivative; the vertex
//! gradients follow by affine extrapolation. With the vertex gradients as P1
//! data, `|p|²_{H²}` and `‖∇p‖²` are the P1 stiffness and mass forms of the two
//! gradient components.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::interval::{enclose_theta, Interval, IntervalError, SparseIntervalMatrix};
use crate::vlinalg::{cholesky_spd_check, dense::generalized_sym_eig, LinalgError};

#[derive(Debug, Error)]
pub enum MorleyError {
    #[error("degenerate triangle: third vertex ({a}, {b}) must have b > 0")]
    Degenerate { a: Interval, b: Interval },
    #[error("subdivision count must be at least 2 (got {0})")]
    Subdivision(usize),
    #[error("a lower bound was not found: {0}")]
    NotCertified(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

pub type Result<T> = std::result::Result<T, MorleyError>;

type Point = (Interval, Interval);

/// Morley matrices on the m-refinement of the triangle `(0,0), (1,0), (a,b)`.
#[derive(Clone, Debug)]
pub struct MorleySystem {
    pub a: Interval,
    pub b: Interval,
    pub m: usize,
    pub vertex_count: usize,
    pub edge_count: usize,
    /// `vᵀ K v = |p|²_{H²}` (broken).
    pub kxx: SparseIntervalMatrix,
    /// `vᵀ M v = ‖∇p‖²` (broken).
    pub mxx: SparseIntervalMatrix,
    /// Degrees of freedom of the three corner values.
    pub dirichlet: [usize; 3],
    /// Edge endpoints (low, high vertex index), in edge-DoF order.
    pub edges: Vec<(usize, usize)>,
}

impl MorleySystem {
    pub fn dof(&self) -> usize {
        self.vertex_count + self.edge_count
    }

    /// Indices kept after removing the corner values.
    pub fn free_dofs(&self) -> Vec<usize> {
        (0..self.dof()).filter(|i| !self.dirichlet.contains(i)).collect()
    }
}

/// P1 gradients of the hat functions of a counter-clockwise triangle and
/// its area.
fn p1_gradients(x: &[Point; 3]) -> ([Point; 3], Interval) {
    let twice_area = (x[1].0 - x[0].0) * (x[2].1 - x[0].1) - (x[2].0 - x[0].0) * (x[1].1 - x[0].1);
    let g = |i: usize| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        ((x[j].1 - x[k].1) / twice_area, (x[k].0 - x[j].0) / twice_area)
    };
    ([g(0), g(1), g(2)], twice_area * 0.5)
}

/// Element matrices `(K_T, M_T)` of P1 on the triangle.
fn p1_blocks(x: &[Point; 3]) -> ([[Interval; 3]; 3], [[Interval; 3]; 3]) {
    let (g, area) = p1_gradients(x);
    let mut k = [[Interval::ZERO; 3]; 3];
    let mut m = [[Interval::ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = area * (g[i].0 * g[j].0 + g[i].1 * g[j].1);
            m[i][j] = area * if i == j { Interval::ratio(1, 6) } else { Interval::ratio(1, 12) };
        }
    }
    (k, m)
}

/// Local edges opposite each vertex, as (start, end) local indices.
const LOCAL_EDGES: [(usize, usize); 3] = [(1, 2), (2, 0), (0, 1)];

/// Linear map from the six local DoFs `(v₁, v₂, v₃, ψ₂₃, ψ₃₁, ψ₁₂)` to the
/// vertex gradients `(p₁ₓ, p₂ₓ, p₃ₓ, p₁ᵧ, p₂ᵧ, p₃ᵧ)`, with `ψ_ij` the
/// derivative along the left normal of the local edge direction `x_i → x_j`.
pub fn gradient_map(x: &[Point; 3]) -> Result<[[Interval; 6]; 6]> {
    // Gradient at the midpoint of local edge e, as a 2×6 row pair.
    let mut mid = [[[Interval::ZERO; 6]; 2]; 3];
    for (e, &(i, j)) in LOCAL_EDGES.iter().enumerate() {
        let (dx, dy) = (x[j].0 - x[i].0, x[j].1 - x[i].1);
        let len = (dx.sqr() + dy.sqr()).sqrt()?;
        let (tx, ty) = (dx / len, dy / len);
        let (nx, ny) = (-ty, tx);
        // ∇p(mid) = τ (v_j − v_i)/ℓ + n ψ_e
        mid[e][0][j] = tx / len;
        mid[e][0][i] = -tx / len;
        mid[e][0][3 + e] = nx;
        mid[e][1][j] = ty / len;
        mid[e][1][i] = -ty / len;
        mid[e][1][3 + e] = ny;
    }
    // Vertex k is opposite edge k: x_k = m_{k+1} + m_{k+2} − m_k.
    let mut out = [[Interval::ZERO; 6]; 6];
    for k in 0..3 {
        for comp in 0..2 {
            for c in 0..6 {
                out[comp * 3 + k][c] = mid[(k + 1) % 3][comp][c] + mid[(k + 2) % 3][comp][c] - mid[k][comp][c];
            }
        }
    }
    Ok(out)
}

/// `Gᵀ diag(B, B) G` for a 6×6 map `G` and 3×3 block `B`.
fn congruence(g: &[[Interval; 6]; 6], b: &[[Interval; 3]; 3]) -> [[Interval; 6]; 6] {
    let mut out = [[Interval::ZERO; 6]; 6];
    for r in 0..6 {
        for c in r..6 {
            let mut acc = Interval::ZERO;
            for comp in 0..2 {
                for p in 0..3 {
                    for q in 0..3 {
                        acc += g[comp * 3 + p][r] * b[p][q] * g[comp * 3 + q][c];
                    }
                }
            }
            out[r][c] = acc;
            out[c][r] = acc;
        }
    }
    out
}

/// A pair of 6×6 element matrices.
pub type ElementPair = ([[Interval; 6]; 6], [[Interval; 6]; 6]);

/// Element stiffness and gradient-mass matrices in the local DoF order.
pub fn element_matrices(x: &[Point; 3]) -> Result<ElementPair> {
    let g = gradient_map(x)?;
    let (k, m) = p1_blocks(x);
    Ok((congruence(&g, &k), congruence(&g, &m)))
}

/// Assembles the Morley matrices on the uniform m-refinement. Edge
/// normals are oriented from the lower to the higher vertex index.
pub fn morley_assemble(a: Interval, b: Interval, m: usize) -> Result<MorleySystem> {
    if !(b.lo > 0.0) {
        return Err(MorleyError::Degenerate { a, b });
    }
    if m < 2 {
        return Err(MorleyError::Subdivision(m));
    }
    let inv_m = Interval::ONE / Interval::point(m as f64);
    // Vertex (i, j) sits at (i + j a, j b)/m, i + j ≤ m.
    let mut vindex = HashMap::new();
    for j in 0..=m {
        for i in 0..=m - j {
            let next = vindex.len();
            vindex.insert((i, j), next);
        }
    }
    let nv = vindex.len();
    // Two congruent shapes in lattice units: upward and downward.
    let up = [(Interval::ZERO, Interval::ZERO), (Interval::ONE, Interval::ZERO), (a, b)];
    let down = [(Interval::ZERO, Interval::ZERO), (a, b), (a - 1.0, b)];
    let scale = |t: [Point; 3]| t.map(|(x, y)| (x * inv_m, y * inv_m));
    let up_el = element_matrices(&scale(up))?;
    let down_el = element_matrices(&scale(down))?;

    let mut tris: Vec<([usize; 3], bool)> = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m - j {
            tris.push(([vindex[&(i, j)], vindex[&(i + 1, j)], vindex[&(i, j + 1)]], true));
            if i + j + 2 <= m {
                tris.push(([vindex[&(i + 1, j)], vindex[&(i + 1, j + 1)], vindex[&(i, j + 1)]], false));
            }
        }
    }
    let mut eindex: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut triplets = (Vec::new(), Vec::new());
    for (t, upward) in &tris {
        let (ke, me) = if *upward { &up_el } else { &down_el };
        let mut dofs = [0usize; 6];
        let mut sign = [Interval::ONE; 6];
        dofs[..3].copy_from_slice(t);
        for (e, &(i, j)) in LOCAL_EDGES.iter().enumerate() {
            let (gi, gj) = (t[i], t[j]);
            let key = (gi.min(gj), gi.max(gj));
            let idx = *eindex.entry(key).or_insert_with(|| {
                edges.push(key);
                edges.len() - 1
            });
            dofs[3 + e] = nv + idx;
            if gi > gj {
                sign[3 + e] = -Interval::ONE;
            }
        }
        for r in 0..6 {
            for c in 0..6 {
                let s = sign[r] * sign[c];
                triplets.0.push((dofs[r], dofs[c], s * ke[r][c]));
                triplets.1.push((dofs[r], dofs[c], s * me[r][c]));
            }
        }
    }
    let dim = nv + edges.len();
    Ok(MorleySystem {
        a,
        b,
        m,
        vertex_count: nv,
        edge_count: edges.len(),
        kxx: SparseIntervalMatrix::from_triplets(dim, &triplets.0),
        mxx: SparseIntervalMatrix::from_triplets(dim, &triplets.1),
        dirichlet: [vindex[&(0, 0)], vindex[&(m, 0)], vindex[&(0, m)]],
        edges,
    })
}

/// Outcome of the interpolation-constant certification.
#[derive(Clone, Debug, Serialize)]
pub struct InterpBound {
    /// Floating approximation of the smallest eigenvalue of the reduced pencil.
    pub rho_approx: f64,
    /// Certified lower bound of that eigenvalue.
    pub rho_lower: f64,
    /// Enclosure of `√(m²/(m²−1)) / √ρ_lower`; its upper end bounds the
    /// interpolation constant.
    pub bound: Interval,
    pub dof: usize,
}

/// Certified upper bound on the P1 interpolation constant of the triangle
/// `(0,0), (1,0), (a,b)`: with `ρ̄` the floating smallest eigenvalue of the
/// reduced pencil, positive definiteness of `K⁰ − (ρ̄ − ε)M⁰` gives
/// `C(T) ≤ √(m²/(m²−1)) / √(ρ̄ − ε)`.
pub fn certify_interp_constant(a: Interval, b: Interval, m: usize, eps: f64) -> Result<InterpBound> {
    if !(eps > 0.0) {
        return Err(MorleyError::NotCertified(format!("eps = {eps} must be positive")));
    }
    let sys = morley_assemble(a, b, m)?;
    let free = sys.free_dofs();
    let k0 = sys.kxx.restrict(&free);
    let m0 = sys.mxx.restrict(&free);
    let (values, _) = generalized_sym_eig(&k0.mid().to_dense(), &m0.mid().to_dense())?;
    let rho_approx = values[0];
    let shift = rho_approx - eps;
    if !(shift > 0.0) {
        return Err(MorleyError::NotCertified(format!("approximate eigenvalue {rho_approx} not above eps")));
    }
    let test = k0.lin_comb(Interval::ONE, &m0, -Interval::point(shift));
    if !cholesky_spd_check(&test) {
        return Err(MorleyError::NotCertified(format!("K − {shift}·M is not certified positive definite")));
    }
    let mm = Interval::point((m * m) as f64);
    let factor = (mm / (mm - 1.0)).sqrt()?;
    let bound = factor / Interval::point(shift).sqrt()?;
    Ok(InterpBound { rho_approx, rho_lower: shift, bound, dof: sys.dof() })
}

/// Third vertex `(cos 2π/n, sin 2π/n)` of the slice triangle of the n-gon.
pub fn slice_vertex(n: usize) -> Result<(Interval, Interval)> {
    let t = enclose_theta(n)?;
    Ok((t.cos_t, t.sin_t))
}
