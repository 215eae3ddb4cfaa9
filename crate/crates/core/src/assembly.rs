//! Closed-form interval assembly of the P1 matrices on the symmetric mesh.
//!
//! Every lattice triangle is either a homothetic copy of the slice triangle
//! (`Up`) or its point reflection (`Down`); products of two gradients are the
//! same for both, so one precomputed 3×3 block per pairing covers the mesh.
//! Nothing here touches node coordinates.

use crate::interval::{Interval, IntervalError, IntervalVector, SparseIntervalMatrix, ThetaTrig};
use crate::mesh::{SliceMesh, SymmetricMesh};

/// Stiffness and mass matrices restricted to the interior nodes.
#[derive(Clone, Debug)]
pub struct AssembledSystem {
    pub n: usize,
    pub m: usize,
    pub trig: ThetaTrig,
    pub h: Interval,
    /// Area of one mesh triangle, `h² sin θ / 2`.
    pub area_h: Interval,
    pub dof: usize,
    pub k0: SparseIntervalMatrix,
    pub m0: SparseIntervalMatrix,
    /// Fewest triangles incident to any free node.
    pub min_incident: usize,
}

impl AssembledSystem {
    /// Upper bound of `1/λ_min(M₀)`: every element mass block is
    /// `≥ (A_h/12)·I`, and each free node lies in at least `min_incident`
    /// triangles (`min(n, 6)` on the full mesh).
    pub fn inv_mass_bound(&self) -> Interval {
        let k = self.min_incident as f64;
        Interval::point(12.0) / (self.area_h * k)
    }
}

/// Gradients `(∂x, ∂y)` of the three barycentric functions of the slice
/// triangle `{o, a₀, a₁}` at unit scale (multiply by `1/h` for the mesh).
pub fn element_gradients(trig: &ThetaTrig) -> [(Interval, Interval); 3] {
    [
        (Interval::point(-1.0), -trig.tan_half_t),
        (Interval::ONE, -trig.cot_t()),
        (Interval::ZERO, Interval::ONE / trig.sin_t),
    ]
}

type Block = [[Interval; 3]; 3];

/// Element stiffness block, written in closed form: with `t = tan(θ/2)`,
/// `[[t, −t/2, −t/2], [−t/2, 1/(2 sin θ), −cot θ/2], [−t/2, −cot θ/2, 1/(2 sin θ)]]`.
fn stiffness_block(trig: &ThetaTrig) -> Block {
    let t = trig.tan_half_t;
    let ht = t * 0.5;
    let d = Interval::point(0.5) / trig.sin_t;
    let c = trig.cot_t() * 0.5;
    [[t, -ht, -ht], [-ht, d, -c], [-ht, -c, d]]
}

fn mass_block(area: Interval) -> Block {
    let d = area / 6.0;
    let o = area / 12.0;
    [[d, o, o], [o, d, o], [o, o, d]]
}

/// `∫_T ∂_p ψ_i ∂_q ψ_k` on one triangle in the slice-0 frame (independent of h).
fn pairing_block(trig: &ThetaTrig, p: usize, q: usize) -> Block {
    let g = element_gradients(trig);
    let half_sin = trig.sin_t * 0.5;
    let comp = |i: usize, axis: usize| if axis == 0 { g[i].0 } else { g[i].1 };
    let mut b = [[Interval::ZERO; 3]; 3];
    for (i, row) in b.iter_mut().enumerate() {
        for (k, e) in row.iter_mut().enumerate() {
            *e = half_sin * comp(i, p) * comp(k, q);
        }
    }
    b
}

/// Accumulates `block` over triangles whose nodes are mapped by `index`
/// (`None` = Dirichlet node, dropped).
fn accumulate<'a>(
    dim: usize,
    triangles: impl Iterator<Item = [Option<usize>; 3]> + 'a,
    block: &Block,
) -> SparseIntervalMatrix {
    let mut t = Vec::new();
    for nodes in triangles {
        for a in 0..3 {
            let Some(i) = nodes[a] else { continue };
            for b in 0..3 {
                if let Some(j) = nodes[b] {
                    t.push((i, j, block[a][b]));
                }
            }
        }
    }
    SparseIntervalMatrix::from_triplets(dim, &t)
}

fn min_incident(dof: usize, tris: impl Iterator<Item = [Option<usize>; 3]>) -> usize {
    let mut count = vec![0usize; dof];
    for t in tris {
        for i in t.into_iter().flatten() {
            count[i] += 1;
        }
    }
    count.into_iter().min().unwrap_or(0)
}

fn check_trig(n: usize, trig: &ThetaTrig) {
    assert_eq!(n, trig.n, "trigonometric record built for a different n");
}

/// K₀ and M₀ of the full mesh, Dirichlet conditions by restriction to interior nodes.
pub fn assemble_system(mesh: &SymmetricMesh, trig: &ThetaTrig) -> AssembledSystem {
    check_trig(mesh.n, trig);
    let h = Interval::ONE / Interval::point(mesh.m as f64);
    let area_h = h.sqr() * trig.sin_t * 0.5;
    let dof = mesh.interior_count();
    let tri = || mesh.triangles.iter().map(|t| t.nodes.map(|g| mesh.interior_index[g]));
    let k0 = accumulate(dof, tri(), &stiffness_block(trig));
    let m0 = accumulate(dof, tri(), &mass_block(area_h));
    let min_incident = min_incident(dof, tri());
    AssembledSystem { n: mesh.n, m: mesh.m, trig: *trig, h, area_h, dof, k0, m0, min_incident }
}

/// Matrices of one slice with Dirichlet conditions on the polygon edge and
/// natural (Neumann) conditions on the two rays.
pub fn assemble_slice_system(slice: &SliceMesh, trig: &ThetaTrig) -> AssembledSystem {
    check_trig(slice.n, trig);
    let h = Interval::ONE / Interval::point(slice.m as f64);
    let area_h = h.sqr() * trig.sin_t * 0.5;
    let free = slice.free_nodes();
    let mut index = vec![None; slice.node_count()];
    for (row, &i) in free.iter().enumerate() {
        index[i] = Some(row);
    }
    let tri = || slice.triangles.iter().map(|t| t.nodes.map(|i| index[i]));
    let k0 = accumulate(free.len(), tri(), &stiffness_block(trig));
    let m0 = accumulate(free.len(), tri(), &mass_block(area_h));
    let min_incident = min_incident(free.len(), tri());
    AssembledSystem { n: slice.n, m: slice.m, trig: *trig, h, area_h, dof: free.len(), k0, m0, min_incident }
}

/// Derivative pairings on a single slice, in slice-local node numbering
/// (all lattice nodes, boundary included) and in the slice-0 frame.
#[derive(Clone, Debug)]
pub struct SliceBlocks {
    /// `pairing[p][q]_{ik} = ∫ ∂_p ψ_i ∂_q ψ_k`, p, q ∈ {x, y}.
    pub pairing: [[SparseIntervalMatrix; 2]; 2],
    pub mass: SparseIntervalMatrix,
}

/// Partial stiffness matrices on `T₊ ∪ T₋` and the per-slice pairings.
#[derive(Clone, Debug)]
pub struct PartialBlocks {
    pub kxx: SparseIntervalMatrix,
    /// `∫_{T₊} ∂yψ_i ∂yψ_j − ∫_{T₋} ∂yψ_i ∂yψ_j`.
    pub kyy: SparseIntervalMatrix,
    pub kxy_plus: SparseIntervalMatrix,
    pub kxy_minus: SparseIntervalMatrix,
    /// Pairings of slice 0; slice j follows by rotating the frame by jθ.
    pub reference: SliceBlocks,
    /// `(cos jθ, sin jθ)` for every slice.
    pub rotations: Vec<(Interval, Interval)>,
    /// Slice-local node → interior row, per slice.
    slice_rows: Vec<Vec<Option<usize>>>,
}

/// Rotates a 2×2 pairing matrix from the slice frame to the global frame:
/// `R S Rᵀ` with `R` the rotation by the given angle.
pub fn rotate_pairing(s: [[Interval; 2]; 2], (c, sn): (Interval, Interval)) -> [[Interval; 2]; 2] {
    let r = [[c, -sn], [sn, c]];
    let mut out = [[Interval::ZERO; 2]; 2];
    for p in 0..2 {
        for q in 0..2 {
            let mut acc = Interval::ZERO;
            for a in 0..2 {
                for b in 0..2 {
                    acc += r[p][a] * r[q][b] * s[a][b];
                }
            }
            out[p][q] = acc;
        }
    }
    out
}

impl PartialBlocks {
    pub fn slice_count(&self) -> usize {
        self.rotations.len()
    }

    /// Slice-local → interior-row map of slice `j`.
    pub fn slice_rows(&self, j: usize) -> &[Option<usize>] {
        &self.slice_rows[j]
    }

    /// Gathers interior values onto the slice-local numbering (boundary → 0).
    pub fn gather(&self, j: usize, x: &[f64]) -> Vec<f64> {
        self.slice_rows[j].iter().map(|r| r.map_or(0.0, |i| x[i])).collect()
    }

    /// `∫_{T_j} ∂_p a ∂_q b` in the global frame for point vectors `a`, `b`
    /// over interior nodes.
    pub fn slice_pairing(&self, j: usize, a: &[f64], b: &[f64]) -> [[Interval; 2]; 2] {
        let (ga, gb) = (self.gather(j, a), self.gather(j, b));
        let mut local = [[Interval::ZERO; 2]; 2];
        for p in 0..2 {
            let pb = self.reference.pairing[p][0].mul_point(&gb);
            let pb2 = self.reference.pairing[p][1].mul_point(&gb);
            local[p][0] = dot_iv(&ga, &pb);
            local[p][1] = dot_iv(&ga, &pb2);
        }
        rotate_pairing(local, self.rotations[j])
    }

    /// Per-slice pairing matrices for slice `j` in the global frame,
    /// slice-local numbering. Convenience for inspection and tests.
    pub fn per_slice(&self, j: usize) -> [[SparseIntervalMatrix; 2]; 2] {
        let (c, s) = self.rotations[j];
        let r = [[c, -s], [s, c]];
        let p = &self.reference.pairing;
        let comb = |pp: usize, qq: usize| {
            let mut acc: Option<SparseIntervalMatrix> = None;
            for a in 0..2 {
                for b in 0..2 {
                    let coef = r[pp][a] * r[qq][b];
                    acc = Some(match acc {
                        None => p[a][b].scale(coef),
                        Some(m) => m.lin_comb(Interval::ONE, &p[a][b], coef),
                    });
                }
            }
            acc.expect("four terms")
        };
        [[comb(0, 0), comb(0, 1)], [comb(1, 0), comb(1, 1)]]
    }
}

fn dot_iv(a: &[f64], b: &IntervalVector) -> Interval {
    a.iter().zip(b.iter()).filter(|(x, _)| **x != 0.0).map(|(&x, &y)| y * x).sum()
}

/// Assembles `K_xx`, `K_yy`, `K_xy^±` over the two slices adjacent to the
/// ray `[o, a₀]` and the per-slice derivative pairings.
pub fn assemble_partials(mesh: &SymmetricMesh, trig: &ThetaTrig) -> PartialBlocks {
    check_trig(mesh.n, trig);
    let n = mesh.n;
    let area = Interval::point(0.5) * trig.sin_t / Interval::point((mesh.m * mesh.m) as f64);
    let blocks = [
        [pairing_block(trig, 0, 0), pairing_block(trig, 0, 1)],
        [pairing_block(trig, 1, 0), pairing_block(trig, 1, 1)],
    ];

    // Slice-local pairings (all slice nodes, boundary included).
    let slice = crate::mesh::build_slice_mesh(n, mesh.m);
    let local_tri = || slice.triangles.iter().map(|t| t.nodes.map(Some));
    let ns = slice.node_count();
    let pairing = [
        [accumulate(ns, local_tri(), &blocks[0][0]), accumulate(ns, local_tri(), &blocks[0][1])],
        [accumulate(ns, local_tri(), &blocks[1][0]), accumulate(ns, local_tri(), &blocks[1][1])],
    ];
    let mass = accumulate(ns, local_tri(), &mass_block(area));
    let reference = SliceBlocks { pairing, mass };

    let rotations: Vec<_> = (0..n).map(|j| (trig.cos_multiple(j as i64), trig.sin_multiple(j as i64))).collect();
    let slice_rows: Vec<Vec<Option<usize>>> = (0..n).map(|j| mesh.slice_interior_map(j)).collect();

    // Global-frame element blocks on T₊ (slice 0) and T₋ (slice n−1).
    let rotated_block = |j: usize, p: usize, q: usize| -> Block {
        let mut out = [[Interval::ZERO; 3]; 3];
        for i in 0..3 {
            for k in 0..3 {
                let s = [[blocks[0][0][i][k], blocks[0][1][i][k]], [blocks[1][0][i][k], blocks[1][1][i][k]]];
                out[i][k] = rotate_pairing(s, rotations[j])[p][q];
            }
        }
        out
    };
    let sym = |b: Block| -> Block {
        let mut out = b;
        for i in 0..3 {
            for k in 0..3 {
                out[i][k] = b[i][k] + b[k][i];
            }
        }
        out
    };
    let dof = mesh.interior_count();
    let on_slice = |j: usize| {
        let map = &slice_rows[j];
        slice.triangles.iter().map(move |t| t.nodes.map(|i| map[i])).collect::<Vec<_>>()
    };
    let plus = on_slice(0);
    let minus = on_slice(n - 1);
    let build = |tris: &Vec<[Option<usize>; 3]>, b: &Block| accumulate(dof, tris.iter().copied(), b);

    let kxx_p = build(&plus, &rotated_block(0, 0, 0));
    let kxx_m = build(&minus, &rotated_block(n - 1, 0, 0));
    let kyy_p = build(&plus, &rotated_block(0, 1, 1));
    let kyy_m = build(&minus, &rotated_block(n - 1, 1, 1));
    let kxy_plus = build(&plus, &sym(rotated_block(0, 0, 1)));
    let kxy_minus = build(&minus, &sym(rotated_block(n - 1, 0, 1)));

    PartialBlocks {
        kxx: kxx_p.lin_comb(Interval::ONE, &kxx_m, Interval::ONE),
        kyy: kyy_p.lin_comb(Interval::ONE, &kyy_m, Interval::point(-1.0)),
        kxy_plus,
        kxy_minus,
        reference,
        rotations,
        slice_rows,
    }
}

/// Matrices `F₁`, `F₂` with `f_i = F_i(λ) u` the right-hand sides of the two
/// material-derivative systems:
/// `F₁ = 2K_xx − cot θ (K_xy⁺ − K_xy⁻) − (2λ/n) M₀`, `F₂ = −2 cot θ K_yy + K_xy⁺ + K_xy⁻`.
pub fn material_operators(
    sys: &AssembledSystem,
    blocks: &PartialBlocks,
    lam1: Interval,
) -> (SparseIntervalMatrix, SparseIntervalMatrix) {
    let cot = sys.trig.cot_t();
    let dxy = blocks.kxy_plus.lin_comb(Interval::ONE, &blocks.kxy_minus, Interval::point(-1.0));
    let f1 = blocks.kxx.lin_comb(Interval::point(2.0), &dxy, -cot).lin_comb(
        Interval::ONE,
        &sys.m0,
        -(lam1 * 2.0 / Interval::point(sys.n as f64)),
    );
    let sxy = blocks.kxy_plus.lin_comb(Interval::ONE, &blocks.kxy_minus, Interval::ONE);
    let f2 = blocks.kyy.lin_comb(-(cot * 2.0), &sxy, Interval::ONE);
    (f1, f2)
}

/// Right-hand sides `(f₁, f₂)` for an eigenvector enclosure `u1` and eigenvalue `lam1`.
pub fn assemble_rhs_material(
    sys: &AssembledSystem,
    blocks: &PartialBlocks,
    u1: &IntervalVector,
    lam1: Interval,
) -> Result<(IntervalVector, IntervalVector), IntervalError> {
    u1.check_len(sys.dof)?;
    let (f1, f2) = material_operators(sys, blocks, lam1);
    Ok((f1.mul_vec(u1)?, f2.mul_vec(u1)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::enclose_theta;
    use crate::mesh::build_full_mesh;

    fn system(n: usize, m: usize) -> (SymmetricMesh, ThetaTrig, AssembledSystem) {
        let trig = enclose_theta(n).unwrap();
        let mesh = build_full_mesh(n, m);
        let sys = assemble_system(&mesh, &trig);
        (mesh, trig, sys)
    }

    #[test]
    fn pentagon_central_diagonal() {
        let (_, trig, sys) = system(5, 4);
        let d = sys.k0.get(0, 0).unwrap();
        assert!(d.lo >= 3.632 && d.hi <= 3.633, "{d:?}");
        assert!(d.overlaps(&(trig.tan_half_t * 5.0)));
        for (j, v) in sys.k0.row(0) {
            if j != 0 {
                assert!(v.overlaps(&-trig.tan_half_t));
            }
        }
    }

    #[test]
    fn hexagon_noncentral_diagonal() {
        let (mesh, trig, sys) = system(6, 5);
        let target = Interval::point(2.0) / trig.tan_t + trig.tan_half_t * 4.0;
        // 2/tan(π/3) + 4 tan(π/6) = 6/√3 = 3.4641016151377544
        assert!(target.contains(3.4641016151377544) || (target.mid() - 3.4641016151377544).abs() < 1e-15);
        let g = mesh.global(0, 2, 1);
        let row = mesh.interior_index[g].unwrap();
        let d = sys.k0.get(row, row).unwrap();
        assert!(d.overlaps(&target) && d.width() < 1e-14);
        let mut offs: Vec<f64> = sys.k0.row(row).filter(|&(j, _)| j != row).map(|(_, v)| v.mid()).collect();
        offs.sort_by(f64::total_cmp);
        assert_eq!(offs.len(), 6);
        let cot = trig.cot_t().mid();
        let t = trig.tan_half_t.mid();
        for (k, &v) in offs.iter().enumerate() {
            let expect = if k < 2 { -cot } else { -t };
            assert!((v - expect).abs() < 1e-14, "{v} vs {expect}");
        }
    }

    #[test]
    fn mass_diagonal_is_triangle_area() {
        let (_, trig, sys) = system(5, 6);
        let area = Interval::point(0.5) * trig.sin_t / 36.0;
        for (i, d) in sys.m0.diagonal().into_iter().enumerate() {
            let expect = if i == 0 { area * 5.0 / 6.0 } else { area };
            assert!(d.overlaps(&expect), "row {i}");
        }
        assert!(sys.area_h.overlaps(&area));
    }

    #[test]
    fn gradients_sum_to_zero() {
        for n in 5..10 {
            let trig = enclose_theta(n).unwrap();
            let g = element_gradients(&trig);
            assert!((g[0].0 + g[1].0 + g[2].0).contains(0.0));
            assert!((g[0].1 + g[1].1 + g[2].1).contains(0.0));
        }
        let g = element_gradients(&enclose_theta(6).unwrap());
        assert!((g[2].1 - 2.0 / 3f64.sqrt()).mag() < 1e-15);
    }

    #[test]
    fn k0_is_symmetric_m_matrix() {
        let (_, _, sys) = system(5, 5);
        assert!(sys.k0.is_symmetric() && sys.m0.is_symmetric());
        for i in 0..sys.dof {
            for (j, v) in sys.k0.row(i) {
                if i == j {
                    assert!(v.lo > 0.0);
                } else {
                    assert!(v.hi < 0.0);
                }
            }
        }
    }

    #[test]
    fn partial_entries_do_not_depend_on_h() {
        let trig = enclose_theta(5).unwrap();
        let m2 = build_full_mesh(5, 2);
        let m4 = build_full_mesh(5, 4);
        let (b2, b4) = (assemble_partials(&m2, &trig), assemble_partials(&m4, &trig));
        // Interior lattice point (1,0) of slice 0 and its neighbours.
        for (r, c) in [(1, 0), (1, 1)] {
            let i2 = m2.interior_index[m2.global(0, r, c)].unwrap();
            let i4 = m4.interior_index[m4.global(0, r, c)].unwrap();
            let (d2, d4) = (b2.kxx.get(i2, i2).unwrap(), b4.kxx.get(i4, i4).unwrap());
            assert_eq!(d2, d4);
            let (e2, e4) = (b2.kxy_plus.get(i2, 0), b4.kxy_plus.get(i4, 0));
            assert_eq!(e2, e4);
        }
    }

    #[test]
    fn partial_matrices_are_symmetric() {
        let trig = enclose_theta(5).unwrap();
        let mesh = build_full_mesh(5, 4);
        let b = assemble_partials(&mesh, &trig);
        for m in [&b.kxx, &b.kyy, &b.kxy_plus, &b.kxy_minus] {
            assert!(m.is_structurally_symmetric());
            for i in 0..m.dim {
                for (j, v) in m.row(i) {
                    assert!(v.overlaps(&m.get(j, i).unwrap()));
                }
            }
        }
    }

    #[test]
    fn rhs_vanishes_for_zero_vector() {
        let (mesh, trig, sys) = system(5, 3);
        let b = assemble_partials(&mesh, &trig);
        let (f1, f2) = assemble_rhs_material(&sys, &b, &IntervalVector::zeros(sys.dof), Interval::point(10.0)).unwrap();
        assert!(f1.iter().chain(f2.iter()).all(|v| *v == Interval::ZERO));
        assert!(assemble_rhs_material(&sys, &b, &IntervalVector::zeros(2), Interval::ONE).is_err());
    }

    #[test]
    fn slice_system_has_neumann_rays() {
        let trig = enclose_theta(5).unwrap();
        let slice = crate::mesh::build_slice_mesh(5, 3);
        let sys = assemble_slice_system(&slice, &trig);
        assert_eq!(sys.dof, 6);
        // Constants are in the kernel of the slice stiffness up to the Dirichlet edge:
        // the apex row sums to zero because all its neighbours are free.
        let s: Interval = sys.k0.row(0).map(|(_, v)| v).sum();
        assert!(s.contains(0.0));
    }
}
