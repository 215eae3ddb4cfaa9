//! Independent floating-point reimplementations checked against the
//! interval pipeline on small pentagon meshes.
//!
//! The oracles here share nothing with the library beyond the mesh
//! connectivity: element matrices come from node coordinates, eigenvalues
//! from inertia counts of dense LDLᵀ factorizations, eigenvectors from
//! inverse iteration, the material derivatives from a dense solve of the
//! bordered system, and the Hessian spectrum from per-triangle gradients.

#![allow(clippy::needless_range_loop)]

use ngon_cert::assembly::material_operators;
use ngon_cert::certify::{enclose_eigs, hessian_spectrum, solve_material, CertifyConfig, Problem};
use ngon_cert::interval::Interval;
use ngon_cert::mesh::SymmetricMesh;

type Dense = Vec<Vec<f64>>;

const N: usize = 5;

fn coords(mesh: &SymmetricMesh) -> Vec<(f64, f64)> {
    let t = 2.0 * std::f64::consts::PI / mesh.n as f64;
    let m = mesh.m as f64;
    mesh.nodes
        .iter()
        .map(|&(j, r, c)| {
            let (a, b) = ((j as f64 * t).cos(), (j as f64 * t).sin());
            let (a1, b1) = (((j + 1) as f64 * t).cos(), ((j + 1) as f64 * t).sin());
            let (p, q) = ((r - c) as f64, c as f64);
            ((p * a + q * a1) / m, (p * b + q * b1) / m)
        })
        .collect()
}

/// Area and hat-function gradients of a triangle from its coordinates.
fn gradients(p: [(f64, f64); 3]) -> (f64, [(f64, f64); 3]) {
    let det = (p[1].0 - p[0].0) * (p[2].1 - p[0].1) - (p[2].0 - p[0].0) * (p[1].1 - p[0].1);
    let g = |i: usize| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        ((p[j].1 - p[k].1) / det, (p[k].0 - p[j].0) / det)
    };
    (0.5 * det.abs(), [g(0), g(1), g(2)])
}

/// Dense K₀, M₀ over interior nodes.
fn assemble(mesh: &SymmetricMesh) -> (Dense, Dense) {
    let xy = coords(mesh);
    let dim = mesh.interior_nodes.len();
    let mut k = vec![vec![0.0; dim]; dim];
    let mut m = vec![vec![0.0; dim]; dim];
    for t in &mesh.triangles {
        let (area, g) = gradients(t.nodes.map(|i| xy[i]));
        for a in 0..3 {
            for b in 0..3 {
                if let (Some(i), Some(j)) = (mesh.interior_index[t.nodes[a]], mesh.interior_index[t.nodes[b]]) {
                    k[i][j] += area * (g[a].0 * g[b].0 + g[a].1 * g[b].1);
                    m[i][j] += area * if a == b { 1.0 / 6.0 } else { 1.0 / 12.0 };
                }
            }
        }
    }
    (k, m)
}

/// Number of negative pivots of `A − σB` (Sylvester inertia).
fn count_below(a: &Dense, b: &Dense, sigma: f64) -> usize {
    let n = a.len();
    let mut w: Dense = (0..n).map(|i| (0..n).map(|j| a[i][j] - sigma * b[i][j]).collect()).collect();
    let mut neg = 0;
    for p in 0..n {
        let d = w[p][p];
        if d < 0.0 {
            neg += 1;
        }
        for i in p + 1..n {
            let f = w[i][p] / d;
            if f != 0.0 {
                for j in p..n {
                    w[i][j] -= f * w[p][j];
                }
            }
        }
    }
    neg
}

/// Gaussian elimination with partial pivoting.
fn solve(mut a: Dense, mut rhs: Vec<f64>) -> Vec<f64> {
    let n = rhs.len();
    for p in 0..n {
        let piv = (p..n).max_by(|&i, &j| a[i][p].abs().total_cmp(&a[j][p].abs())).unwrap();
        a.swap(p, piv);
        rhs.swap(p, piv);
        for i in p + 1..n {
            let f = a[i][p] / a[p][p];
            for j in p..n {
                a[i][j] -= f * a[p][j];
            }
            rhs[i] -= f * rhs[p];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (rhs[i] - s) / a[i][i];
    }
    x
}

fn matvec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Smallest eigenvalue by bisection on inertia, eigenvector by inverse
/// iteration; M-normalized with positive sum.
fn first_eigenpair(k: &Dense, m: &Dense) -> (f64, Vec<f64>) {
    let (mut lo, mut hi) = (0.0, 100.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(k, m, mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lam = 0.5 * (lo + hi);
    let shift = lam * (1.0 - 1e-9);
    let a: Dense = (0..k.len()).map(|i| (0..k.len()).map(|j| k[i][j] - shift * m[i][j]).collect()).collect();
    let mut v = vec![1.0; k.len()];
    for _ in 0..4 {
        v = solve(a.clone(), matvec(m, &v));
        let s = dot(&v, &matvec(m, &v)).sqrt();
        v.iter_mut().for_each(|x| *x /= s);
    }
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    (lam, v)
}

fn max_abs(a: &Dense) -> f64 {
    a.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()))
}

fn problem(m: usize) -> Problem {
    Problem::build(&CertifyConfig::new(N, m)).unwrap()
}

#[test]
fn assembly_matches_coordinate_assembler() {
    for m in 2..=8 {
        let prob = problem(m);
        let (k, mm) = assemble(&prob.mesh);
        for (oracle, ours) in [(&k, prob.sys.k0.mid().to_dense()), (&mm, prob.sys.m0.mid().to_dense())] {
            let scale = max_abs(oracle);
            for i in 0..oracle.len() {
                for j in 0..oracle.len() {
                    assert!((oracle[i][j] - ours[i][j]).abs() <= 1e-12 * scale, "m = {m}, ({i}, {j})");
                }
            }
        }
    }
}

/// Relative slack for the floating inertia test at enclosure endpoints.
const INERTIA_SLACK: f64 = 1e-12;

#[test]
fn eigenvalue_enclosures_contain_oracle_eigenvalues() {
    for m in 2..=8 {
        let prob = problem(m);
        let (k, mm) = assemble(&prob.mesh);
        let eigs = enclose_eigs(&prob.sys, prob.c1).unwrap();
        let (l1, l2) = (eigs.lam1.value, eigs.lam2.value);
        let below = |x: f64| count_below(&k, &mm, x);
        // λ₁,ₕ is the only eigenvalue in the first enclosure, the double
        // λ₂,ₕ = λ₃,ₕ in the second.
        assert_eq!(below(l1.lo * (1.0 - INERTIA_SLACK)), 0, "m = {m}");
        assert_eq!(below(l1.hi * (1.0 + INERTIA_SLACK)), 1, "m = {m}");
        assert_eq!(below(l2.lo * (1.0 - INERTIA_SLACK)), 1, "m = {m}");
        assert_eq!(below(l2.hi * (1.0 + INERTIA_SLACK)), 3, "m = {m}");
        assert!(l1.rad() < 1e-8 && l2.rad() < 1e-8);
        // The eigenvector ball contains the oracle eigenvector.
        let (_, u) = first_eigenpair(&k, &mm);
        let (c, r) = eigs.vector_ball();
        let d = u.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(d <= r + 1e-12, "m = {m}: {d} > {r}");
        assert!(eigs.positive_vector);
    }
}

#[test]
fn material_enclosures_contain_kkt_solutions() {
    for m in 2..=8 {
        let prob = problem(m);
        let cfg = CertifyConfig::new(N, m);
        let eigs = enclose_eigs(&prob.sys, prob.c1).unwrap();
        let mats = solve_material(&prob, &eigs, &cfg).unwrap();
        let (k, mm) = assemble(&prob.mesh);
        let (lam, u) = first_eigenpair(&k, &mm);
        let (f1, f2) = material_operators(&prob.sys, &prob.blocks, Interval::point(lam));
        let dim = k.len();
        let mu = matvec(&mm, &u);
        let h: Dense = (0..=dim)
            .map(|i| {
                (0..=dim)
                    .map(|j| match (i < dim, j < dim) {
                        (true, true) => k[i][j] - lam * mm[i][j],
                        (true, false) => mu[i],
                        (false, true) => mu[j],
                        (false, false) => 0.0,
                    })
                    .collect()
            })
            .collect();
        for (i, f) in [f1, f2].iter().enumerate() {
            let mut rhs = f.mid().matvec(&u);
            rhs.push(0.0);
            let x = solve(h.clone(), rhs);
            let sol = mats.get(i);
            let d = x[..dim].iter().zip(&sol.center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let norm = x[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(d <= sol.error_bound + 1e-11 * norm, "m = {m}, U{}: {d} > {}", i + 1, sol.error_bound);
            assert!(sol.error_bound < 1e-6);
        }
        assert!(mats.symmetric[0] && mats.symmetric[1]);
        assert!(mats.orthogonality.iter().all(Interval::contains_zero));
    }
}

/// Hessian eigenvalues from per-triangle gradients, in plain floating point.
fn float_spectrum(mesh: &SymmetricMesh, u: &[f64], w: [&[f64]; 2]) -> Vec<f64> {
    let n = mesh.n;
    let t = 2.0 * std::f64::consts::PI / n as f64;
    let xy = coords(mesh);
    let val = |v: &[f64], g: usize| mesh.interior_index[g].map_or(0.0, |i| v[i]);
    // pair[i][j] = ∫_{T_j} ∂_p u ∂_q Wⁱ; own = ∫_{T_0} ∂_p u ∂_q u.
    let mut pair = vec![vec![[[0.0; 2]; 2]; n]; 2];
    let mut own = [0.0; 2];
    let per = mesh.m * mesh.m;
    for (idx, tri) in mesh.triangles.iter().enumerate() {
        let j = idx / per;
        let (area, g) = gradients(tri.nodes.map(|i| xy[i]));
        let grad = |v: &[f64]| {
            (0..3).fold((0.0, 0.0), |acc, a| {
                let x = val(v, tri.nodes[a]);
                (acc.0 + x * g[a].0, acc.1 + x * g[a].1)
            })
        };
        let gu = grad(u);
        if j == 0 {
            own[0] += area * gu.0 * gu.0;
            own[1] += area * gu.1 * gu.1;
        }
        for i in 0..2 {
            let gw = grad(w[i]);
            let (a, b) = ([gu.0, gu.1], [gw.0, gw.1]);
            for p in 0..2 {
                for q in 0..2 {
                    pair[i][j][p][q] += area * a[p] * b[q];
                }
            }
        }
    }
    let area_p = 0.5 * n as f64 * t.sin();
    let cot = t.cos() / t.sin();
    let mut mu = Vec::new();
    for k in 0..n {
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for j in 0..n {
            let (c0, c1) = (((j * k) as f64 * t).cos(), (((j + 1) * k) as f64 * t).cos());
            let (s0, s1) = (((j * k) as f64 * t).sin(), (((j + 1) * k) as f64 * t).sin());
            let (rc, rs) = (((2 * j + 1) as f64 * t).cos(), ((2 * j + 1) as f64 * t).sin());
            let p1 = pair[0][j];
            let p2 = pair[1][j];
            let tr = |p: [[f64; 2]; 2]| p[0][0] + p[1][1];
            let ra = |p: [[f64; 2]; 2]| -rs * p[0][0] + rc * (p[0][1] + p[1][0]) + rs * p[1][1];
            let rb = |p: [[f64; 2]; 2]| -rc * p[0][0] - rs * (p[0][1] + p[1][0]) + rc * p[1][1];
            a += (c1 + c0) * tr(p1) + (c1 - c0) / t.sin() * ra(p1);
            b += cot * (c1 - c0) * tr(p2) + (c1 - c0) / t.sin() * rb(p2);
            c += cot * (s1 - s0) * tr(p1) + (s1 - s0) / t.sin() * rb(p1);
        }
        let coef = 2.0 * n as f64 * (1.0 - (k as f64 * t).cos()) / t.sin();
        let alpha = coef * own[0] - 2.0 * area_p * a;
        let beta = coef * own[1] - 2.0 * area_p * b;
        let gamma = -2.0 * area_p * c;
        let root = ((alpha - beta).powi(2) + 4.0 * gamma * gamma).sqrt();
        if k == 0 {
            mu.extend([0.0, 0.0]);
        } else {
            mu.extend([0.5 * (alpha + beta - root), 0.5 * (alpha + beta + root)]);
        }
    }
    mu
}

#[test]
fn hessian_midpoints_match_floating_reimplementation() {
    for m in 2..=8 {
        let prob = problem(m);
        let cfg = CertifyConfig::new(N, m);
        let eigs = enclose_eigs(&prob.sys, prob.c1).unwrap();
        let mats = solve_material(&prob, &eigs, &cfg).unwrap();
        let spec = hessian_spectrum(&prob, &eigs, &mats).unwrap();
        let (u, _) = eigs.vector_ball();
        let oracle = float_spectrum(&prob.mesh, &u, [&mats.u1.center, &mats.u2.center]);
        let scale = oracle.iter().fold(0.0f64, |s, x| s.max(x.abs()));
        for (j, (o, iv)) in oracle.iter().zip(&spec.mu).enumerate() {
            assert!((o - iv.mid()).abs() <= 1e-8 * scale, "m = {m}, mu_{j}: {o} vs {iv}");
            assert!(iv.rad() < 1e-6, "m = {m}, mu_{j} enclosure too wide: {iv}");
        }
    }
}

#[test]
fn spectrum_is_dihedrally_consistent() {
    let m = 6;
    let prob = problem(m);
    let eigs = enclose_eigs(&prob.sys, prob.c1).unwrap();
    let mats = solve_material(&prob, &eigs, &CertifyConfig::new(N, m)).unwrap();
    let spec = hessian_spectrum(&prob, &eigs, &mats).unwrap();
    for k in 1..N {
        for s in 0..2 {
            assert!(spec.mu[2 * k + s].overlaps(&spec.mu[2 * (N - k) + s]), "k = {k}");
        }
        assert!(spec.mu[2 * k].hi <= spec.mu[2 * k + 1].hi);
    }
    assert_eq!(spec.mu[0], Interval::ZERO);
    assert_eq!(spec.mu[1], Interval::ZERO);
}

/// Globally, `Σ_j ∫_{T_j} ∇u·∇U = uᵀKU = λ uᵀMU`, which vanishes by the
/// orthogonality constraint; per slice no such identity holds.
#[test]
fn gradient_form_matches_mass_form_globally() {
    let m = 8;
    let prob = problem(m);
    let eigs = enclose_eigs(&prob.sys, prob.c1).unwrap();
    let mats = solve_material(&prob, &eigs, &CertifyConfig::new(N, m)).unwrap();
    let (u, _) = eigs.vector_ball();
    for sol in [&mats.u1, &mats.u2] {
        let total: f64 = (0..N)
            .map(|j| {
                let p = prob.blocks.slice_pairing(j, &u, &sol.center);
                (p[0][0] + p[1][1]).mid()
            })
            .sum();
        let mass = eigs.lam1.approx_value * dot(&u, &prob.sys.m0.mid().matvec(&sol.center));
        let scale = dot(&sol.center, &prob.sys.k0.mid().matvec(&sol.center)).sqrt();
        assert!((total - mass).abs() <= 1e-8 * scale, "{total} vs {mass}");
    }
}

/// Every check above, for the acceptance runner.
#[allow(dead_code)]
pub fn suite() -> Vec<(&'static str, fn())> {
    vec![
        ("coordinate assembler", assembly_matches_coordinate_assembler),
        ("eigenvalue inertia oracle", eigenvalue_enclosures_contain_oracle_eigenvalues),
        ("bordered-system oracle", material_enclosures_contain_kkt_solutions),
        ("floating Hessian reimplementation", hessian_midpoints_match_floating_reimplementation),
        ("dihedral consistency", spectrum_is_dihedrally_consistent),
        ("gradient/mass identity", gradient_form_matches_mass_form_globally),
    ]
}
