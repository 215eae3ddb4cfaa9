//! Dihedrally symmetric triangulation of the regular n-gon.
//!
//! The polygon is split into n slices `T_j` (the triangle with apex at the
//! center and base `[a_j, a_{j+1}]`, `a_j = (cos jθ, sin jθ)`). Each slice is
//! subdivided into m² congruent triangles by the lattice
//! `p(r, c) = ((r − c)·a_j + c·a_{j+1}) / m`, `0 ≤ c ≤ r ≤ m`.
//!
//! Global numbering: the center is node 0; slice j owns the lattice points
//! with `r ≥ 1` and `0 ≤ c < r` (its ray `S_j` included, the ray `S_{j+1}`
//! excluded), numbered row by row. Rotating by θ therefore shifts the slice
//! index and never requires a search.

use std::collections::HashSet;

use crate::interval::{Interval, IntervalError, IntervalVector, ThetaTrig};

/// Orientation class of a lattice triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum TriangleClass {
    /// Homothetic image of the slice triangle: vertices `(r,c), (r+1,c), (r+1,c+1)`.
    Up,
    /// Point reflection of `Up`: vertices `(r+1,c+1), (r,c+1), (r,c)`.
    Down,
}

/// A triangle given by node indices in the reference vertex order (apex of
/// the homothetic copy first, then the images of `a_j` and `a_{j+1}`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub nodes: [usize; 3],
    pub class: TriangleClass,
}

/// Lattice index within a slice: `r(r+1)/2 + c`.
#[inline]
pub fn slice_index(r: usize, c: usize) -> usize {
    debug_assert!(c <= r);
    r * (r + 1) / 2 + c
}

/// Mesh of a single slice `T_0`.
#[derive(Clone, Debug)]
pub struct SliceMesh {
    pub n: usize,
    pub m: usize,
    /// Lattice coordinates `(r, c)` per node.
    pub nodes: Vec<(usize, usize)>,
    pub triangles: Vec<Triangle>,
    /// Node lies on the polygon boundary (`r = m`).
    pub boundary_mask: Vec<bool>,
}

impl SliceMesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes on the ray `[o, a_0]` (`c = 0`), apex included.
    pub fn ray_nodes(&self) -> Vec<usize> {
        (0..=self.m).map(|r| slice_index(r, 0)).collect()
    }

    /// Mirror of a slice node across the slice bisector: `(r, c) → (r, r − c)`.
    pub fn mirror(&self, i: usize) -> usize {
        let (r, c) = self.nodes[i];
        slice_index(r, r - c)
    }

    /// Non-boundary nodes in increasing order.
    pub fn free_nodes(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&i| !self.boundary_mask[i]).collect()
    }
}

fn check_params(n: usize, m: usize) {
    assert!(n >= 3, "polygon needs n ≥ 3 (got {n})");
    assert!(m >= 1, "subdivision count must be ≥ 1");
}

/// Lattice triangles of one slice in slice-local numbering.
fn slice_triangles(m: usize) -> Vec<Triangle> {
    let mut tris = Vec::with_capacity(m * m);
    for r in 0..m {
        for c in 0..=r {
            tris.push(Triangle {
                nodes: [slice_index(r, c), slice_index(r + 1, c), slice_index(r + 1, c + 1)],
                class: TriangleClass::Up,
            });
            if c < r {
                tris.push(Triangle {
                    nodes: [slice_index(r + 1, c + 1), slice_index(r, c + 1), slice_index(r, c)],
                    class: TriangleClass::Down,
                });
            }
        }
    }
    tris
}

/// Builds the lattice mesh of slice `T_0`.
pub fn build_slice_mesh(n: usize, m: usize) -> SliceMesh {
    check_params(n, m);
    let mut nodes = Vec::with_capacity((m + 1) * (m + 2) / 2);
    for r in 0..=m {
        for c in 0..=r {
            nodes.push((r, c));
        }
    }
    let boundary_mask = nodes.iter().map(|&(r, _)| r == m).collect();
    SliceMesh { n, m, nodes, triangles: slice_triangles(m), boundary_mask }
}

/// Full symmetric mesh of the regular n-gon.
#[derive(Clone, Debug)]
pub struct SymmetricMesh {
    pub n: usize,
    pub m: usize,
    /// `(slice, r, c)` of the owning slice for every node; the center is `(0, 0, 0)`.
    pub nodes: Vec<(usize, usize, usize)>,
    pub triangles: Vec<Triangle>,
    pub boundary_mask: Vec<bool>,
    /// Slice label `j` per triangle.
    pub slice_label: Vec<usize>,
    /// Row of K₀/M₀ for every interior node, `None` on the boundary.
    pub interior_index: Vec<Option<usize>>,
    /// Inverse of `interior_index`.
    pub interior_nodes: Vec<usize>,
    /// Slice-local node → global node, per slice.
    slice_maps: Vec<Vec<usize>>,
}

impl SymmetricMesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn interior_count(&self) -> usize {
        self.interior_nodes.len()
    }

    fn per_slice(&self) -> usize {
        self.m * (self.m + 1) / 2
    }

    /// Global index of lattice point `(r, c)` of slice `j` (any `0 ≤ c ≤ r`).
    pub fn global(&self, j: usize, r: usize, c: usize) -> usize {
        global_index(self.n, self.m, j, r, c)
    }

    /// Slice-local → global map of slice `j`.
    pub fn slice_map(&self, j: usize) -> &[usize] {
        &self.slice_maps[j]
    }

    /// Slice-local → interior row map of slice `j` (`None` on the boundary).
    pub fn slice_interior_map(&self, j: usize) -> Vec<Option<usize>> {
        self.slice_maps[j].iter().map(|&g| self.interior_index[g]).collect()
    }

    /// Node permutation of the rotation by `k·θ`: node `i` is mapped to `perm[i]`.
    pub fn rotation_permutation(&self, k: usize) -> Vec<usize> {
        assert!(k < self.n);
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, &(j, r, c))| if i == 0 { 0 } else { self.global((j + k) % self.n, r, c) })
            .collect()
    }

    /// Node permutation of the reflection `y → −y`.
    pub fn reflection_permutation(&self) -> Vec<usize> {
        let n = self.n;
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, &(j, r, c))| if i == 0 { 0 } else { self.global(n - 1 - j, r, r - c) })
            .collect()
    }

    /// Restriction of a node permutation to interior rows.
    pub fn interior_permutation(&self, perm: &[usize]) -> Vec<usize> {
        self.interior_nodes
            .iter()
            .map(|&g| self.interior_index[perm[g]].expect("symmetries preserve the boundary"))
            .collect()
    }

    /// Interval coordinates of node `i`.
    pub fn coordinates(&self, i: usize, trig: &ThetaTrig) -> (Interval, Interval) {
        let (j, r, c) = self.nodes[i];
        lattice_point(trig, self.m, j, r, c)
    }

    /// Extends slice values to the whole mesh by rotation. The input must be
    /// symmetric across the slice bisector so the result is invariant under
    /// the full dihedral group.
    pub fn extend_slice_to_full(
        &self,
        slice: &SliceMesh,
        values: &IntervalVector,
    ) -> Result<IntervalVector, IntervalError> {
        values.check_len(slice.node_count())?;
        if slice.n != self.n || slice.m != self.m {
            return Err(IntervalError::Domain("slice mesh does not match full mesh".into()));
        }
        for i in 0..slice.node_count() {
            if !values[i].overlaps(&values[slice.mirror(i)]) {
                return Err(IntervalError::Domain(format!("slice values not mirror-symmetric at node {i}")));
            }
        }
        let mut out = IntervalVector::zeros(self.node_count());
        out[0] = values[0];
        for (g, &(_, r, c)) in self.nodes.iter().enumerate().skip(1) {
            out[g] = values[slice_index(r, c)];
        }
        Ok(out)
    }

    /// Node coordinates (midpoints) and triangles as CSV text.
    pub fn to_csv(&self, trig: &ThetaTrig) -> (String, String) {
        use std::fmt::Write;
        let mut nodes = String::from("node,x,y,boundary\n");
        for i in 0..self.node_count() {
            let (x, y) = self.coordinates(i, trig);
            let _ = writeln!(nodes, "{i},{:.17e},{:.17e},{}", x.mid(), y.mid(), self.boundary_mask[i] as u8);
        }
        let mut tris = String::from("triangle,n0,n1,n2,slice\n");
        for (t, tri) in self.triangles.iter().enumerate() {
            let [a, b, c] = tri.nodes;
            let _ = writeln!(tris, "{t},{a},{b},{c},{}", self.slice_label[t]);
        }
        (nodes, tris)
    }

    /// Number of distinct undirected edges.
    pub fn edge_count(&self) -> usize {
        let mut edges = HashSet::new();
        for t in &self.triangles {
            for (a, b) in [(0, 1), (1, 2), (2, 0)] {
                let (u, v) = (t.nodes[a], t.nodes[b]);
                edges.insert((u.min(v), u.max(v)));
            }
        }
        edges.len()
    }
}

fn global_index(n: usize, m: usize, j: usize, r: usize, c: usize) -> usize {
    debug_assert!(c <= r && r <= m);
    if r == 0 {
        return 0;
    }
    let (j, c) = if c == r { ((j + 1) % n, 0) } else { (j, c) };
    1 + j * (m * (m + 1) / 2) + r * (r - 1) / 2 + c
}

/// `((r − c)·a_j + c·a_{j+1}) / m` in interval arithmetic.
pub fn lattice_point(trig: &ThetaTrig, m: usize, j: usize, r: usize, c: usize) -> (Interval, Interval) {
    let (cj, sj) = (trig.cos_multiple(j as i64), trig.sin_multiple(j as i64));
    let (cj1, sj1) = (trig.cos_multiple(j as i64 + 1), trig.sin_multiple(j as i64 + 1));
    let a = Interval::point((r - c) as f64);
    let b = Interval::point(c as f64);
    let mm = Interval::point(m as f64);
    ((a * cj + b * cj1) / mm, (a * sj + b * sj1) / mm)
}

/// Builds the full dihedral mesh with `N = 1 + n·m(m+1)/2` nodes.
pub fn build_full_mesh(n: usize, m: usize) -> SymmetricMesh {
    check_params(n, m);
    let per_slice = m * (m + 1) / 2;
    let total = 1 + n * per_slice;
    let mut nodes = Vec::with_capacity(total);
    nodes.push((0, 0, 0));
    for j in 0..n {
        for r in 1..=m {
            for c in 0..r {
                nodes.push((j, r, c));
            }
        }
    }
    debug_assert_eq!(nodes.len(), total);
    let boundary_mask: Vec<bool> = nodes.iter().map(|&(_, r, _)| r == m).collect();

    let local = build_slice_mesh(n, m);
    let slice_maps: Vec<Vec<usize>> =
        (0..n).map(|j| local.nodes.iter().map(|&(r, c)| global_index(n, m, j, r, c)).collect()).collect();

    let mut triangles = Vec::with_capacity(n * m * m);
    let mut slice_label = Vec::with_capacity(n * m * m);
    for (j, map) in slice_maps.iter().enumerate() {
        for t in &local.triangles {
            triangles.push(Triangle { nodes: t.nodes.map(|i| map[i]), class: t.class });
            slice_label.push(j);
        }
    }

    let mut interior_index = vec![None; total];
    let mut interior_nodes = Vec::new();
    for (i, &b) in boundary_mask.iter().enumerate() {
        if !b {
            interior_index[i] = Some(interior_nodes.len());
            interior_nodes.push(i);
        }
    }

    let mesh = SymmetricMesh {
        n,
        m,
        nodes,
        triangles,
        boundary_mask,
        slice_label,
        interior_index,
        interior_nodes,
        slice_maps,
    };
    debug_assert_eq!(mesh.per_slice(), per_slice);
    mesh
}
