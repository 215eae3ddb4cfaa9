//! Rigorous eigenpair enclosures: residual bounds and a Krawczyk-type
//! verification that needs only one floating-point inverse.

use serde::Serialize;

use super::dense::inverse;
use super::LinalgError;
use crate::interval::{sqrt_up, Interval, IntervalVector, SparseIntervalMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnclosureMethod {
    Residual,
    Krawczyk,
}

/// Certified enclosure of a generalized eigenvalue, and optionally of an
/// associated eigenvector.
#[derive(Clone, Debug)]
pub struct EigenEnclosure {
    pub value: Interval,
    /// Box containing an eigenvector; present only once the eigenvalue has
    /// been shown to be simple.
    pub vector: Option<IntervalVector>,
    pub simple: bool,
    pub method: EnclosureMethod,
    /// Floating-point candidate the enclosure is centred on.
    pub approx: Vec<f64>,
    pub approx_value: f64,
    /// Upper bound of `rᵀM⁻¹r` for the candidate residual `r`.
    pub residual_m: f64,
    /// Enclosure of `x̃ᵀMx̃`.
    pub norm_m_sq: Interval,
    /// Euclidean radius of the eigenvector ball around `approx`, when the
    /// vector enclosure came from a residual bound.
    pub vector_radius: Option<f64>,
}

impl EigenEnclosure {
    /// Eigenvector as a Euclidean ball `(centre, radius)`.
    pub fn vector_ball(&self) -> Option<(Vec<f64>, f64)> {
        if let Some(r) = self.vector_radius {
            return Some((self.approx.clone(), r));
        }
        let v = self.vector.as_ref()?;
        let c = v.mid();
        // Box radius measured from the rounded midpoints.
        let r = v
            .iter()
            .zip(&c)
            .map(|(x, &m)| (x.hi - m).max(m - x.lo))
            .fold(0.0, |acc, d| crate::interval::add_up(acc, crate::interval::mul_up(d, d)));
        Some((c, sqrt_up(r)))
    }

    /// Marks the eigenvalue simple and attaches the ball of M-radius
    /// `delta_m` around the candidate, converted to a per-coordinate box
    /// through `|x|₂² ≤ inv_mass · |x|²_M`.
    pub fn with_vector_ball(mut self, delta_m: f64, inv_mass: Interval) -> Self {
        let r = (Interval::point(delta_m) * inv_mass.sqrt().expect("positive mass bound")).hi;
        self.vector = Some(IntervalVector::from_ball(&self.approx, r));
        self.vector_radius = Some(r);
        self.simple = true;
        self
    }
}

/// Enclosure `[λ̃ − ρ, λ̃ + ρ]` with `ρ² ≥ rᵀM⁻¹r / x̃ᵀMx̃`, where `rᵀM⁻¹r` is
/// bounded by `inv_mass · |r|²` and `inv_mass ≥ 1/λ_min(M)`.
pub fn residual_enclosure(
    k: &SparseIntervalMatrix,
    m: &SparseIntervalMatrix,
    x: &[f64],
    lambda: f64,
    inv_mass: Interval,
) -> Result<EigenEnclosure, LinalgError> {
    if x.len() != k.dim || x.len() != m.dim {
        return Err(LinalgError::Dimension(format!("vector of length {} for order {}", x.len(), k.dim)));
    }
    let kx = k.mul_point(x);
    let mx = m.mul_point(x);
    let lam = Interval::point(lambda);
    let r2: Interval = kx.iter().zip(mx.iter()).map(|(&a, &b)| (a - lam * b).sqr()).sum();
    let xmx = IntervalVector::from_points(x).dot(&mx);
    if !xmx.is_positive() {
        return Err(LinalgError::Uncertified("x̃ᵀMx̃ is not certified positive".into()));
    }
    let rmr = (Interval::new(0.0, r2.hi) * Interval::new(0.0, inv_mass.hi)).hi;
    let rho2 = Interval::new(0.0, rmr) / xmx;
    let rho = sqrt_up(rho2.hi);
    Ok(EigenEnclosure {
        value: Interval::new(lambda, lambda) + Interval::new(-rho, rho),
        vector: None,
        simple: false,
        method: EnclosureMethod::Residual,
        approx: x.to_vec(),
        approx_value: lambda,
        residual_m: rmr,
        norm_m_sq: xmx,
        vector_radius: None,
    })
}

/// Bound on `|x̃ − x*|_M` for an eigenvector `x*` (with `|x*|_M = 1`) of the
/// only eigenvalue in `[λ̃ − a, λ̃ + a]`:
/// `q + max{(|x̃|_M − 1)², (1 − √(x̃ᵀMx̃ − q))²}` with `q = rᵀM⁻¹r / a²`.
pub fn eigvec_error_bound(enc: &EigenEnclosure, gap: f64) -> Result<f64, LinalgError> {
    let rho = enc.value.rad();
    if !(gap > 0.0) || gap < rho {
        return Err(LinalgError::Uncertified(format!("separation {gap} below the residual radius {rho}")));
    }
    let q = Interval::new(0.0, enc.residual_m) / Interval::point(gap).sqr();
    let norm = enc.norm_m_sq.sqrt().map_err(|e| LinalgError::Uncertified(e.to_string()))?;
    let t1 = (norm - 1.0).sqr();
    let radicand = enc.norm_m_sq - Interval::point(q.hi);
    if radicand.lo < 0.0 {
        return Err(LinalgError::Uncertified("negative radicand: residual too large for the gap".into()));
    }
    let s = Interval::new(radicand.lo, radicand.lo).sqrt().expect("non-negative");
    let t2 = (Interval::ONE - Interval::point(s.lo)).sqr();
    let total = q + t1.max(&t2);
    Ok(sqrt_up(total.hi))
}

/// Krawczyk-type verification of a simple eigenpair of `(K, M)`, with the
/// largest-magnitude component of `x̃` held fixed.
///
/// The approximate inverse of the bordered Jacobian is formed once; the
/// Newton-like map is iterated with ε-inflation until the image lands in
/// the interior of its argument. On success the eigenvector box is
/// normalized by `x_v = x̃_v` rather than in the M-norm.
pub fn krawczyk_eigenpair(
    k: &SparseIntervalMatrix,
    m: &SparseIntervalMatrix,
    x: &[f64],
    lambda: f64,
) -> Result<EigenEnclosure, LinalgError> {
    let n = k.dim;
    if x.len() != n || m.dim != n {
        return Err(LinalgError::Dimension(format!("vector of length {} for order {n}", x.len())));
    }
    let v = (0..n).max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs())).ok_or(LinalgError::Dimension("empty".into()))?;
    let lam = Interval::point(lambda);
    let mx = m.mul_point(x);

    // Bordered Jacobian: column v of K − λ̃M replaced by −Mx̃.
    let mut g_mid = vec![vec![0.0; n]; n];
    let mut g_cols: Vec<Vec<(usize, Interval)>> = vec![Vec::new(); n];
    for i in 0..n {
        for (j, a) in k.row(i) {
            if j != v {
                g_cols[j].push((i, a));
            }
        }
        for (j, b) in m.row(i) {
            if j != v {
                g_cols[j].push((i, -(lam * b)));
            }
        }
        g_cols[v].push((i, -mx[i]));
    }
    for (j, col) in g_cols.iter().enumerate() {
        for &(i, a) in col {
            g_mid[i][j] += a.mid();
        }
    }
    let r = inverse(&g_mid);
    if r.iter().flatten().any(|x| !x.is_finite()) {
        return Err(LinalgError::Uncertified("singular bordered Jacobian".into()));
    }
    let apply_r = |w: &IntervalVector| -> IntervalVector {
        (0..n).map(|i| (0..n).map(|j| Interval::point(r[i][j]) * w[j]).sum()).collect()
    };

    let kx = k.mul_point(x);
    let res: IntervalVector = kx.iter().zip(mx.iter()).map(|(&a, &b)| a - lam * b).collect();
    let z: IntervalVector = apply_r(&res).iter().map(|&a| -a).collect();

    // C = I − R·G, one sparse column at a time.
    let mut c = vec![vec![Interval::ZERO; n]; n];
    for (j, col) in g_cols.iter().enumerate() {
        let mut acc = vec![Interval::ZERO; n];
        for &(kk, g) in col {
            for (i, a) in acc.iter_mut().enumerate() {
                *a += Interval::point(r[i][kk]) * g;
            }
        }
        for i in 0..n {
            c[i][j] = if i == j { Interval::ONE - acc[i] } else { -acc[i] };
        }
    }

    let eps: Vec<Interval> = z
        .iter()
        .map(|a| {
            let e = crate::interval::add_up(crate::interval::mul_up(0.1, a.mag()), f64::MIN_POSITIVE);
            Interval::new(-e, e)
        })
        .collect();
    let sweeps = (15 * (usize::from(z[v].mag() > 0.1) + 1)).min(20);
    let mut y = z.clone();
    for _ in 0..sweeps {
        let xb: IntervalVector = y.iter().zip(&eps).map(|(&a, &e)| a + e).collect();
        let mut xx = xb.clone();
        xx[v] = Interval::ZERO;
        let quad = m.mul_vec(&xx).expect("dimension checked").scale(xb[v]);
        let rq = apply_r(&quad);
        y = (0..n).map(|i| z[i] + (0..n).map(|j| c[i][j] * xb[j]).sum::<Interval>() + rq[i]).collect();
        if !y.all_finite() {
            break;
        }
        if y.iter().zip(xb.iter()).all(|(a, b)| a.interior_of(b)) {
            let value = lam + y[v];
            let vector: IntervalVector =
                (0..n).map(|i| if i == v { Interval::point(x[v]) } else { Interval::point(x[i]) + y[i] }).collect();
            return Ok(EigenEnclosure {
                value,
                vector: Some(vector),
                simple: true,
                method: EnclosureMethod::Krawczyk,
                approx: x.to_vec(),
                approx_value: lambda,
                residual_m: f64::NAN,
                norm_m_sq: IntervalVector::from_points(x).dot(&mx),
                vector_radius: None,
            });
        }
    }
    Err(LinalgError::Uncertified(format!("no contraction within {sweeps} sweeps")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> SparseIntervalMatrix {
        let t: Vec<_> = d.iter().enumerate().map(|(i, &v)| (i, i, Interval::point(v))).collect();
        SparseIntervalMatrix::from_triplets(d.len(), &t)
    }

    #[test]
    fn exact_pair_has_zero_radius() {
        let k = diag(&[2.0, 5.0]);
        let m = diag(&[1.0, 1.0]);
        let e = residual_enclosure(&k, &m, &[1.0, 0.0], 2.0, Interval::ONE).unwrap();
        assert_eq!(e.value, Interval::point(2.0));
        assert_eq!(eigvec_error_bound(&e, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn radius_covers_perturbed_pair() {
        let k = diag(&[2.0, 5.0]);
        let m = diag(&[1.0, 1.0]);
        let e = residual_enclosure(&k, &m, &[1.0, 1e-3], 2.001, Interval::ONE).unwrap();
        assert!(e.value.contains(2.0));
        let b = eigvec_error_bound(&e, 2.9).unwrap();
        // True eigenvector (1, 0): distance ≈ 1e-3.
        assert!((1e-3..1e-2).contains(&b), "{b}");
    }

    #[test]
    fn bound_grows_when_gap_shrinks() {
        let k = diag(&[2.0, 5.0]);
        let m = diag(&[1.0, 1.0]);
        let e = residual_enclosure(&k, &m, &[1.0, 1e-2], 2.0, Interval::ONE).unwrap();
        let wide = eigvec_error_bound(&e, 2.0).unwrap();
        let narrow = eigvec_error_bound(&e, 1.0).unwrap();
        assert!(narrow > wide);
        assert!(eigvec_error_bound(&e, 1e-6).is_err());
    }

    #[test]
    fn krawczyk_diagonal_is_tight() {
        let k = diag(&[3.0, 7.0]);
        let m = diag(&[1.0, 1.0]);
        let e = krawczyk_eigenpair(&k, &m, &[1.0, 0.0], 3.0).unwrap();
        assert!(e.value.contains(3.0));
        assert!(e.value.width() <= 4.0 * f64::EPSILON * 3.0, "{}", e.value);
        assert!(e.simple);
    }

    #[test]
    fn krawczyk_tridiagonal_contains_exact_pair() {
        let t = [(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0), (1, 2, -1.0), (2, 1, -1.0), (2, 2, 2.0)];
        let k = SparseIntervalMatrix::from_triplets(3, &t.map(|(i, j, v)| (i, j, Interval::point(v))));
        let m = diag(&[1.0, 1.0, 1.0]);
        let x = [0.5 + 1e-9, 0.5f64.sqrt(), 0.5];
        let e = krawczyk_eigenpair(&k, &m, &x, 0.5858).unwrap();
        let exact = Interval::point(2.0) - Interval::point(2.0).sqrt().unwrap();
        assert!(e.value.overlaps(&exact));
        assert!(e.value.width() < 1e-12);
        // Eigenvector normalized by its largest entry √2/2.
        let v = e.vector.unwrap();
        assert!(v[0].overlaps(&(Interval::point(0.5))));
        let r = residual_enclosure(&k, &m, &x, 0.5858, Interval::ONE).unwrap();
        assert!(e.value.subset_of(&r.value));
    }

    #[test]
    fn vector_ball_conversion() {
        let k = diag(&[2.0, 5.0]);
        let m = diag(&[4.0, 4.0]);
        let e = residual_enclosure(&k, &m, &[0.5, 0.0], 0.5, Interval::point(0.25)).unwrap();
        let e = e.with_vector_ball(0.1, Interval::point(0.25));
        assert!(e.simple);
        assert!((e.vector_radius.unwrap() - 0.05).abs() < 1e-15);
        let (c, r) = e.vector_ball().unwrap();
        assert_eq!(c, vec![0.5, 0.0]);
        assert!(r >= 0.05);
    }
}
