//! Randomized soundness checks. Every assertion is a containment that must
//! hold without exception; floating oracles are only trusted where their
//! error is provably or empirically far below the asserted margin.

use ngon_cert::interval::{
    add_down, add_up, div_down, div_up, mul_down, mul_up, sqrt_down, sqrt_up, sub_down, sub_up, Interval,
    SparseIntervalMatrix,
};
use ngon_cert::vlinalg::dense::generalized_sym_eig;
use ngon_cert::vlinalg::{cholesky_spd_check, eigvec_error_bound, residual_enclosure};
use proptest::prelude::*;

const CASES: u32 = 1000;

/// Fixed case count; failures are reported inline rather than persisted.
fn config() -> ProptestConfig {
    ProptestConfig { cases: CASES, failure_persistence: None, ..ProptestConfig::default() }
}

// ---------------------------------------------------------------------------
// Exact comparisons against error-free transformations
// ---------------------------------------------------------------------------

/// `s + e = a + b` exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Is `bound ≤ s + e`, for a pair with `|e| ≤ ulp(s)/2`?
fn below(bound: f64, (s, e): (f64, f64)) -> bool {
    bound < s || (bound == s && e >= 0.0)
}

fn above(bound: f64, (s, e): (f64, f64)) -> bool {
    bound > s || (bound == s && e <= 0.0)
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6..1e6f64,
        -1.0..1.0f64,
        (-300i32..300, -1.0..1.0f64).prop_map(|(e, m)| m * 2f64.powi(e / 2)),
        Just(0.0),
        Just(1.0),
        Just(-3.0),
    ]
}

fn interval() -> impl Strategy<Value = Interval> {
    (finite(), 0.0..1e3f64).prop_map(|(c, w)| Interval::new(c, c + w))
}

fn point_in(x: Interval, t: f64) -> f64 {
    (x.lo + t * (x.hi - x.lo)).clamp(x.lo, x.hi)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn directed_sums_bracket_exact_sum(a in finite(), b in finite()) {
        let exact = two_sum(a, b);
        prop_assert!(below(add_down(a, b), exact));
        prop_assert!(above(add_up(a, b), exact));
        let diff = two_sum(a, -b);
        prop_assert!(below(sub_down(a, b), diff));
        prop_assert!(above(sub_up(a, b), diff));
    }

    #[test]
    fn directed_products_bracket_exact_product(a in -1e6..1e6f64, b in -1e6..1e6f64) {
        let p = a * b;
        // Exact unless the product underflows, which this range avoids
        // except at zero (where both are exact anyway).
        prop_assume!(p == 0.0 || p.abs() > 1e-290);
        let exact = (p, a.mul_add(b, -p));
        prop_assert!(below(mul_down(a, b), exact));
        prop_assert!(above(mul_up(a, b), exact));
    }

    #[test]
    fn directed_quotients_bracket_exact_quotient(a in -1e6..1e6f64, b in prop_oneof![-1e6..-1e-3f64, 1e-3..1e6f64]) {
        let q = a / b;
        // a − q·b is exact; its sign relative to b decides q ≶ a/b.
        let r = (-q).mul_add(b, a);
        let e = if r == 0.0 { 0.0 } else if (r > 0.0) == (b > 0.0) { 1.0 } else { -1.0 };
        prop_assert!(below(div_down(a, b), (q, e * f64::MIN_POSITIVE)));
        prop_assert!(above(div_up(a, b), (q, e * f64::MIN_POSITIVE)));
    }

    #[test]
    fn directed_roots_bracket_exact_root(a in prop_oneof![0.0..1e6f64, 1e-200..1e-100f64]) {
        let s = a.sqrt();
        let r = (-s).mul_add(s, a);
        let e = if r > 0.0 { 1.0 } else if r < 0.0 { -1.0 } else { 0.0 };
        prop_assert!(below(sqrt_down(a), (s, e * f64::MIN_POSITIVE)));
        prop_assert!(above(sqrt_up(a), (s, e * f64::MIN_POSITIVE)));
    }

    #[test]
    fn interval_operations_contain_pointwise_results(
        x in interval(), y in interval(), s in 0.0..=1.0f64, t in 0.0..=1.0f64,
    ) {
        let (a, b) = (point_in(x, s), point_in(y, t));
        let sum = x + y;
        prop_assert!(below(sum.lo, two_sum(a, b)) && above(sum.hi, two_sum(a, b)));
        let diff = x - y;
        prop_assert!(below(diff.lo, two_sum(a, -b)) && above(diff.hi, two_sum(a, -b)));
        let p = a * b;
        if p == 0.0 || p.abs() > 1e-290 {
            let prod = x * y;
            let exact = (p, a.mul_add(b, -p));
            prop_assert!(below(prod.lo, exact) && above(prod.hi, exact), "{} * {} = {} ∉ {}", a, b, p, prod);
        }
        let sq = x.sqr();
        let p = a * a;
        if p == 0.0 || p > 1e-290 {
            let exact = (p, a.mul_add(a, -p));
            prop_assert!(below(sq.lo, exact) && above(sq.hi, exact));
        }
        if !y.contains_zero() && b.abs() > 1e-3 && a.abs() < 1e200 {
            let quot = x / y;
            let q = a / b;
            let r = (-q).mul_add(b, a);
            let e = if r == 0.0 { 0.0 } else if (r > 0.0) == (b > 0.0) { 1.0 } else { -1.0 };
            prop_assert!(below(quot.lo, (q, e * f64::MIN_POSITIVE)) && above(quot.hi, (q, e * f64::MIN_POSITIVE)));
        }
        if x.lo >= 0.0 {
            let root = x.sqrt().unwrap();
            let s = a.sqrt();
            let r = (-s).mul_add(s, a);
            let e = if r > 0.0 { 1.0 } else if r < 0.0 { -1.0 } else { 0.0 };
            prop_assert!(below(root.lo, (s, e * f64::MIN_POSITIVE)) && above(root.hi, (s, e * f64::MIN_POSITIVE)));
        }
        prop_assert!(x.hull(&y).contains(a) && x.hull(&y).contains(b));
        if let Some(z) = x.intersect(&y) {
            prop_assert!(z.subset_of(&x) && z.subset_of(&y));
        }
    }
}

// ---------------------------------------------------------------------------
// Eigenvalue enclosures against dense oracles
// ---------------------------------------------------------------------------

type Dense = Vec<Vec<f64>>;

/// `BᵀB + shift·I` for an integer matrix `B` (exact in f64 at these sizes).
fn gram(b: &[Vec<i32>], shift: i32) -> Dense {
    let n = b[0].len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| b.iter().map(|r| (r[i] * r[j]) as f64).sum::<f64>() + if i == j { shift as f64 } else { 0.0 })
                .collect()
        })
        .collect()
}

fn to_interval(a: &Dense) -> SparseIntervalMatrix {
    let mut t = Vec::new();
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v != 0.0 {
                t.push((i, j, Interval::point(v)));
            }
        }
    }
    SparseIntervalMatrix::from_triplets(a.len(), &t)
}

fn int_matrix(rows: std::ops::Range<usize>, cols: usize) -> impl Strategy<Value = Vec<Vec<i32>>> {
    rows.prop_flat_map(move |r| prop::collection::vec(prop::collection::vec(-4i32..=4, cols), r))
}

/// A pencil `(K, M)` with `M = BᵀB + I`, so `λ_min(M) ≥ 1`.
fn pencil() -> impl Strategy<Value = (Dense, Dense, usize)> {
    (3usize..8)
        .prop_flat_map(|n| (int_matrix(n..n + 3, n), int_matrix(1..3, n), Just(n)))
        .prop_map(|(bk, bm, n)| (gram(&bk, 1), gram(&bm, 1), n))
}

fn m_norm(m: &Dense, x: &[f64]) -> f64 {
    let mx: Vec<f64> = m.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect();
    mx.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().sqrt()
}

/// Floating oracle error allowance, relative to the spectrum scale.
const ORACLE_SLACK: f64 = 1e-9;

proptest! {
    #![proptest_config(config())]

    #[test]
    fn residual_enclosures_contain_an_eigenvalue(
        (k, m, n) in pencil(),
        pick in 0usize..8,
        noise in prop::collection::vec(-1.0..1.0f64, 8),
        size in prop_oneof![Just(0.0), 1e-8..1e-1f64],
        dl in -1e-2..1e-2f64,
    ) {
        let (vals, vecs) = generalized_sym_eig(&k, &m).unwrap();
        let i = pick % n;
        let x: Vec<f64> = (0..n).map(|r| vecs[i][r] + size * noise[r]).collect();
        let lam = vals[i] + dl * vals[i];
        let enc = residual_enclosure(&to_interval(&k), &to_interval(&m), &x, lam, Interval::ONE).unwrap();
        let scale = vals[n - 1];
        let hit = vals.iter().any(|&v| enc.value.inflate(0.0, ORACLE_SLACK * scale).contains(v));
        prop_assert!(hit, "{} misses {:?}", enc.value, vals);
    }

    #[test]
    fn eigenvector_balls_contain_the_eigenvector(
        (k, m, n) in pencil(),
        pick in 0usize..8,
        noise in prop::collection::vec(-1.0..1.0f64, 8),
        log_size in -12.0..-2.0f64,
        scale_x in 0.9..1.1f64,
    ) {
        let (vals, vecs) = generalized_sym_eig(&k, &m).unwrap();
        let i = pick % n;
        let top = vals[n - 1];
        // Distance to the rest of the spectrum; the oracle must separate it.
        let sep = vals.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| (v - vals[i]).abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(sep > 1e-6 * top);
        let star = vecs[i].clone();
        let norm = m_norm(&m, &star);
        let star: Vec<f64> = star.iter().map(|v| v / norm).collect();
        let size = 10f64.powf(log_size) * star.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let x: Vec<f64> = (0..n).map(|r| scale_x * star[r] + size * noise[r]).collect();
        let enc = residual_enclosure(&to_interval(&k), &to_interval(&m), &x, vals[i], Interval::ONE).unwrap();
        // The gap must cover every other eigenvalue; shrink it by the oracle
        // uncertainty so the hypothesis is certainly satisfied.
        let gap = sep - ORACLE_SLACK * top;
        let Ok(bound) = eigvec_error_bound(&enc, gap) else { return Ok(()); };
        let d = |s: f64| {
            let e: Vec<f64> = x.iter().zip(&star).map(|(a, b)| a - s * b).collect();
            m_norm(&m, &e)
        };
        let dist = d(1.0).min(d(-1.0));
        prop_assert!(dist <= bound * (1.0 + 1e-9) + 1e-9, "{} > {}", dist, bound);
    }

    #[test]
    fn singular_gram_matrices_are_never_certified(b in int_matrix(1..6, 6), n in 3usize..7) {
        // Rank of BᵀB is at most rows(B) < n when rows < n; for rows ≥ n a
        // duplicated column forces singularity.
        let mut b: Vec<Vec<i32>> = b.iter().map(|r| r[..n].to_vec()).collect();
        if b.len() >= n {
            for r in b.iter_mut() {
                r[n - 1] = r[0];
            }
        }
        let a = gram(&b, 0);
        prop_assert!(!cholesky_spd_check(&to_interval(&a)));
    }

    #[test]
    fn indefinite_matrices_are_never_certified((k, _m, n) in pencil(), shift_at in 0usize..8, frac in 0.0..1.0f64) {
        // Shift into the spectrum so at least one eigenvalue is ≤ 0.
        let (vals, _) = generalized_sym_eig(&k, &identity(n)).unwrap();
        let j = shift_at % n;
        let s = vals[j] + frac * (vals[n - 1] - vals[j]) + 1e-6 * vals[n - 1];
        let a: Dense = (0..n).map(|r| (0..n).map(|c| k[r][c] - if r == c { s } else { 0.0 }).collect()).collect();
        prop_assert!(!cholesky_spd_check(&to_interval(&a)));
    }

    #[test]
    fn well_conditioned_gram_matrices_are_certified(b in int_matrix(1..4, 5)) {
        let a = gram(&b, 1);
        prop_assert!(cholesky_spd_check(&to_interval(&a)));
    }
}

fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

/// Every property above, for the acceptance runner.
#[allow(dead_code)]
pub fn suite() -> Vec<(&'static str, fn())> {
    vec![
        ("directed sums", directed_sums_bracket_exact_sum),
        ("directed products", directed_products_bracket_exact_product),
        ("directed quotients", directed_quotients_bracket_exact_quotient),
        ("directed roots", directed_roots_bracket_exact_root),
        ("interval containment", interval_operations_contain_pointwise_results),
        ("residual enclosures", residual_enclosures_contain_an_eigenvalue),
        ("eigenvector balls", eigenvector_balls_contain_the_eigenvector),
        ("singular Gram matrices", singular_gram_matrices_are_never_certified),
        ("indefinite matrices", indefinite_matrices_are_never_certified),
        ("well-conditioned Gram matrices", well_conditioned_gram_matrices_are_certified),
    ]
}
