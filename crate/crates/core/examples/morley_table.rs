//! Certified interpolation-constant bounds for the slice triangles of the
//! regular 5- to 10-gons.
//!
//! `cargo run --release --example morley_table -- 32`

use ngon_cert::morley::{certify_interp_constant, slice_vertex};

fn main() {
    let m: usize = std::env::args().nth(1).map_or(32, |a| a.parse().expect("integer mesh size"));
    for n in 5..=10 {
        let (a, b) = slice_vertex(n).expect("slice vertex");
        let t = std::time::Instant::now();
        match certify_interp_constant(a, b, m, 1e-6) {
            Ok(r) => println!(
                "n={n} bound {:.6} rho {:.6} dof {} ({:.1}s)",
                r.bound.hi,
                r.rho_approx,
                r.dof,
                t.elapsed().as_secs_f64()
            ),
            Err(e) => println!("n={n} error {e}"),
        }
    }
}
