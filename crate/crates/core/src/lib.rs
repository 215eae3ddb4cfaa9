//! Computer-assisted certification that the regular pentagon and hexagon are
//! local minimizers of the first Dirichlet–Laplace eigenvalue at fixed area.
//!
//! The pipeline is built from small layers:
//!
//! * [`interval`] — outward-rounded interval arithmetic and rigorous constants;
//! * [`mesh`] — the dihedrally symmetric triangulation of the regular n-gon;
//! * [`assembly`] — closed-form interval stiffness, mass and partial matrices;
//! * [`vlinalg`] — floating solvers and their rigorous a-posteriori enclosures;
//! * [`apriori`] — explicit finite element error bounds;
//! * [`certify`] — the end-to-end Hessian eigenvalue certification;
//! * [`morley`] — certified P1 interpolation constants via the Morley element.

// NaN-rejecting guards are written as `!(x > 0.0)` on purpose, and index
// loops mirror the matrix formulas they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod apriori;
pub mod assembly;
pub mod certify;
pub mod interval;
pub mod mesh;
pub mod morley;
pub mod vlinalg;

pub use interval::{Interval, IntervalVector, SparseIntervalMatrix};
