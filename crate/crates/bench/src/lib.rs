//! Fixture builders shared by the pipeline benchmarks.

use hd_core::disk::Arc;
use hd_core::measure::BoundarySet;

/// The whole boundary circle as a one-arc set.
pub fn full_circle() -> BoundarySet {
    BoundarySet::arc_union(vec![Arc::new(0.0, std::f64::consts::TAU).expect("full circle arc")])
}

/// Middle-thirds set over a base arc of length 2, realized at the given depth.
pub fn cantor_set(depth: usize) -> BoundarySet {
    let base = Arc::new(0.0, 2.0).expect("base arc");
    BoundarySet::cantor(base, 1.0 / 3.0, depth).expect("cantor set")
}
