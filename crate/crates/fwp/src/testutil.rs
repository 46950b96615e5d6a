//! Assertions shared across the unit-test modules.

use crate::polytope::VPolytope;

/// Set equality of vertex sets up to `tol` in the infinity norm.
pub(crate) fn assert_same_vertices(a: &VPolytope, b: &VPolytope, tol: f64) {
    assert_eq!(
        a.num_vertices(),
        b.num_vertices(),
        "vertex counts differ: {} vs {}",
        a.num_vertices(),
        b.num_vertices()
    );
    let mut used = vec![false; b.num_vertices()];
    for i in 0..a.num_vertices() {
        let v = a.vertex(i);
        let hit = (0..b.num_vertices()).find(|&j| !used[j] && (b.vertex(j) - &v).amax() <= tol);
        match hit {
            Some(j) => used[j] = true,
            None => panic!("vertex {v} has no counterpart within {tol}"),
        }
    }
}

/// Every vertex of `a` lies inside `b` (with tolerance).
pub(crate) fn assert_vertices_contained(a: &VPolytope, b: &VPolytope, tol: f64) {
    for i in 0..a.num_vertices() {
        let v = a.vertex(i);
        assert!(
            b.contains(&v, tol),
            "vertex {v} of the smaller set is not inside the larger one"
        );
    }
}
