//! Affine-hull analysis of vertex sets. The null basis of a wrench polytope's
//! affine hull is exactly the set of directions in which the system has no
//! control authority, so this doubles as the non-actuation analysis.

use nalgebra::{DMatrix, DVector};

use super::VPolytope;
use crate::FwpError;

/// Affine hull `{ base_point + span_basis * y }` of a vertex set, together
/// with the orthonormal basis of the directions the set does not reach.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineHull {
    pub base_point: DVector<f64>,
    /// Orthonormal columns spanning the hull directions.
    pub span_basis: DMatrix<f64>,
    /// Orthonormal columns spanning the orthogonal complement.
    pub null_basis: DMatrix<f64>,
}

impl AffineHull {
    /// Affine dimension of the hull.
    pub fn dim(&self) -> usize {
        self.span_basis.ncols()
    }
}

/// Compute the affine hull of a non-empty vertex set.
///
/// The base point is the vertex mean; span directions are the singular
/// vectors of the centered vertex matrix whose singular value exceeds
/// `tol * sigma_max`. Recession rays participate like centered vertices: a
/// direction the set escapes along belongs to the hull.
pub fn affine_hull(v: &VPolytope, tol: f64) -> Result<AffineHull, FwpError> {
    if v.is_empty() {
        return Err(FwpError::InvalidInput(
            "affine hull of an empty vertex set".into(),
        ));
    }
    let n = v.dim();
    let base = v.centroid().expect("non-empty");
    let m = v.num_vertices() + v.num_rays();
    let mut centered = DMatrix::zeros(n, m);
    for j in 0..v.num_vertices() {
        centered.column_mut(j).copy_from(&(v.vertex(j) - &base));
    }
    for j in 0..v.num_rays() {
        centered
            .column_mut(v.num_vertices() + j)
            .copy_from(&v.rays().column(j));
    }

    let svd = crate::linalg::thin_svd(&centered);
    let sigma_max = svd.sigma.max();
    let mut span_cols = Vec::new();
    if sigma_max > 0.0 {
        for k in 0..svd.sigma.len() {
            if svd.sigma[k] > tol * sigma_max {
                span_cols.push(svd.u.column(k).into_owned());
            }
        }
    }
    let span_basis = super::columns_to_matrix(n, &span_cols);
    let null_basis = orthonormal_complement(&span_basis);
    Ok(AffineHull {
        base_point: base,
        span_basis,
        null_basis,
    })
}

/// Orthonormal basis of the orthogonal complement of `basis` (which must
/// itself have orthonormal columns). Deterministic: candidates are the
/// identity axes, picked greedily by largest projection residual.
pub fn orthonormal_complement(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let n = basis.nrows();
    let r = basis.ncols();
    let want = n - r;
    let mut accepted: Vec<DVector<f64>> = Vec::with_capacity(want);

    let project = |x: &DVector<f64>, accepted: &[DVector<f64>]| -> DVector<f64> {
        let mut v = x.clone();
        // Two rounds of classical Gram-Schmidt keep the result orthogonal.
        for _ in 0..2 {
            for k in 0..r {
                let col = basis.column(k);
                let coeff = col.dot(&v);
                v -= coeff * col.into_owned();
            }
            for a in accepted {
                let coeff = a.dot(&v);
                v -= coeff * a;
            }
        }
        v
    };

    while accepted.len() < want {
        let mut best: Option<(f64, DVector<f64>)> = None;
        for i in 0..n {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            let v = project(&e, &accepted);
            let norm = v.norm();
            if best.as_ref().map_or(true, |(bn, _)| norm > *bn) {
                best = Some((norm, v));
            }
        }
        let (norm, v) = best.expect("n > 0");
        accepted.push(v / norm);
    }
    super::columns_to_matrix(n, &accepted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::dmatrix;

    #[test]
    fn single_vertex_has_full_null_basis() {
        let v = VPolytope::from_vertices(dmatrix![1.0; 2.0; 3.0]);
        let hull = affine_hull(&v, 1e-7).unwrap();
        assert_eq!(hull.dim(), 0);
        assert_eq!(hull.null_basis.ncols(), 3);
        // The null basis is orthonormal.
        let g = hull.null_basis.transpose() * &hull.null_basis;
        assert_relative_eq!(g, DMatrix::identity(3, 3), epsilon = 1e-12);
    }

    #[test]
    fn planar_triangle_embedded_in_3d() {
        let v = VPolytope::from_vertices(dmatrix![
            0.0, 1.0, 0.0;
            0.0, 0.0, 1.0;
            1.0, 1.0, 1.0
        ]);
        let hull = affine_hull(&v, 1e-7).unwrap();
        assert_eq!(hull.dim(), 2);
        assert_eq!(hull.null_basis.ncols(), 1);
        let normal = hull.null_basis.column(0);
        assert_relative_eq!(normal[0].abs(), 0.0, epsilon = 1e-9);
        assert_relative_eq!(normal[1].abs(), 0.0, epsilon = 1e-9);
        assert_relative_eq!(normal[2].abs(), 1.0, epsilon = 1e-9);
        // Every vertex sits on the hull within tolerance.
        for j in 0..v.num_vertices() {
            let offset = hull.null_basis.transpose() * (v.vertex(j) - &hull.base_point);
            assert!(offset.norm() <= 1e-7);
        }
    }

    #[test]
    fn rays_extend_the_hull() {
        let v = VPolytope::new(dmatrix![0.0; 0.0], dmatrix![0.0; 1.0]).unwrap();
        let hull = affine_hull(&v, 1e-7).unwrap();
        assert_eq!(hull.dim(), 1);
        assert_relative_eq!(hull.span_basis.column(0)[1].abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn complement_of_nothing_is_identity() {
        let basis = DMatrix::zeros(4, 0);
        let c = orthonormal_complement(&basis);
        assert_eq!(c.ncols(), 4);
        let g = c.transpose() * &c;
        assert_relative_eq!(g, DMatrix::identity(4, 4), epsilon = 1e-12);
    }
}
