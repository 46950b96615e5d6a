//! Vertex enumeration of `{x : Ax <= b, Cx = d}` and facet enumeration of a
//! vertex set.
//!
//! Vertex enumeration reduces the equalities away, runs the double
//! description method on the homogenization of the inequality system, and
//! lifts the resulting rays back: homogenization coordinate above the ray
//! threshold means a vertex, at zero a recession direction. Facet enumeration
//! goes through polar duality inside the affine hull of the vertex set, so
//! degenerate inputs come back with explicit equality rows.

use nalgebra::{DMatrix, DVector};

use super::hull::{affine_hull, orthonormal_complement};
use super::{columns_to_matrix, dd, lp, reduce_equalities, HPolytope, Reduction, VPolytope};
use crate::{FwpError, Tolerances};

/// Vertex enumeration output: the polytope plus degeneracy notes.
#[derive(Debug, Clone)]
pub struct VertexEnumeration {
    pub polytope: VPolytope,
    pub warnings: Vec<String>,
}

impl VertexEnumeration {
    fn empty(n: usize) -> Self {
        VertexEnumeration {
            polytope: VPolytope::empty(n),
            warnings: Vec::new(),
        }
    }
}

/// Enumerate all vertices (and recession rays) of an H-polytope.
pub fn vertex_enum(p: &HPolytope, tol: &Tolerances) -> Result<VertexEnumeration, FwpError> {
    let n = p.dim();
    let (reduced, lift) = match reduce_equalities(p, tol)? {
        Reduction::Infeasible => return Ok(VertexEnumeration::empty(n)),
        Reduction::Feasible { reduced, lift } => (reduced, lift),
    };

    let k = reduced.dim();
    if k == 0 {
        // Fully determined by the equalities; the point either satisfies the
        // inequalities or the set is empty.
        let feasible = reduced
            .b()
            .iter()
            .all(|&bi| bi >= -tol.feasibility * (1.0 + bi.abs()));
        if feasible {
            return Ok(VertexEnumeration {
                polytope: VPolytope::from_vertices(columns_to_matrix(n, &[lift.offset])),
                warnings: Vec::new(),
            });
        }
        return Ok(VertexEnumeration::empty(n));
    }

    let mut a = reduced.a().clone();
    let mut b = reduced.b().clone();
    if a.nrows() > 4 * k {
        let (a2, b2) = remove_redundant_rows(&a, &b, tol);
        a = a2;
        b = b2;
    }

    let mut warnings = Vec::new();

    // A rank-deficient inequality block means the polyhedron contains lines;
    // enumerate in the quotient space and report the line directions as
    // paired rays.
    let mut line_dirs: Vec<DVector<f64>> = Vec::new();
    let (a_work, b_work, quotient): (DMatrix<f64>, DVector<f64>, Option<DMatrix<f64>>) = {
        let rank_basis = row_space_basis(&a, tol);
        if rank_basis.ncols() < k {
            let lines = orthonormal_complement(&rank_basis);
            for j in 0..lines.ncols() {
                line_dirs.push(lines.column(j).into_owned());
            }
            warnings.push(format!(
                "inequality block is rank deficient: the set contains {} line direction(s); \
                 reported vertices are representatives",
                lines.ncols()
            ));
            let proj = rank_basis;
            (&a * &proj, b.clone(), Some(proj))
        } else {
            (a, b, None)
        }
    };

    let kk = a_work.ncols();
    let rows = a_work.nrows();
    // Homogenize: rays of {(y, t) : A y - b t <= 0, t >= 0}.
    let mut cone = DMatrix::zeros(rows + 1, kk + 1);
    cone.view_mut((0, 0), (rows, kk)).copy_from(&a_work);
    for i in 0..rows {
        cone[(i, kk)] = -b_work[i];
    }
    cone[(rows, kk)] = -1.0;

    let rays = dd::extreme_rays(&cone, tol)?;

    let mut vertices: Vec<DVector<f64>> = Vec::new();
    let mut recession: Vec<DVector<f64>> = Vec::new();
    for ray in rays {
        let t = ray[kk];
        let y = ray.rows(0, kk).into_owned();
        if t > tol.ray {
            vertices.push(y / t);
        } else {
            let norm = y.norm();
            if norm > tol.ray {
                recession.push(y / norm);
            }
        }
    }

    // Undo the quotient projection, then lift through the equality map.
    let unquotient = |y: DVector<f64>| -> DVector<f64> {
        match &quotient {
            Some(proj) => proj * y,
            None => y,
        }
    };
    let vertices: Vec<DVector<f64>> = vertices
        .into_iter()
        .map(|y| lift.apply(&unquotient(y)))
        .collect();
    let mut ray_dirs: Vec<DVector<f64>> = recession
        .into_iter()
        .map(|y| (&lift.linear * unquotient(y)).normalize())
        .collect();
    for line in line_dirs {
        let lifted = &lift.linear * &line;
        let norm = lifted.norm();
        if norm > 0.0 {
            ray_dirs.push(&lifted / norm);
            ray_dirs.push(-lifted / norm);
        }
    }

    if vertices.is_empty() && !ray_dirs.is_empty() {
        warnings.push("no vertices found although recession directions exist".into());
    }
    let polytope = VPolytope::new(
        columns_to_matrix(n, &vertices),
        columns_to_matrix(n, &ray_dirs),
    )?
    .dedup(tol);
    Ok(VertexEnumeration { polytope, warnings })
}

/// Facet enumeration: the H-description of the convex hull of a vertex set,
/// with equality rows capturing the affine hull when the set is degenerate.
pub fn facet_enum(v: &VPolytope, tol: &Tolerances) -> Result<HPolytope, FwpError> {
    if v.is_empty() {
        return Err(FwpError::InvalidInput(
            "facet enumeration of an empty vertex set".into(),
        ));
    }
    if !v.is_bounded() {
        return Err(FwpError::InvalidInput(
            "facet enumeration requires a bounded vertex set (no rays)".into(),
        ));
    }
    let n = v.dim();
    let v = v.extreme_points(tol);
    let hull = affine_hull(&v, tol.hull)?;
    let c_eq = hull.null_basis.transpose();
    let d_eq = &c_eq * &hull.base_point;
    let k = hull.dim();

    if k == 0 {
        return HPolytope::new(DMatrix::zeros(0, n), DVector::zeros(0), c_eq, d_eq);
    }

    // Work in hull coordinates.
    let m = v.num_vertices();
    let mut y = DMatrix::zeros(k, m);
    for j in 0..m {
        let local = hull.span_basis.transpose() * (v.vertex(j) - &hull.base_point);
        y.column_mut(j).copy_from(&local);
    }

    let (a_red, b_red): (DMatrix<f64>, DVector<f64>) = if k == 1 {
        let lo = y.row(0).min();
        let hi = y.row(0).max();
        (
            DMatrix::from_row_slice(2, 1, &[1.0, -1.0]),
            DVector::from_vec(vec![hi, -lo]),
        )
    } else {
        // Polar dual around the centroid: dual vertices are primal facets.
        let mut centroid = DVector::zeros(k);
        for j in 0..m {
            centroid += y.column(j);
        }
        centroid /= m as f64;
        let mut dual_a = DMatrix::zeros(m, k);
        for j in 0..m {
            dual_a
                .row_mut(j)
                .copy_from(&(y.column(j) - &centroid).transpose());
        }
        let dual = HPolytope::from_inequalities(dual_a, DVector::from_element(m, 1.0))?;
        let dual_vertices = enumerate_irredundant(&dual, tol)?;
        if !dual_vertices.polytope.is_bounded() {
            return Err(FwpError::Numerical(
                "facet enumeration hit an unbounded polar dual; the vertex set is nearly \
                 degenerate relative to the hull tolerance"
                    .into(),
            ));
        }
        let du = dual_vertices.polytope;
        let mut a_red = DMatrix::zeros(du.num_vertices(), k);
        let mut b_red = DVector::zeros(du.num_vertices());
        for l in 0..du.num_vertices() {
            let u = du.vertex(l);
            let norm = u.norm();
            a_red.row_mut(l).copy_from(&(u.transpose() / norm));
            b_red[l] = (1.0 + u.dot(&centroid)) / norm;
        }
        refine_facets(&mut a_red, &mut b_red, &y, tol);
        (a_red, b_red)
    };

    // Back to ambient coordinates: a·y <= b with y = S^T (x - base).
    let mut a_full = &a_red * hull.span_basis.transpose();
    let mut b_full = b_red + &a_full * &hull.base_point;
    // Unit-normalize rows and order them for reproducible output.
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(a_full.nrows());
    for i in 0..a_full.nrows() {
        let norm = a_full.row(i).norm();
        if norm > 0.0 {
            for j in 0..n {
                a_full[(i, j)] /= norm;
            }
            b_full[i] /= norm;
        }
        rows.push((a_full.row(i).iter().copied().collect(), b_full[i]));
    }
    rows.sort_by(|x, y| {
        x.0.iter()
            .zip(&y.0)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| *o != std::cmp::Ordering::Equal)
            .unwrap_or_else(|| x.1.total_cmp(&y.1))
    });
    let mut a_sorted = DMatrix::zeros(rows.len(), n);
    let mut b_sorted = DVector::zeros(rows.len());
    for (i, (row, offset)) in rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            a_sorted[(i, j)] = x;
        }
        b_sorted[i] = *offset;
    }
    HPolytope::new(a_sorted, b_sorted, c_eq, d_eq)
}

/// Vertex enumeration for systems already known to be irredundant (used by
/// the polar-dual path, where the rows are extreme points by construction).
fn enumerate_irredundant(
    p: &HPolytope,
    tol: &Tolerances,
) -> Result<VertexEnumeration, FwpError> {
    let k = p.dim();
    let rows = p.num_inequalities();
    let mut cone = DMatrix::zeros(rows + 1, k + 1);
    cone.view_mut((0, 0), (rows, k)).copy_from(p.a());
    for i in 0..rows {
        cone[(i, k)] = -p.b()[i];
    }
    cone[(rows, k)] = -1.0;
    let rays = dd::extreme_rays(&cone, tol)?;
    let mut vertices = Vec::new();
    let mut recession = Vec::new();
    for ray in rays {
        let t = ray[k];
        let y = ray.rows(0, k).into_owned();
        if t > tol.ray {
            vertices.push(y / t);
        } else if y.norm() > tol.ray {
            recession.push(y.normalize());
        }
    }
    Ok(VertexEnumeration {
        polytope: VPolytope::new(
            columns_to_matrix(k, &vertices),
            columns_to_matrix(k, &recession),
        )?
        .dedup(tol),
        warnings: Vec::new(),
    })
}

/// Snap dual-enumerated facets onto the vertex data: the hyperplane through
/// a facet's incident vertices is far more accurate than the normal carried
/// through a long double-description chain.
fn refine_facets(a: &mut DMatrix<f64>, b: &mut DVector<f64>, y: &DMatrix<f64>, tol: &Tolerances) {
    let k = y.nrows();
    let m = y.ncols();
    let scale = 1.0 + y.amax();
    let collect_eps = 1e-6 * scale;
    for row in 0..a.nrows() {
        let normal = a.row(row).transpose();
        let incident: Vec<usize> = (0..m)
            .filter(|&j| (normal.dot(&y.column(j).into_owned()) - b[row]).abs() <= collect_eps)
            .collect();
        if incident.len() < k {
            continue;
        }
        let mut centroid = DVector::zeros(k);
        for &j in &incident {
            centroid += y.column(j);
        }
        centroid /= incident.len() as f64;
        let mut centered = DMatrix::zeros(k, incident.len());
        for (c, &j) in incident.iter().enumerate() {
            centered.column_mut(c).copy_from(&(y.column(j) - &centroid));
        }
        let svd = crate::linalg::thin_svd(&centered);
        let mut fitted = svd.u.column(k - 1).into_owned();
        if fitted.norm() == 0.0 {
            continue;
        }
        if fitted.dot(&normal) < 0.0 {
            fitted = -fitted;
        }
        let offset = fitted.dot(&centroid);
        // Accept the refit only if it still supports the whole vertex set.
        let worst = (0..m)
            .map(|j| fitted.dot(&y.column(j).into_owned()) - offset)
            .fold(f64::NEG_INFINITY, f64::max);
        if worst <= tol.feasibility * scale {
            a.row_mut(row).copy_from(&fitted.transpose());
            b[row] = offset;
        }
    }
}

/// Orthonormal basis of the row space of `a`.
fn row_space_basis(a: &DMatrix<f64>, tol: &Tolerances) -> DMatrix<f64> {
    let k = a.ncols();
    if a.nrows() == 0 {
        return DMatrix::zeros(k, 0);
    }
    let svd = crate::linalg::thin_svd(a);
    let rank = svd.rank(tol.rank);
    svd.v.columns(0, rank).into_owned()
}

/// Drop inequality rows implied by the others, one LP per row.
fn remove_redundant_rows(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    tol: &Tolerances,
) -> (DMatrix<f64>, DVector<f64>) {
    let m = a.nrows();
    let n = a.ncols();
    let mut keep = vec![true; m];
    for i in 0..m {
        let others: Vec<usize> = (0..m).filter(|&r| keep[r] && r != i).collect();
        if others.is_empty() {
            continue;
        }
        let mut a_sub = DMatrix::zeros(others.len() + 1, n);
        let mut b_sub = DVector::zeros(others.len() + 1);
        for (r, &row) in others.iter().enumerate() {
            a_sub.row_mut(r).copy_from(&a.row(row));
            b_sub[r] = b[row];
        }
        // Cap the objective so the test LP stays bounded.
        a_sub.row_mut(others.len()).copy_from(&a.row(i));
        b_sub[others.len()] = b[i] + 1.0 + b[i].abs();
        let c = a.row(i).transpose();
        if let lp::LpOutcome::Optimal { value, .. } = lp::maximize(&c, &a_sub, &b_sub) {
            if value <= b[i] + tol.feasibility * (1.0 + b[i].abs()) {
                keep[i] = false;
            }
        }
    }
    let kept: Vec<usize> = (0..m).filter(|&i| keep[i]).collect();
    let mut a_out = DMatrix::zeros(kept.len(), n);
    let mut b_out = DVector::zeros(kept.len());
    for (r, &i) in kept.iter().enumerate() {
        a_out.row_mut(r).copy_from(&a.row(i));
        b_out[r] = b[i];
    }
    (a_out, b_out)
}
