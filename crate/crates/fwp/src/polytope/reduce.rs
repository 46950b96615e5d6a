//! Projection of an equality-constrained system onto the affine subspace
//! `{x : Cx = d}`, so the enumeration machinery only ever sees inequality
//! systems in as few variables as possible.

use nalgebra::{DMatrix, DVector};

use super::hull::orthonormal_complement;
use super::HPolytope;
use crate::{FwpError, Tolerances};

/// Affine parametrization `x = linear * y + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub linear: DMatrix<f64>,
    pub offset: DVector<f64>,
}

impl AffineMap {
    pub fn identity(n: usize) -> Self {
        AffineMap {
            linear: DMatrix::identity(n, n),
            offset: DVector::zeros(n),
        }
    }

    pub fn apply(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.linear * y + &self.offset
    }
}

/// Outcome of [`reduce_equalities`].
#[derive(Debug, Clone)]
pub enum Reduction {
    /// `reduced` has zero equality rows and `lift` parametrizes the original
    /// equality subspace: `P = { lift(y) : y in reduced }`.
    Feasible { reduced: HPolytope, lift: AffineMap },
    /// `Cx = d` has no solution; the polytope is empty.
    Infeasible,
}

/// Eliminate the equality block of `p`.
///
/// The subspace `{x : Cx = d}` is parametrized by `x = x0 + N y` with `x0`
/// the minimum-norm solution and `N` an orthonormal null-space basis of `C`;
/// the inequalities become `A N y <= b - A x0`. Consistency of the equality
/// system is decided against the scaled residual of the least-squares
/// solution.
pub fn reduce_equalities(p: &HPolytope, tol: &Tolerances) -> Result<Reduction, FwpError> {
    let n = p.dim();
    if p.num_equalities() == 0 {
        return Ok(Reduction::Feasible {
            reduced: p.clone(),
            lift: AffineMap::identity(n),
        });
    }

    let c = p.c().clone();
    let d = p.d().clone();
    let svd = crate::linalg::thin_svd(&c);
    let rank = svd.rank(tol.rank);
    let x0 = svd.solve_min_norm(&d, tol.rank);

    let residual = (&c * &x0 - &d).norm();
    if residual > tol.feasibility * (1.0 + d.norm()) {
        return Ok(Reduction::Infeasible);
    }

    // Row space of C spans the constrained directions; the null space is its
    // orthogonal complement.
    let row_space = svd.v.columns(0, rank).into_owned();
    let null_basis = orthonormal_complement(&row_space);

    let a_red = p.a() * &null_basis;
    let b_red = p.b() - p.a() * &x0;
    let reduced = HPolytope::from_inequalities(a_red, b_red)?;
    Ok(Reduction::Feasible {
        reduced,
        lift: AffineMap {
            linear: null_basis,
            offset: x0,
        },
    })
}
