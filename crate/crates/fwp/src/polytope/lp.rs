//! Dense two-phase simplex, sized for the small systems this crate builds
//! (tens of rows, tens of variables). Bland's rule throughout, so the
//! iteration always terminates. This is deliberately independent of the
//! double-description machinery: support values computed here act as an
//! oracle against enumerated vertices, not a consumer of them.

use nalgebra::{DMatrix, DVector};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum LpOutcome {
    /// Optimal value and an optimizer.
    Optimal { value: f64, point: DVector<f64> },
    Unbounded,
    Infeasible,
}

/// Maximize `c·x` subject to `a x <= b` with `x` free.
///
/// Free variables are split into positive parts, slacks close the rows, and
/// the standard-form core does the rest.
pub fn maximize(c: &DVector<f64>, a: &DMatrix<f64>, b: &DVector<f64>) -> LpOutcome {
    let n = c.len();
    let m = a.nrows();
    assert_eq!(a.ncols(), n, "lp: objective/constraint dimension mismatch");
    assert_eq!(b.len(), m, "lp: row count mismatch");

    if m == 0 {
        // No constraints: bounded only for a zero objective.
        if c.amax() <= COST_TOL {
            return LpOutcome::Optimal {
                value: 0.0,
                point: DVector::zeros(n),
            };
        }
        return LpOutcome::Unbounded;
    }

    // Standard form: z = (x+, x-, s), A_std z = b, z >= 0, minimize -c·x.
    let total = 2 * n + m;
    let mut a_std = DMatrix::zeros(m, total);
    for i in 0..m {
        for j in 0..n {
            a_std[(i, j)] = a[(i, j)];
            a_std[(i, n + j)] = -a[(i, j)];
        }
        a_std[(i, 2 * n + i)] = 1.0;
    }
    let mut cost = DVector::zeros(total);
    for j in 0..n {
        cost[j] = -c[j];
        cost[n + j] = c[j];
    }

    match solve_standard(&mut a_std, &mut b.clone(), &cost, 1e-7) {
        StandardOutcome::Optimal { value, solution } => {
            let mut x = DVector::zeros(n);
            for j in 0..n {
                x[j] = solution[j] - solution[n + j];
            }
            LpOutcome::Optimal { value: -value, point: x }
        }
        StandardOutcome::Unbounded => LpOutcome::Unbounded,
        StandardOutcome::Infeasible => LpOutcome::Infeasible,
    }
}

/// Find `z >= 0` with `a z = b` (row-normalized residual below `feas_tol`),
/// or report infeasibility. Pure phase-1.
pub fn feasible_point_eq_nonneg(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    feas_tol: f64,
) -> Option<DVector<f64>> {
    let mut a = a.clone();
    let mut b = b.clone();
    let cost = DVector::zeros(a.ncols());
    match solve_standard(&mut a, &mut b, &cost, feas_tol) {
        StandardOutcome::Optimal { solution, .. } => Some(solution),
        _ => None,
    }
}

enum StandardOutcome {
    Optimal { value: f64, solution: DVector<f64> },
    Unbounded,
    Infeasible,
}

/// Minimize `cost·z` subject to `a z = b`, `z >= 0`.
fn solve_standard(
    a: &mut DMatrix<f64>,
    b: &mut DVector<f64>,
    cost: &DVector<f64>,
    feas_tol: f64,
) -> StandardOutcome {
    let m = a.nrows();
    let n = a.ncols();

    // Normalize rows so the phase-1 infeasibility test has a uniform scale.
    for i in 0..m {
        let norm = a.row(i).norm().max(b[i].abs());
        if norm > 0.0 {
            for j in 0..n {
                a[(i, j)] /= norm;
            }
            b[i] /= norm;
        }
        if b[i] < 0.0 {
            for j in 0..n {
                a[(i, j)] = -a[(i, j)];
            }
            b[i] = -b[i];
        }
    }

    // Phase 1 tableau with one artificial per row.
    let width = n + m + 1;
    let mut t = DMatrix::zeros(m + 1, width);
    for i in 0..m {
        for j in 0..n {
            t[(i, j)] = a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, width - 1)] = b[i];
    }
    // Phase-1 objective: sum of artificials, expressed in reduced form.
    for j in 0..n {
        let col_sum: f64 = (0..m).map(|i| t[(i, j)]).sum();
        t[(m, j)] = -col_sum;
    }
    t[(m, width - 1)] = -b.iter().sum::<f64>();

    let mut basis: Vec<usize> = (n..n + m).collect();
    if !pivot_loop(&mut t, &mut basis, n + m) {
        // Phase 1 of a sum-of-artificials problem is never unbounded.
        return StandardOutcome::Infeasible;
    }
    let phase1 = -t[(m, width - 1)];
    if phase1 > feas_tol {
        return StandardOutcome::Infeasible;
    }

    // Drive leftover artificials out of the basis where possible; rows whose
    // artificial cannot leave are redundant and get neutralized.
    for i in 0..m {
        if basis[i] >= n {
            let mut entered = false;
            for j in 0..n {
                if t[(i, j)].abs() > 1e-9 {
                    pivot(&mut t, &mut basis, i, j);
                    entered = true;
                    break;
                }
            }
            if !entered {
                for j in 0..width {
                    t[(i, j)] = 0.0;
                }
            }
        }
    }

    // Phase 2: swap in the real objective, zero out artificial columns.
    for j in 0..n {
        t[(m, j)] = cost[j];
    }
    for j in n..n + m {
        t[(m, j)] = 0.0;
    }
    t[(m, width - 1)] = 0.0;
    for i in 0..m {
        let bj = basis[i];
        if bj < n && cost[bj] != 0.0 {
            let factor = t[(m, bj)];
            if factor != 0.0 {
                for j in 0..width {
                    t[(m, j)] -= factor * t[(i, j)];
                }
            }
        }
    }

    if !pivot_loop(&mut t, &mut basis, n) {
        return StandardOutcome::Unbounded;
    }

    let mut solution = DVector::zeros(n);
    for i in 0..m {
        if basis[i] < n {
            solution[basis[i]] = t[(i, width - 1)];
        }
    }
    StandardOutcome::Optimal {
        value: -t[(m, width - 1)],
        solution,
    }
}

/// Run simplex pivots until optimal. Returns false on unboundedness.
/// Only columns `< enterable` may enter the basis.
fn pivot_loop(t: &mut DMatrix<f64>, basis: &mut [usize], enterable: usize) -> bool {
    let m = t.nrows() - 1;
    let width = t.ncols();
    loop {
        // Bland: smallest-index column with a negative reduced cost.
        let mut entering = None;
        for j in 0..enterable {
            if t[(m, j)] < -COST_TOL {
                entering = Some(j);
                break;
            }
        }
        let Some(col) = entering else {
            return true;
        };

        // Ratio test; ties broken by smallest basis index (Bland).
        let mut leaving: Option<(usize, f64)> = None;
        for i in 0..m {
            let aij = t[(i, col)];
            if aij > PIVOT_TOL {
                let ratio = t[(i, width - 1)] / aij;
                match leaving {
                    None => leaving = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - PIVOT_TOL
                            || (ratio < lr + PIVOT_TOL && basis[i] < basis[li])
                        {
                            leaving = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((row, _)) = leaving else {
            return false;
        };
        pivot(t, basis, row, col);
    }
}

fn pivot(t: &mut DMatrix<f64>, basis: &mut [usize], row: usize, col: usize) {
    let width = t.ncols();
    let rows = t.nrows();
    let p = t[(row, col)];
    for j in 0..width {
        t[(row, j)] /= p;
    }
    t[(row, col)] = 1.0;
    for i in 0..rows {
        if i != row {
            let factor = t[(i, col)];
            if factor != 0.0 {
                for j in 0..width {
                    t[(i, j)] -= factor * t[(row, j)];
                }
                t[(i, col)] = 0.0;
            }
        }
    }
    if row < basis.len() {
        basis[row] = col;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn box_corner() {
        // max x + 2y on the unit box.
        let a = dmatrix![1.0, 0.0; -1.0, 0.0; 0.0, 1.0; 0.0, -1.0];
        let b = dvector![1.0, 1.0, 1.0, 1.0];
        let c = dvector![1.0, 2.0];
        match maximize(&c, &a, &b) {
            LpOutcome::Optimal { value, point } => {
                assert_relative_eq!(value, 3.0, epsilon = 1e-9);
                assert_relative_eq!(point[0], 1.0, epsilon = 1e-9);
                assert_relative_eq!(point[1], 1.0, epsilon = 1e-9);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_direction() {
        // max x with only x >= 0.
        let a = dmatrix![-1.0, 0.0];
        let b = dvector![0.0];
        let c = dvector![1.0, 0.0];
        assert!(matches!(maximize(&c, &a, &b), LpOutcome::Unbounded));
    }

    #[test]
    fn infeasible_rows() {
        let a = dmatrix![1.0; -1.0];
        let b = dvector![-1.0, -1.0]; // x <= -1 and x >= 1
        let c = dvector![1.0];
        assert!(matches!(maximize(&c, &a, &b), LpOutcome::Infeasible));
    }

    #[test]
    fn negative_offsets_need_phase_one() {
        // max -x subject to x >= 2 (written as -x <= -2), x <= 5.
        let a = dmatrix![-1.0; 1.0];
        let b = dvector![-2.0, 5.0];
        let c = dvector![-1.0];
        match maximize(&c, &a, &b) {
            LpOutcome::Optimal { value, point } => {
                assert_relative_eq!(value, -2.0, epsilon = 1e-9);
                assert_relative_eq!(point[0], 2.0, epsilon = 1e-9);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn feasibility_of_convex_weights() {
        // Weights for the midpoint of segment (0,0)-(2,0): alpha = (0.5, 0.5).
        let a = dmatrix![
            0.0, 2.0;
            0.0, 0.0;
            1.0, 1.0
        ];
        let b = dvector![1.0, 0.0, 1.0];
        let z = feasible_point_eq_nonneg(&a, &b, 1e-8).expect("feasible");
        assert_relative_eq!(z[0] + z[1], 1.0, epsilon = 1e-8);
        assert_relative_eq!(2.0 * z[1], 1.0, epsilon = 1e-8);
    }
}
