//! One-sided Jacobi SVD for the small dense matrices this crate works with.
//!
//! The rank decisions behind equality reduction and affine-hull analysis
//! need singular vectors that actually reproduce the input. The iterative
//! bidiagonal SVD shipped with the linear-algebra crate mis-factors some
//! rank-deficient inputs (orthogonal factors inconsistent with the reported
//! singular values), which silently corrupts null spaces. Jacobi rotations
//! converge unconditionally on these sizes and give small singular values
//! with high relative accuracy.

use nalgebra::{DMatrix, DVector};

pub(crate) struct ThinSvd {
    /// Orthonormal-ish columns; columns with zero singular value are zero.
    pub u: DMatrix<f64>,
    /// Singular values, descending.
    pub sigma: DVector<f64>,
    /// Right singular vectors as columns (not transposed).
    pub v: DMatrix<f64>,
}

/// Thin SVD `a = u * diag(sigma) * v'` with `min(n, m)` columns.
pub(crate) fn thin_svd(a: &DMatrix<f64>) -> ThinSvd {
    let (n, m) = a.shape();
    if n < m {
        let t = thin_svd(&a.transpose());
        return ThinSvd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        };
    }

    let mut b = a.clone();
    let mut v = DMatrix::<f64>::identity(m, m);
    let eps = f64::EPSILON;
    let max_sweeps = 64;

    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..m {
            for q in (p + 1)..m {
                let col_p = b.column(p).into_owned();
                let col_q = b.column(q).into_owned();
                let alpha = col_p.dot(&col_p);
                let beta = col_q.dot(&col_q);
                let gamma = col_p.dot(&col_q);
                if gamma.abs() <= 1e-300 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let bip = b[(i, p)];
                    let biq = b[(i, q)];
                    b[(i, p)] = c * bip - s * biq;
                    b[(i, q)] = s * bip + c * biq;
                }
                for i in 0..m {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..m).collect();
    let norms: Vec<f64> = (0..m).map(|j| b.column(j).norm()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u = DMatrix::zeros(n, m);
    let mut sigma = DVector::zeros(m);
    let mut v_sorted = DMatrix::zeros(m, m);
    for (dst, &src) in order.iter().enumerate() {
        sigma[dst] = norms[src];
        if norms[src] > 0.0 {
            u.column_mut(dst).copy_from(&(b.column(src) / norms[src]));
        }
        v_sorted.column_mut(dst).copy_from(&v.column(src));
    }
    ThinSvd {
        u,
        sigma,
        v: v_sorted,
    }
}

impl ThinSvd {
    /// Rank against a relative threshold on the largest singular value.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let cut = rel_tol * self.sigma.max().max(1e-300);
        self.sigma.iter().filter(|&&s| s > cut).count()
    }

    /// Minimum-norm least-squares solution of `a x = b`.
    pub fn solve_min_norm(&self, b: &DVector<f64>, rel_tol: f64) -> DVector<f64> {
        let rank = self.rank(rel_tol);
        let mut x = DVector::zeros(self.v.nrows());
        for k in 0..rank {
            let coeff = self.u.column(k).dot(b) / self.sigma[k];
            x += coeff * self.v.column(k);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn reconstruction_error(a: &DMatrix<f64>, svd: &ThinSvd) -> f64 {
        let recon = &svd.u * DMatrix::from_diagonal(&svd.sigma) * svd.v.transpose();
        (a - recon).amax()
    }

    #[test]
    fn random_matrices_factor_accurately() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(1..8);
            let m = rng.gen_range(1..8);
            let a = DMatrix::from_fn(n, m, |_, _| rng.gen_range(-5.0..5.0));
            let svd = thin_svd(&a);
            assert!(
                reconstruction_error(&a, &svd) <= 1e-12 * (1.0 + a.amax()),
                "bad factorization for {n}x{m}"
            );
            // Orthonormal factors on the nonzero part.
            let r = svd.rank(1e-12);
            let ur = svd.u.columns(0, r).into_owned();
            let id = ur.transpose() * ur;
            assert_relative_eq!(id, DMatrix::identity(r, r), epsilon = 1e-10);
        }
    }

    #[test]
    fn rank_deficient_wide_matrix() {
        // Rank-2 data in R^6, the shape that trips iterative SVDs.
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..50 {
            let u1 = DMatrix::from_fn(6, 1, |_, _| rng.gen_range(-1.0..1.0));
            let u2 = DMatrix::from_fn(6, 1, |_, _| rng.gen_range(-1.0..1.0));
            let w1 = DMatrix::from_fn(1, 4, |_, _| rng.gen_range(-1.0..1.0));
            let w2 = DMatrix::from_fn(1, 4, |_, _| rng.gen_range(-1.0..1.0));
            let a = 60.0 * &u1 * &w1 + 20.0 * &u2 * &w2;
            let svd = thin_svd(&a);
            assert!(reconstruction_error(&a, &svd) <= 1e-10);
            assert_eq!(svd.rank(1e-9), 2);
            // The top-2 left singular vectors really span the columns.
            let span = svd.u.columns(0, 2).into_owned();
            for j in 0..a.ncols() {
                let col = a.column(j).into_owned();
                let residual = &col - &span * (span.transpose() * &col);
                assert!(residual.norm() <= 1e-10 * (1.0 + col.norm()));
            }
        }
    }

    #[test]
    fn min_norm_solution() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0]);
        let b = DVector::from_vec(vec![3.0, 4.0]);
        let svd = thin_svd(&a);
        let x = svd.solve_min_norm(&b, 1e-12);
        assert_relative_eq!(x[0], 3.0, epsilon = 1e-12);
        assert_relative_eq!(x[1], 2.0, epsilon = 1e-12);
        assert_relative_eq!(x[2], 0.0, epsilon = 1e-12);
    }
}
