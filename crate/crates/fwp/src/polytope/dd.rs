//! Double description method: extreme rays of a pointed polyhedral cone
//! `{y : B y <= 0}`.
//!
//! Rows are inserted incrementally in order of decreasing norm. Each ray
//! carries the set of rows it is active on; adjacency of two rays is decided
//! combinatorially (no third ray's active set may contain the intersection
//! of theirs), which is exact for pointed cones.

use nalgebra::{DMatrix, DVector};

use crate::{FwpError, Tolerances};

/// Bitset over constraint-row indices.
#[derive(Clone)]
struct RowSet {
    words: Vec<u64>,
}

impl RowSet {
    fn new(rows: usize) -> Self {
        RowSet {
            words: vec![0; rows.div_ceil(64)],
        }
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn intersection(&self, other: &Self) -> Self {
        RowSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    fn intersection_count(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn is_subset_of(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }
}

struct Ray {
    dir: DVector<f64>,
    active: RowSet,
}

/// Enumerate the extreme rays (unit norm) of `{y : B y <= 0}`.
///
/// The cone must be pointed: the rows of `B` must span the whole space.
pub(crate) fn extreme_rays(
    b: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<Vec<DVector<f64>>, FwpError> {
    let m = b.nrows();
    let dim = b.ncols();
    assert!(dim > 0, "double description in dimension zero");

    let norms: Vec<f64> = (0..m).map(|i| b.row(i).norm()).collect();
    let max_norm = norms.iter().fold(0.0_f64, |acc, &x| acc.max(x));
    if max_norm == 0.0 {
        return Err(FwpError::Numerical(
            "cone is not pointed: all constraint rows vanish".into(),
        ));
    }

    let mut order: Vec<usize> = (0..m).filter(|&i| norms[i] > tol.rank * max_norm).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    // Initial simplicial cone from a maximal independent subset of rows.
    let mut init: Vec<usize> = Vec::with_capacity(dim);
    let mut ortho: Vec<DVector<f64>> = Vec::with_capacity(dim);
    for &i in &order {
        if init.len() == dim {
            break;
        }
        let mut v = b.row(i).transpose();
        for _ in 0..2 {
            for q in &ortho {
                let coeff = q.dot(&v);
                v -= coeff * q;
            }
        }
        if v.norm() > tol.rank * max_norm {
            let norm = v.norm();
            ortho.push(v / norm);
            init.push(i);
        }
    }
    if init.len() < dim {
        return Err(FwpError::Numerical(format!(
            "cone is not pointed: constraint rows span only {} of {} dimensions",
            init.len(),
            dim
        )));
    }

    let mut b_init = DMatrix::zeros(dim, dim);
    for (r, &i) in init.iter().enumerate() {
        b_init.row_mut(r).copy_from(&b.row(i));
    }
    let lu = b_init.full_piv_lu();
    let neg_identity = -DMatrix::<f64>::identity(dim, dim);
    let r0 = lu.solve(&neg_identity).ok_or_else(|| {
        FwpError::Numerical("initial constraint block is numerically singular".into())
    })?;

    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let col = r0.column(j).into_owned();
            let norm = col.norm();
            let mut active = RowSet::new(m);
            for (r, &i) in init.iter().enumerate() {
                if r != j {
                    active.set(i);
                }
            }
            Ray {
                dir: col / norm,
                active,
            }
        })
        .collect();

    let in_init = {
        let mut flags = vec![false; m];
        for &i in &init {
            flags[i] = true;
        }
        flags
    };

    for &i in &order {
        if in_init[i] {
            continue;
        }
        let row = b.row(i).transpose();
        let eps = tol.dd_zero.max(tol.rank) * norms[i];

        let dots: Vec<f64> = rays.iter().map(|r| row.dot(&r.dir)).collect();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (k, &dot) in dots.iter().enumerate() {
            if dot > eps {
                pos.push(k);
            } else if dot < -eps {
                neg.push(k);
            } else {
                rays[k].active.set(i);
            }
        }
        if pos.is_empty() {
            continue;
        }

        let mut created: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                // Adjacent rays share a (dim-2)-face, so they must be active
                // on at least dim-2 common rows; cheap pre-filter before the
                // full combinatorial test.
                if dim >= 2 && rays[p].active.intersection_count(&rays[q].active) < dim - 2 {
                    continue;
                }
                let common = rays[p].active.intersection(&rays[q].active);
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == p || k == q || !common.is_subset_of(&r.active));
                if !adjacent {
                    continue;
                }
                let dir = dots[p] * &rays[q].dir - dots[q] * &rays[p].dir;
                let norm = dir.norm();
                if norm <= 1e-14 * (dots[p].abs() + dots[q].abs()) {
                    continue;
                }
                let mut active = common;
                active.set(i);
                created.push(Ray {
                    dir: dir / norm,
                    active,
                });
            }
        }

        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + created.len());
        for (k, ray) in rays.drain(..).enumerate() {
            if !pos.contains(&k) {
                next.push(ray);
            }
        }
        next.extend(created);
        rays = next;
    }

    // Extreme rays are unique up to scale; collapse numerically coincident
    // directions.
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(rays.len());
    for ray in rays {
        if !out.iter().any(|r| r.dot(&ray.dir) > 1.0 - 1e-10) {
            out.push(ray.dir);
        }
    }
    Ok(out)
}
