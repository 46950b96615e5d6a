//! Convex polytope representations and conversions.
//!
//! A polytope is kept either as a half-plane description `{x : Ax <= b, Cx = d}`
//! ([`HPolytope`]) or as a vertex description ([`VPolytope`], optionally with
//! recession rays for unbounded sets). The operations here are the ones the
//! wrench pipeline needs: equality reduction, vertex enumeration by the double
//! description method, facet enumeration through polar duality, LP-backed
//! support functions and membership tests, and affine-hull analysis for
//! degenerate sets.

mod dd;
mod enumerate;
mod hull;
pub(crate) mod lp;
mod off;
mod reduce;

pub use enumerate::{facet_enum, vertex_enum, VertexEnumeration};
pub use hull::{affine_hull, orthonormal_complement, AffineHull};
pub use off::vpolytope_to_off;
pub use reduce::{reduce_equalities, AffineMap, Reduction};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{FwpError, Tolerances};

/// Half-plane description `{x in R^n : A x <= b and C x = d}`.
///
/// `C` may have zero rows; the set is then a plain inequality polyhedron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "HPolytopeRepr", try_from = "HPolytopeRepr")]
pub struct HPolytope {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DMatrix<f64>,
    d: DVector<f64>,
}

impl HPolytope {
    pub fn new(
        a: DMatrix<f64>,
        b: DVector<f64>,
        c: DMatrix<f64>,
        d: DVector<f64>,
    ) -> Result<Self, FwpError> {
        if a.nrows() != b.len() {
            return Err(FwpError::Dimension(format!(
                "A has {} rows but b has {} entries",
                a.nrows(),
                b.len()
            )));
        }
        if c.nrows() != d.len() {
            return Err(FwpError::Dimension(format!(
                "C has {} rows but d has {} entries",
                c.nrows(),
                d.len()
            )));
        }
        if c.nrows() > 0 && c.ncols() != a.ncols() {
            return Err(FwpError::Dimension(format!(
                "A has {} columns but C has {}",
                a.ncols(),
                c.ncols()
            )));
        }
        let n = a.ncols();
        let c = if c.nrows() == 0 { DMatrix::zeros(0, n) } else { c };
        Ok(HPolytope { a, b, c, d })
    }

    /// Inequality-only polytope `{x : A x <= b}`.
    pub fn from_inequalities(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self, FwpError> {
        let n = a.ncols();
        Self::new(a, b, DMatrix::zeros(0, n), DVector::zeros(0))
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn num_inequalities(&self) -> usize {
        self.a.nrows()
    }

    pub fn num_equalities(&self) -> usize {
        self.c.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn d(&self) -> &DVector<f64> {
        &self.d
    }

    /// Add equality rows, e.g. to slice the set with an affine subspace.
    pub fn intersect_equalities(
        &self,
        c: DMatrix<f64>,
        d: DVector<f64>,
    ) -> Result<Self, FwpError> {
        if c.ncols() != self.dim() {
            return Err(FwpError::Dimension(format!(
                "slice equalities have {} columns, polytope dimension is {}",
                c.ncols(),
                self.dim()
            )));
        }
        if c.nrows() != d.len() {
            return Err(FwpError::Dimension(
                "slice equality rows and offsets differ".into(),
            ));
        }
        let mut c_all = DMatrix::zeros(self.c.nrows() + c.nrows(), self.dim());
        c_all.rows_mut(0, self.c.nrows()).copy_from(&self.c);
        c_all.rows_mut(self.c.nrows(), c.nrows()).copy_from(&c);
        let mut d_all = DVector::zeros(self.d.len() + d.len());
        d_all.rows_mut(0, self.d.len()).copy_from(&self.d);
        d_all.rows_mut(self.d.len(), d.len()).copy_from(&d);
        Self::new(self.a.clone(), self.b.clone(), c_all, d_all)
    }

    /// Row-wise membership: every inequality within `tol * max(1, |row|)`
    /// slack and every equality within the same scaled residual.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        for i in 0..self.a.nrows() {
            let row = self.a.row(i);
            let slack = tol * row.norm().max(1.0);
            if row.dot(&x.transpose()) > self.b[i] + slack {
                return false;
            }
        }
        for i in 0..self.c.nrows() {
            let row = self.c.row(i);
            let slack = tol * row.norm().max(1.0);
            if (row.dot(&x.transpose()) - self.d[i]).abs() > slack {
                return false;
            }
        }
        true
    }

    /// Support function `max { dir·x : x in P }` by linear programming.
    pub fn support(&self, dir: &DVector<f64>, tol: &Tolerances) -> Result<SupportOutcome, FwpError> {
        if dir.len() != self.dim() {
            return Err(FwpError::Dimension(format!(
                "direction has {} entries, polytope dimension is {}",
                dir.len(),
                self.dim()
            )));
        }
        if dir.norm() == 0.0 {
            return Err(FwpError::InvalidInput("zero support direction".into()));
        }
        let reduction = reduce_equalities(self, tol)?;
        let (reduced, lift) = match reduction {
            Reduction::Infeasible => return Ok(SupportOutcome::Empty),
            Reduction::Feasible { reduced, lift } => (reduced, lift),
        };
        let base_value = dir.dot(&lift.offset);
        if lift.linear.ncols() == 0 {
            if reduced.b.iter().all(|&bi| bi >= -tol.feasibility) {
                return Ok(SupportOutcome::Bounded {
                    value: base_value,
                    argmax: lift.offset,
                });
            }
            return Ok(SupportOutcome::Empty);
        }
        let c_red = lift.linear.transpose() * dir;
        match lp::maximize(&c_red, &reduced.a, &reduced.b) {
            lp::LpOutcome::Optimal { value, point } => Ok(SupportOutcome::Bounded {
                value: value + base_value,
                argmax: lift.apply(&point),
            }),
            lp::LpOutcome::Unbounded => Ok(SupportOutcome::Unbounded),
            lp::LpOutcome::Infeasible => Ok(SupportOutcome::Empty),
        }
    }
}

/// Vertex description: columns of `vertices` are points, columns of `rays`
/// are unit recession directions. The set is the convex hull of the vertices
/// swept along the cone of the rays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "VPolytopeRepr", try_from = "VPolytopeRepr")]
pub struct VPolytope {
    vertices: DMatrix<f64>,
    rays: DMatrix<f64>,
}

impl VPolytope {
    pub fn new(vertices: DMatrix<f64>, rays: DMatrix<f64>) -> Result<Self, FwpError> {
        if rays.ncols() > 0 && rays.nrows() != vertices.nrows() {
            return Err(FwpError::Dimension(format!(
                "vertices live in R^{} but rays in R^{}",
                vertices.nrows(),
                rays.nrows()
            )));
        }
        let n = vertices.nrows();
        let rays = if rays.ncols() == 0 { DMatrix::zeros(n, 0) } else { rays };
        Ok(VPolytope { vertices, rays })
    }

    pub fn from_vertices(vertices: DMatrix<f64>) -> Self {
        let n = vertices.nrows();
        VPolytope {
            vertices,
            rays: DMatrix::zeros(n, 0),
        }
    }

    /// The empty set in ambient dimension `n`.
    pub fn empty(n: usize) -> Self {
        VPolytope {
            vertices: DMatrix::zeros(n, 0),
            rays: DMatrix::zeros(n, 0),
        }
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.vertices.nrows()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.ncols()
    }

    pub fn num_rays(&self) -> usize {
        self.rays.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.ncols() == 0
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.ncols() == 0
    }

    pub fn vertices(&self) -> &DMatrix<f64> {
        &self.vertices
    }

    pub fn rays(&self) -> &DMatrix<f64> {
        &self.rays
    }

    pub fn vertex(&self, j: usize) -> DVector<f64> {
        self.vertices.column(j).into_owned()
    }

    /// Mean of the vertices; a point of the set whenever it is non-empty.
    pub fn centroid(&self) -> Option<DVector<f64>> {
        if self.is_empty() {
            return None;
        }
        let m = self.vertices.ncols() as f64;
        let mut c = DVector::zeros(self.dim());
        for j in 0..self.vertices.ncols() {
            c += self.vertices.column(j);
        }
        Some(c / m)
    }

    /// Membership via the convex-combination feasibility program:
    /// `x = V a + R l`, `sum a = 1`, `a, l >= 0`.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        if x.len() != self.dim() || self.is_empty() {
            return false;
        }
        let n = self.dim();
        let mv = self.vertices.ncols();
        let mr = self.rays.ncols();
        let mut eq = DMatrix::zeros(n + 1, mv + mr);
        eq.view_mut((0, 0), (n, mv)).copy_from(&self.vertices);
        if mr > 0 {
            eq.view_mut((0, mv), (n, mr)).copy_from(&self.rays);
        }
        for j in 0..mv {
            eq[(n, j)] = 1.0;
        }
        let mut rhs = DVector::zeros(n + 1);
        rhs.rows_mut(0, n).copy_from(x);
        rhs[n] = 1.0;
        lp::feasible_point_eq_nonneg(&eq, &rhs, tol).is_some()
    }

    /// Support function `max { dir·x : x in P }` over the columns.
    pub fn support(&self, dir: &DVector<f64>, tol: &Tolerances) -> Result<SupportOutcome, FwpError> {
        if dir.len() != self.dim() {
            return Err(FwpError::Dimension(format!(
                "direction has {} entries, polytope dimension is {}",
                dir.len(),
                self.dim()
            )));
        }
        if dir.norm() == 0.0 {
            return Err(FwpError::InvalidInput("zero support direction".into()));
        }
        if self.is_empty() {
            return Ok(SupportOutcome::Empty);
        }
        for j in 0..self.rays.ncols() {
            if dir.dot(&self.rays.column(j).into_owned()) > tol.rank * dir.norm() {
                return Ok(SupportOutcome::Unbounded);
            }
        }
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for j in 0..self.vertices.ncols() {
            let v = dir.dot(&self.vertices.column(j).into_owned());
            if v > best {
                best = v;
                arg = j;
            }
        }
        Ok(SupportOutcome::Bounded {
            value: best,
            argmax: self.vertex(arg),
        })
    }

    /// Image under a linear map. Mapped rays that collapse to (near) zero are
    /// dropped; the rest are re-normalized. Vertices are deduplicated but not
    /// reduced to extreme points — see [`VPolytope::extreme_points`].
    pub fn map(&self, m: &DMatrix<f64>, tol: &Tolerances) -> Result<VPolytope, FwpError> {
        if m.ncols() != self.dim() {
            return Err(FwpError::Dimension(format!(
                "map has {} columns, polytope dimension is {}",
                m.ncols(),
                self.dim()
            )));
        }
        let vertices = m * &self.vertices;
        let mut rays: Vec<DVector<f64>> = Vec::new();
        for j in 0..self.rays.ncols() {
            let r = m * self.rays.column(j);
            let norm = r.norm();
            if norm > tol.rank * m.norm().max(1.0) {
                rays.push(r / norm);
            }
        }
        let poly = VPolytope {
            vertices,
            rays: columns_to_matrix(m.nrows(), &rays),
        };
        Ok(poly.dedup(tol))
    }

    /// Remove duplicate vertices (infinity-norm distance below `tol.vertex`)
    /// and duplicate ray directions.
    pub fn dedup(&self, tol: &Tolerances) -> VPolytope {
        let mut kept: Vec<DVector<f64>> = Vec::new();
        for j in 0..self.vertices.ncols() {
            let v = self.vertices.column(j).into_owned();
            if !kept.iter().any(|u| (u - &v).amax() <= tol.vertex) {
                kept.push(v);
            }
        }
        let mut kept_rays: Vec<DVector<f64>> = Vec::new();
        for j in 0..self.rays.ncols() {
            let r = self.rays.column(j).into_owned();
            if !kept_rays.iter().any(|u| (u - &r).amax() <= tol.vertex) {
                kept_rays.push(r);
            }
        }
        VPolytope {
            vertices: columns_to_matrix(self.dim(), &kept),
            rays: columns_to_matrix(self.dim(), &kept_rays),
        }
    }

    /// Keep only extreme points: drop every vertex that is a convex
    /// combination of the remaining generators.
    pub fn extreme_points(&self, tol: &Tolerances) -> VPolytope {
        let deduped = self.dedup(tol);
        let mut cols: Vec<DVector<f64>> = (0..deduped.vertices.ncols())
            .map(|j| deduped.vertices.column(j).into_owned())
            .collect();
        let mut j = 0;
        while j < cols.len() {
            if cols.len() == 1 {
                break;
            }
            let candidate = cols[j].clone();
            let others: Vec<DVector<f64>> = cols
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, v)| v.clone())
                .collect();
            let hull = VPolytope {
                vertices: columns_to_matrix(deduped.dim(), &others),
                rays: deduped.rays.clone(),
            };
            if hull.contains(&candidate, tol.vertex) {
                cols.remove(j);
            } else {
                j += 1;
            }
        }
        VPolytope {
            vertices: columns_to_matrix(deduped.dim(), &cols),
            rays: deduped.rays,
        }
    }

    /// Reorder vertices (and rays) lexicographically for stable output.
    pub fn sorted_lexicographic(&self) -> VPolytope {
        let mut vs: Vec<DVector<f64>> = (0..self.vertices.ncols())
            .map(|j| self.vertices.column(j).into_owned())
            .collect();
        vs.sort_by(compare_lex);
        let mut rs: Vec<DVector<f64>> = (0..self.rays.ncols())
            .map(|j| self.rays.column(j).into_owned())
            .collect();
        rs.sort_by(compare_lex);
        VPolytope {
            vertices: columns_to_matrix(self.dim(), &vs),
            rays: columns_to_matrix(self.dim(), &rs),
        }
    }
}

fn compare_lex(a: &DVector<f64>, b: &DVector<f64>) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let ord = x.total_cmp(y);
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

pub(crate) fn columns_to_matrix(n: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.column_mut(j).copy_from(c);
    }
    m
}

/// Result of a support-function query.
#[derive(Debug, Clone)]
pub enum SupportOutcome {
    Bounded { value: f64, argmax: DVector<f64> },
    /// The set is unbounded in the queried direction.
    Unbounded,
    /// The set is empty.
    Empty,
}

impl SupportOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            SupportOutcome::Bounded { value, .. } => Some(*value),
            _ => None,
        }
    }
}

// --- serialization ---------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct HPolytopeRepr {
    n: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    #[serde(rename = "C", default)]
    c: Vec<Vec<f64>>,
    #[serde(default)]
    d: Vec<f64>,
}

impl From<HPolytope> for HPolytopeRepr {
    fn from(p: HPolytope) -> Self {
        HPolytopeRepr {
            n: p.dim(),
            a: matrix_to_rows(&p.a),
            b: p.b.iter().copied().collect(),
            c: matrix_to_rows(&p.c),
            d: p.d.iter().copied().collect(),
        }
    }
}

impl TryFrom<HPolytopeRepr> for HPolytope {
    type Error = FwpError;

    fn try_from(r: HPolytopeRepr) -> Result<Self, FwpError> {
        let a = rows_to_matrix(&r.a, r.n)?;
        let c = rows_to_matrix(&r.c, r.n)?;
        HPolytope::new(a, DVector::from_vec(r.b), c, DVector::from_vec(r.d))
    }
}

#[derive(Serialize, Deserialize)]
struct VPolytopeRepr {
    n: usize,
    #[serde(rename = "V")]
    vertices: Vec<Vec<f64>>,
    #[serde(default)]
    rays: Vec<Vec<f64>>,
}

impl From<VPolytope> for VPolytopeRepr {
    fn from(p: VPolytope) -> Self {
        VPolytopeRepr {
            n: p.dim(),
            vertices: matrix_to_rows(&p.vertices.transpose()),
            rays: matrix_to_rows(&p.rays.transpose()),
        }
    }
}

impl TryFrom<VPolytopeRepr> for VPolytope {
    type Error = FwpError;

    fn try_from(r: VPolytopeRepr) -> Result<Self, FwpError> {
        let v = rows_to_matrix(&r.vertices, r.n)?.transpose();
        let rays = rows_to_matrix(&r.rays, r.n)?.transpose();
        VPolytope::new(v, rays)
    }
}

pub(crate) fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

pub(crate) fn rows_to_matrix(rows: &[Vec<f64>], ncols: usize) -> Result<DMatrix<f64>, FwpError> {
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(FwpError::Dimension(format!(
                "row {i} has {} entries, expected {ncols}",
                row.len()
            )));
        }
    }
    let mut m = DMatrix::zeros(rows.len(), ncols);
    for (i, row) in rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    Ok(m)
}
