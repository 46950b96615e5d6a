use serde::{Deserialize, Serialize};

/// Numerical tolerances used across the polytope engine and the wrench
/// pipeline. All fields are absolute unless noted otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Rank decisions, relative to the largest singular value (or row norm)
    /// of the matrix in question.
    pub rank: f64,
    /// Two vertices closer than this (infinity norm) are duplicates.
    pub vertex: f64,
    /// Constraint-satisfaction slack when checking `Ax <= b`, `Cx = d`.
    pub feasibility: f64,
    /// Singular-value cutoff (relative to the largest) when deciding the
    /// affine hull of a vertex set.
    pub hull: f64,
    /// Homogenization coordinate below this marks a recession ray rather
    /// than a vertex.
    pub ray: f64,
    /// Zero classification of `row . ray` during double-description
    /// insertions, relative to the row norm. Looser than `rank` because ray
    /// coordinates accumulate error over long insertion chains.
    pub dd_zero: f64,
    /// Maximum contact-point speed for a contact to count as established.
    pub established: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: 1e-10,
            vertex: 1e-8,
            feasibility: 1e-8,
            hull: 1e-7,
            ray: 1e-9,
            dd_zero: 1e-9,
            established: 1e-6,
        }
    }
}
