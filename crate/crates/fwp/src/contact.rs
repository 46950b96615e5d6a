//! Contact-model primitives: linearized friction cones, actuation-limit
//! boxes, and the per-contact scenario taxonomy (opening / stick / slip).
//!
//! Force components are always ordered tangential-first, normal-last:
//! `(f_T, f_N)` in the plane and `(f_T1, f_T2, f_N)` in space.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::polytope::HPolytope;
use crate::FwpError;

/// Contact-force dimensionality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrictionDim {
    /// Planar contact: one tangential and one normal component.
    Planar2,
    /// Spatial contact: two tangential and one normal component.
    Spatial3,
}

impl FrictionDim {
    pub fn force_dim(self) -> usize {
        match self {
            FrictionDim::Planar2 => 2,
            FrictionDim::Spatial3 => 3,
        }
    }

    /// Rows of the linearized cone for this dimensionality.
    pub fn cone_rows(self) -> usize {
        match self {
            FrictionDim::Planar2 => 3,
            FrictionDim::Spatial3 => 5,
        }
    }
}

/// Static Coulomb friction at one contact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrictionSpec {
    pub mu: f64,
    pub dim: FrictionDim,
}

impl FrictionSpec {
    pub fn new(mu: f64, dim: FrictionDim) -> Result<Self, FwpError> {
        if !(mu >= 0.0) {
            return Err(FwpError::InvalidInput(format!(
                "friction coefficient must be non-negative, got {mu}"
            )));
        }
        Ok(FrictionSpec { mu, dim })
    }
}

/// Per-actuator torque (or force) bounds with `lower < 0 < upper`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActuationLimits {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ActuationLimits {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, FwpError> {
        if lower.len() != upper.len() {
            return Err(FwpError::Dimension(format!(
                "{} lower limits but {} upper limits",
                lower.len(),
                upper.len()
            )));
        }
        for (r, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < 0.0 && 0.0 < hi) {
                return Err(FwpError::InvalidInput(format!(
                    "actuator {r} must satisfy lower < 0 < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(ActuationLimits { lower, upper })
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }
}

/// The three ways an active contact can evolve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContactScenario {
    /// Separating: the gap grows, the force is zero.
    Opening,
    /// The contact point stays put; the stick force is inside the cone.
    Stick,
    /// The stick force would violate the cone, so the point slides.
    Slip,
}

/// H-description of the linearized friction cone, acting on contact-frame
/// force components (normal last). Planar cones are exact; spatial cones are
/// the inner pyramidal approximation with edge slope `mu / sqrt(2)`.
pub fn friction_hrep(spec: &FrictionSpec) -> Result<HPolytope, FwpError> {
    if !(spec.mu >= 0.0) {
        return Err(FwpError::InvalidInput(format!(
            "friction coefficient must be non-negative, got {}",
            spec.mu
        )));
    }
    let mu = spec.mu;
    let (rows, cols, data): (usize, usize, Vec<f64>) = match spec.dim {
        FrictionDim::Planar2 => (
            3,
            2,
            vec![
                -1.0, -mu, //
                1.0, -mu, //
                0.0, -1.0,
            ],
        ),
        FrictionDim::Spatial3 => {
            let s = mu / f64::sqrt(2.0);
            (
                5,
                3,
                vec![
                    -1.0, 0.0, -s, //
                    1.0, 0.0, -s, //
                    0.0, -1.0, -s, //
                    0.0, 1.0, -s, //
                    0.0, 0.0, -1.0,
                ],
            )
        }
    };
    HPolytope::from_inequalities(DMatrix::from_row_slice(rows, cols, &data), DVector::zeros(rows))
}

/// H-description of the actuation box `u_r in [lower_r, upper_r]`:
/// `[I; -I] u <= (upper..., -lower...)`.
pub fn actuation_hrep(limits: &ActuationLimits) -> Result<HPolytope, FwpError> {
    // Re-validate: the struct can be built literal-style through serde.
    let limits = ActuationLimits::new(limits.lower.clone(), limits.upper.clone())?;
    let na = limits.len();
    let mut a = DMatrix::zeros(2 * na, na);
    let mut b = DVector::zeros(2 * na);
    for r in 0..na {
        a[(r, r)] = 1.0;
        a[(na + r, r)] = -1.0;
        b[r] = limits.upper[r];
        b[na + r] = -limits.lower[r];
    }
    HPolytope::from_inequalities(a, b)
}

/// Classify an active contact (`p_N = 0`) given its normal velocity, the
/// candidate normal acceleration it would have if left alone, and the force
/// the stick solution asks for.
pub fn classify_contact(
    p_n: f64,
    p_n_dot: f64,
    p_n_ddot_candidate: f64,
    stick_force: &DVector<f64>,
    spec: &FrictionSpec,
) -> Result<ContactScenario, FwpError> {
    const ACTIVE_TOL: f64 = 1e-9;
    if p_n < -ACTIVE_TOL {
        return Err(FwpError::InvalidInput(format!(
            "contact penetrates the environment: p_N = {p_n}"
        )));
    }
    if p_n > ACTIVE_TOL {
        return Err(FwpError::InvalidInput(format!(
            "contact is not active: p_N = {p_n}"
        )));
    }
    if stick_force.len() != spec.dim.force_dim() {
        return Err(FwpError::Dimension(format!(
            "stick force has {} components, expected {}",
            stick_force.len(),
            spec.dim.force_dim()
        )));
    }
    if p_n_dot > ACTIVE_TOL || (p_n_dot.abs() <= ACTIVE_TOL && p_n_ddot_candidate > ACTIVE_TOL) {
        return Ok(ContactScenario::Opening);
    }
    let cone = friction_hrep(spec)?;
    if cone.contains(stick_force, 1e-9) {
        Ok(ContactScenario::Stick)
    } else {
        Ok(ContactScenario::Slip)
    }
}
