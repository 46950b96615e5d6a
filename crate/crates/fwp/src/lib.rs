//! Feasible wrench polytopes for legged robots.
//!
//! A legged robot steers its center of mass by pushing on the environment
//! through its contact points. Which net wrenches (torque + force about the
//! CoM) it can actually produce is limited by three things at once: Coulomb
//! friction at each contact, per-joint actuation limits, and the coupling of
//! contact forces through the floating-base dynamics. This crate computes
//! that set — the feasible wrench polytope (FWP) — exactly, as a convex
//! polytope in wrench space, for both the case where every contact stays
//! planted ("stick") and the cases where a chosen subset of contacts lifts
//! off ("opening").
//!
//! The pipeline has three steps:
//!
//! 1. assemble a half-plane description of the admissible contact forces and
//!    joint torques ([`wrench::stick_hrep`] / [`wrench::opening_hrep`]),
//! 2. enumerate its vertices ([`polytope::vertex_enum`]),
//! 3. map each force vertex to a centroidal wrench ([`wrench::wrench_map`]).
//!
//! The union of the stick polytope and all non-empty opening polytopes is the
//! complete (non-convex) set of wrenches the system can exert through
//! actuation. See the book under `book/` for a guided tour.

pub mod contact;
pub mod dynamics;
pub mod polytope;
pub mod scenario;
pub mod wrench;

mod error;
mod linalg;
mod tolerances;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{ErrorClass, FwpError};
pub use tolerances::Tolerances;

pub use contact::{ActuationLimits, ContactScenario, FrictionDim, FrictionSpec};
pub use dynamics::{BaseType, ContactPointKinematics, RobotModel, RobotState};
pub use polytope::{AffineHull, HPolytope, SupportOutcome, VPolytope};
pub use scenario::Scenario;
pub use wrench::{ActiveContact, ContactSet, FwpOptions, FwpResult, WrenchMap};
