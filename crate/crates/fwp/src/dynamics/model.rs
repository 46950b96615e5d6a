//! Robot model data: a floating-base kinematic tree with inertial bodies,
//! revolute/prismatic joints, actuation limits, and named contact points.

use nalgebra::{DVector, Matrix3, UnitQuaternion};
use serde::{Deserialize, Serialize};

use crate::contact::ActuationLimits;
use crate::FwpError;

/// Floating-base parametrization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseType {
    /// Planar base: position `(x, z)` plus rotation, velocities match.
    Planar3,
    /// Spatial base: position plus unit quaternion; velocity is a 6-D twist.
    Spatial6,
}

impl BaseType {
    /// Degrees of freedom of the floating base.
    pub fn dofs(self) -> usize {
        match self {
            BaseType::Planar3 => 3,
            BaseType::Spatial6 => 6,
        }
    }

    /// Tangential-plus-normal force components at one contact.
    pub fn contact_dim(self) -> usize {
        match self {
            BaseType::Planar3 => 2,
            BaseType::Spatial6 => 3,
        }
    }

    /// Wrench dimension about the CoM.
    pub fn wrench_dim(self) -> usize {
        match self {
            BaseType::Planar3 => 3,
            BaseType::Spatial6 => 6,
        }
    }

    fn spatial(self) -> bool {
        matches!(self, BaseType::Spatial6)
    }
}

/// Rotational inertia about the body CoM: a scalar in the plane, a symmetric
/// positive-definite matrix in space.
#[derive(Debug, Clone, PartialEq)]
pub enum RotationalInertia {
    Planar(f64),
    Spatial(Matrix3<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Body {
    pub name: String,
    pub mass: f64,
    /// CoM offset in the body frame.
    pub com: DVector<f64>,
    pub inertia: RotationalInertia,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JointKind {
    Revolute,
    Prismatic,
}

/// Fixed frame of a joint in its parent body, plus the motion axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    pub name: String,
    pub parent: usize,
    pub child: usize,
    pub kind: JointKind,
    /// Motion axis in the joint frame. Planar revolute joints turn about the
    /// out-of-plane axis and ignore this; planar prismatic axes are 2-D.
    pub axis: DVector<f64>,
    /// Joint frame origin in the parent body frame.
    pub origin: DVector<f64>,
    /// Joint frame orientation relative to the parent body frame.
    pub orientation: FrameRotation,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FrameRotation {
    Planar(f64),
    Spatial(UnitQuaternion<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActuatedJoint {
    pub joint: usize,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactPointDef {
    pub name: String,
    pub body: usize,
    /// Point in the body frame.
    pub point: DVector<f64>,
}

/// Floating-base kinematic tree. Body 0 is the floating base.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel {
    pub base: BaseType,
    pub bodies: Vec<Body>,
    pub joints: Vec<Joint>,
    pub actuated: Vec<ActuatedJoint>,
    pub contact_points: Vec<ContactPointDef>,
    // Derived topology, fixed at construction.
    pub(crate) joint_order: Vec<usize>,
    pub(crate) parent_joint: Vec<Option<usize>>,
    pub(crate) path_dofs: Vec<Vec<usize>>,
}

impl RobotModel {
    pub fn new(
        base: BaseType,
        bodies: Vec<Body>,
        joints: Vec<Joint>,
        actuated: Vec<ActuatedJoint>,
        contact_points: Vec<ContactPointDef>,
    ) -> Result<Self, FwpError> {
        if bodies.is_empty() {
            return Err(FwpError::InvalidInput("model needs at least one body".into()));
        }
        let nb = bodies.len();
        let space_dim = if base.spatial() { 3 } else { 2 };

        for body in &bodies {
            if !(body.mass > 0.0) {
                return Err(FwpError::InvalidInput(format!(
                    "body `{}` must have positive mass",
                    body.name
                )));
            }
            if body.com.len() != space_dim {
                return Err(FwpError::Dimension(format!(
                    "body `{}` CoM has {} entries, expected {space_dim}",
                    body.name,
                    body.com.len()
                )));
            }
            match (&body.inertia, base) {
                (RotationalInertia::Planar(i_zz), BaseType::Planar3) => {
                    if !(*i_zz > 0.0) {
                        return Err(FwpError::InvalidInput(format!(
                            "body `{}` planar inertia must be positive",
                            body.name
                        )));
                    }
                }
                (RotationalInertia::Spatial(m), BaseType::Spatial6) => {
                    let sym = (m - m.transpose()).amax();
                    if sym > 1e-9 * m.amax().max(1.0) {
                        return Err(FwpError::InvalidInput(format!(
                            "body `{}` inertia matrix is not symmetric",
                            body.name
                        )));
                    }
                    if m.symmetric_eigenvalues().min() <= 0.0 {
                        return Err(FwpError::InvalidInput(format!(
                            "body `{}` inertia matrix is not positive definite",
                            body.name
                        )));
                    }
                }
                _ => {
                    return Err(FwpError::InvalidInput(format!(
                        "body `{}` inertia kind does not match the base type",
                        body.name
                    )));
                }
            }
        }

        // Exactly one incoming joint per non-base body, none for the base.
        let mut parent_joint: Vec<Option<usize>> = vec![None; nb];
        for (j, joint) in joints.iter().enumerate() {
            if joint.parent >= nb || joint.child >= nb {
                return Err(FwpError::InvalidInput(format!(
                    "joint `{}` references a body out of range",
                    joint.name
                )));
            }
            if joint.child == 0 {
                return Err(FwpError::InvalidInput(format!(
                    "joint `{}` re-parents the floating base",
                    joint.name
                )));
            }
            if parent_joint[joint.child].is_some() {
                return Err(FwpError::InvalidInput(format!(
                    "body `{}` has more than one parent joint",
                    bodies[joint.child].name
                )));
            }
            parent_joint[joint.child] = Some(j);
            if joint.origin.len() != space_dim {
                return Err(FwpError::Dimension(format!(
                    "joint `{}` origin has {} entries, expected {space_dim}",
                    joint.name,
                    joint.origin.len()
                )));
            }
            match (&joint.orientation, base) {
                (FrameRotation::Planar(_), BaseType::Planar3)
                | (FrameRotation::Spatial(_), BaseType::Spatial6) => {}
                _ => {
                    return Err(FwpError::InvalidInput(format!(
                        "joint `{}` orientation kind does not match the base type",
                        joint.name
                    )));
                }
            }
            let need_axis = base.spatial() || joint.kind == JointKind::Prismatic;
            if need_axis {
                if joint.axis.len() != space_dim {
                    return Err(FwpError::Dimension(format!(
                        "joint `{}` axis has {} entries, expected {space_dim}",
                        joint.name,
                        joint.axis.len()
                    )));
                }
                if joint.axis.norm() < 1e-9 {
                    return Err(FwpError::InvalidInput(format!(
                        "joint `{}` axis is zero",
                        joint.name
                    )));
                }
            }
        }
        for (i, body) in bodies.iter().enumerate().skip(1) {
            if parent_joint[i].is_none() {
                return Err(FwpError::InvalidInput(format!(
                    "body `{}` is not connected to the tree",
                    body.name
                )));
            }
        }

        // Depth-check also catches cycles.
        let mut depth = vec![usize::MAX; nb];
        depth[0] = 0;
        for i in 1..nb {
            let mut steps = 0;
            let mut at = i;
            while at != 0 {
                let j = parent_joint[at].expect("checked above");
                at = joints[j].parent;
                steps += 1;
                if steps > nb {
                    return Err(FwpError::InvalidInput(
                        "kinematic tree contains a cycle".into(),
                    ));
                }
            }
            depth[i] = steps;
        }

        let mut joint_order: Vec<usize> = (0..joints.len()).collect();
        joint_order.sort_by_key(|&j| depth[joints[j].child]);

        for act in &actuated {
            if act.joint >= joints.len() {
                return Err(FwpError::InvalidInput(format!(
                    "actuated joint index {} out of range",
                    act.joint
                )));
            }
            if !(act.lower < 0.0 && 0.0 < act.upper) {
                return Err(FwpError::InvalidInput(format!(
                    "joint `{}` limits must satisfy lower < 0 < upper",
                    joints[act.joint].name
                )));
            }
        }
        let mut seen = vec![false; joints.len()];
        for act in &actuated {
            if seen[act.joint] {
                return Err(FwpError::InvalidInput(format!(
                    "joint `{}` is listed as actuated twice",
                    joints[act.joint].name
                )));
            }
            seen[act.joint] = true;
        }

        for cp in &contact_points {
            if cp.body >= nb {
                return Err(FwpError::InvalidInput(format!(
                    "contact point `{}` references a body out of range",
                    cp.name
                )));
            }
            if cp.point.len() != space_dim {
                return Err(FwpError::Dimension(format!(
                    "contact point `{}` has {} coordinates, expected {space_dim}",
                    cp.name,
                    cp.point.len()
                )));
            }
        }

        // DoF indices along the path from the base to each body: the base
        // block first, then the joints in root-to-leaf order.
        let base_dofs = base.dofs();
        let mut path_dofs: Vec<Vec<usize>> = vec![Vec::new(); nb];
        for i in 0..nb {
            let mut chain = Vec::new();
            let mut at = i;
            while at != 0 {
                let j = parent_joint[at].expect("tree validated");
                chain.push(base_dofs + j);
                at = joints[j].parent;
            }
            let mut dofs: Vec<usize> = (0..base_dofs).collect();
            dofs.extend(chain.into_iter().rev());
            path_dofs[i] = dofs;
        }

        Ok(RobotModel {
            base,
            bodies,
            joints,
            actuated,
            contact_points,
            joint_order,
            parent_joint,
            path_dofs,
        })
    }

    pub fn num_joints(&self) -> usize {
        self.joints.len()
    }

    /// Velocity dimension `n_v`.
    pub fn nv(&self) -> usize {
        self.base.dofs() + self.joints.len()
    }

    /// Configuration dimension `n_q` (one more than `n_v` for a quaternion
    /// base).
    pub fn nq(&self) -> usize {
        match self.base {
            BaseType::Planar3 => self.nv(),
            BaseType::Spatial6 => self.nv() + 1,
        }
    }

    pub fn num_actuators(&self) -> usize {
        self.actuated.len()
    }

    /// Selector matrix mapping actuator inputs into generalized forces.
    pub fn selector(&self) -> nalgebra::DMatrix<f64> {
        let mut s = nalgebra::DMatrix::zeros(self.nv(), self.actuated.len());
        for (r, act) in self.actuated.iter().enumerate() {
            s[(self.base.dofs() + act.joint, r)] = 1.0;
        }
        s
    }

    pub fn actuation_limits(&self) -> Result<ActuationLimits, FwpError> {
        ActuationLimits::new(
            self.actuated.iter().map(|a| a.lower).collect(),
            self.actuated.iter().map(|a| a.upper).collect(),
        )
    }

    pub fn contact_point(&self, name: &str) -> Result<&ContactPointDef, FwpError> {
        self.contact_points
            .iter()
            .find(|cp| cp.name == name)
            .ok_or_else(|| FwpError::UnknownContact(name.to_string()))
    }

    pub fn body_index(&self, name: &str) -> Option<usize> {
        self.bodies.iter().position(|b| b.name == name)
    }

    pub fn joint_index(&self, name: &str) -> Option<usize> {
        self.joints.iter().position(|j| j.name == name)
    }

    /// A copy of the model with one joint moved out of the actuated set.
    pub fn with_passive_joint(&self, joint_name: &str) -> Result<RobotModel, FwpError> {
        let idx = self
            .joint_index(joint_name)
            .ok_or_else(|| FwpError::InvalidInput(format!("unknown joint `{joint_name}`")))?;
        let actuated = self
            .actuated
            .iter()
            .filter(|a| a.joint != idx)
            .cloned()
            .collect();
        RobotModel::new(
            self.base,
            self.bodies.clone(),
            self.joints.clone(),
            actuated,
            self.contact_points.clone(),
        )
    }
}

/// Configuration and velocity of the full system.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotState {
    pub q: DVector<f64>,
    pub v: DVector<f64>,
}

impl RobotState {
    pub fn new(q: DVector<f64>, v: DVector<f64>) -> Self {
        RobotState { q, v }
    }

    pub fn zero(model: &RobotModel) -> Self {
        let mut q = DVector::zeros(model.nq());
        if model.base == BaseType::Spatial6 {
            q[3] = 1.0; // identity quaternion, w first
        }
        RobotState {
            q,
            v: DVector::zeros(model.nv()),
        }
    }

    pub fn validate(&self, model: &RobotModel) -> Result<(), FwpError> {
        if self.q.len() != model.nq() {
            return Err(FwpError::Dimension(format!(
                "q has {} entries, expected {}",
                self.q.len(),
                model.nq()
            )));
        }
        if self.v.len() != model.nv() {
            return Err(FwpError::Dimension(format!(
                "v has {} entries, expected {}",
                self.v.len(),
                model.nv()
            )));
        }
        if model.base == BaseType::Spatial6 {
            let norm = self.q.rows(3, 4).norm();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(FwpError::InvalidInput(format!(
                    "base quaternion norm {norm} deviates from 1 by more than 1e-9"
                )));
            }
        }
        Ok(())
    }
}
