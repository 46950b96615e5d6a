//! Scenario files: a self-describing JSON schema (SI units) bundling the
//! robot model, its state, the active contacts with their environment
//! frames, gravity, and pipeline options. Shipped fixtures live under
//! `fixtures/` in the repository root.

use nalgebra::{DMatrix, DVector, Matrix3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::contact::ActuationLimits;
use crate::dynamics::{
    ActuatedJoint, BaseType, Body, ContactPointDef, FrameRotation, Joint, JointKind, RobotModel,
    RobotState, RotationalInertia,
};
use crate::wrench::{ActiveContact, ContactSet, FwpOptions, SubsetSelection};
use crate::{FwpError, Tolerances};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub version: u32,
    pub base: BaseKind,
    pub gravity: Vec<f64>,
    pub bodies: Vec<BodySpec>,
    pub joints: Vec<JointSpec>,
    #[serde(default)]
    pub actuated: Vec<ActuatedSpec>,
    #[serde(default)]
    pub contact_points: Vec<ContactPointSpec>,
    pub state: StateSpec,
    pub contacts: Vec<ContactSpec>,
    #[serde(default)]
    pub options: OptionsSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    Planar,
    Spatial,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BodySpec {
    pub name: String,
    pub mass: f64,
    pub com: Vec<f64>,
    pub inertia: InertiaSpec,
}

/// Rotational inertia: a scalar for planar bodies; principal moments or a
/// full symmetric matrix for spatial ones.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InertiaSpec {
    Scalar(f64),
    Diagonal([f64; 3]),
    Full([[f64; 3]; 3]),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JointSpec {
    pub name: String,
    pub parent: String,
    pub child: String,
    #[serde(rename = "type")]
    pub kind: JointKindSpec,
    pub origin: Vec<f64>,
    /// Planar: rotation angle of the joint frame in the parent frame.
    #[serde(default)]
    pub rotation: f64,
    /// Spatial: roll-pitch-yaw of the joint frame in the parent frame.
    #[serde(default)]
    pub rpy: Option<[f64; 3]>,
    /// Motion axis in the joint frame. Optional for planar revolute joints.
    #[serde(default)]
    pub axis: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointKindSpec {
    Revolute,
    Prismatic,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActuatedSpec {
    pub joint: String,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContactPointSpec {
    pub name: String,
    pub body: String,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSpec {
    /// Planar: `[x, z, theta]`. Spatial: `[x, y, z, qw, qx, qy, qz]`.
    pub base_pose: Vec<f64>,
    #[serde(default)]
    pub joint_positions: Vec<f64>,
    #[serde(default)]
    pub base_velocity: Option<Vec<f64>>,
    #[serde(default)]
    pub joint_velocities: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContactSpec {
    pub name: String,
    pub mu: f64,
    /// Environment normal in world coordinates.
    pub normal: Vec<f64>,
    /// First tangent; derived deterministically when absent.
    #[serde(default)]
    pub tangent: Option<Vec<f64>>,
    /// Environment-frame origin; informational (defaults to the contact
    /// point's world position).
    #[serde(default)]
    pub origin: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct OptionsSpec {
    #[serde(default)]
    pub force_cap: Option<f64>,
    /// "all" or a list of subset bitmasks.
    #[serde(default)]
    pub subsets: Option<SubsetsSpec>,
    #[serde(default)]
    pub naive: bool,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
    #[serde(default)]
    pub max_enumerated_contacts: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubsetsSpec {
    All(String),
    Masks(Vec<u32>),
}

/// Everything the pipeline needs, resolved and validated.
#[derive(Debug, Clone)]
pub struct BuiltScenario {
    pub model: RobotModel,
    pub state: RobotState,
    pub contacts: ContactSet,
    pub limits: ActuationLimits,
    pub gravity: DVector<f64>,
    pub options: FwpOptions,
}

impl Scenario {
    pub fn from_str(text: &str) -> Result<Scenario, FwpError> {
        serde_json::from_str(text)
            .map_err(|e| FwpError::schema("<document>", e.to_string()))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Scenario, FwpError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FwpError::schema("<file>", format!("{}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    /// Validate the schema and resolve names into a runnable scenario.
    pub fn build(&self) -> Result<BuiltScenario, FwpError> {
        if self.version != SCHEMA_VERSION {
            return Err(FwpError::schema(
                "version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.version),
            ));
        }
        let base = match self.base {
            BaseKind::Planar => BaseType::Planar3,
            BaseKind::Spatial => BaseType::Spatial6,
        };
        let dim = base.contact_dim();

        if self.gravity.len() != dim {
            return Err(FwpError::schema(
                "gravity",
                format!("expected {dim} components, got {}", self.gravity.len()),
            ));
        }

        let mut bodies = Vec::with_capacity(self.bodies.len());
        for (i, spec) in self.bodies.iter().enumerate() {
            let path = format!("bodies[{i}]");
            if spec.com.len() != dim {
                return Err(FwpError::schema(
                    format!("{path}.com"),
                    format!("expected {dim} components, got {}", spec.com.len()),
                ));
            }
            let inertia = match (&spec.inertia, base) {
                (InertiaSpec::Scalar(izz), BaseType::Planar3) => RotationalInertia::Planar(*izz),
                (InertiaSpec::Scalar(_), BaseType::Spatial6) => {
                    return Err(FwpError::schema(
                        format!("{path}.inertia"),
                        "spatial bodies need principal moments or a 3x3 matrix",
                    ));
                }
                (InertiaSpec::Diagonal(d), BaseType::Spatial6) => RotationalInertia::Spatial(
                    Matrix3::from_diagonal(&Vector3::new(d[0], d[1], d[2])),
                ),
                (InertiaSpec::Full(m), BaseType::Spatial6) => {
                    RotationalInertia::Spatial(Matrix3::from_fn(|r, c| m[r][c]))
                }
                (_, BaseType::Planar3) => {
                    return Err(FwpError::schema(
                        format!("{path}.inertia"),
                        "planar bodies take a scalar inertia",
                    ));
                }
            };
            bodies.push(Body {
                name: spec.name.clone(),
                mass: spec.mass,
                com: DVector::from_vec(spec.com.clone()),
                inertia,
            });
        }

        let body_index = |name: &str, path: &str| -> Result<usize, FwpError> {
            bodies
                .iter()
                .position(|b| b.name == name)
                .ok_or_else(|| FwpError::schema(path, format!("unknown body `{name}`")))
        };

        let mut joints = Vec::with_capacity(self.joints.len());
        for (i, spec) in self.joints.iter().enumerate() {
            let path = format!("joints[{i}]");
            let parent = body_index(&spec.parent, &format!("{path}.parent"))?;
            let child = body_index(&spec.child, &format!("{path}.child"))?;
            if spec.origin.len() != dim {
                return Err(FwpError::schema(
                    format!("{path}.origin"),
                    format!("expected {dim} components, got {}", spec.origin.len()),
                ));
            }
            let kind = match spec.kind {
                JointKindSpec::Revolute => JointKind::Revolute,
                JointKindSpec::Prismatic => JointKind::Prismatic,
            };
            let orientation = match base {
                BaseType::Planar3 => FrameRotation::Planar(spec.rotation),
                BaseType::Spatial6 => {
                    let [r, p, y] = spec.rpy.unwrap_or([0.0; 3]);
                    FrameRotation::Spatial(UnitQuaternion::from_euler_angles(r, p, y))
                }
            };
            let axis = match &spec.axis {
                Some(a) => {
                    if a.len() != dim {
                        return Err(FwpError::schema(
                            format!("{path}.axis"),
                            format!("expected {dim} components, got {}", a.len()),
                        ));
                    }
                    DVector::from_vec(a.clone())
                }
                None => {
                    if base == BaseType::Spatial6 || kind == JointKind::Prismatic {
                        return Err(FwpError::schema(
                            format!("{path}.axis"),
                            "this joint type requires an explicit axis",
                        ));
                    }
                    DVector::zeros(2)
                }
            };
            joints.push(Joint {
                name: spec.name.clone(),
                parent,
                child,
                kind,
                axis,
                origin: DVector::from_vec(spec.origin.clone()),
                orientation,
            });
        }

        let mut actuated = Vec::with_capacity(self.actuated.len());
        for (i, spec) in self.actuated.iter().enumerate() {
            let path = format!("actuated[{i}]");
            let joint = joints
                .iter()
                .position(|j| j.name == spec.joint)
                .ok_or_else(|| {
                    FwpError::schema(format!("{path}.joint"), format!("unknown joint `{}`", spec.joint))
                })?;
            actuated.push(ActuatedJoint {
                joint,
                lower: spec.min,
                upper: spec.max,
            });
        }

        let mut contact_points = Vec::with_capacity(self.contact_points.len());
        for (i, spec) in self.contact_points.iter().enumerate() {
            let path = format!("contact_points[{i}]");
            let body = body_index(&spec.body, &format!("{path}.body"))?;
            if spec.point.len() != dim {
                return Err(FwpError::schema(
                    format!("{path}.point"),
                    format!("expected {dim} components, got {}", spec.point.len()),
                ));
            }
            contact_points.push(ContactPointDef {
                name: spec.name.clone(),
                body,
                point: DVector::from_vec(spec.point.clone()),
            });
        }

        let model = RobotModel::new(base, bodies, joints, actuated, contact_points)
            .map_err(|e| FwpError::schema("model", e.to_string()))?;

        // State.
        let base_pose_len = match base {
            BaseType::Planar3 => 3,
            BaseType::Spatial6 => 7,
        };
        if self.state.base_pose.len() != base_pose_len {
            return Err(FwpError::schema(
                "state.base_pose",
                format!(
                    "expected {base_pose_len} entries, got {}",
                    self.state.base_pose.len()
                ),
            ));
        }
        if self.state.joint_positions.len() != model.num_joints() {
            return Err(FwpError::schema(
                "state.joint_positions",
                format!(
                    "expected {} entries, got {}",
                    model.num_joints(),
                    self.state.joint_positions.len()
                ),
            ));
        }
        let mut q = DVector::zeros(model.nq());
        for (i, &x) in self.state.base_pose.iter().enumerate() {
            q[i] = x;
        }
        for (j, &x) in self.state.joint_positions.iter().enumerate() {
            q[base_pose_len + j] = x;
        }
        let base_dofs = base.dofs();
        let mut v = DVector::zeros(model.nv());
        if let Some(bv) = &self.state.base_velocity {
            if bv.len() != base_dofs {
                return Err(FwpError::schema(
                    "state.base_velocity",
                    format!("expected {base_dofs} entries, got {}", bv.len()),
                ));
            }
            for (i, &x) in bv.iter().enumerate() {
                v[i] = x;
            }
        }
        if let Some(jv) = &self.state.joint_velocities {
            if jv.len() != model.num_joints() {
                return Err(FwpError::schema(
                    "state.joint_velocities",
                    format!("expected {} entries, got {}", model.num_joints(), jv.len()),
                ));
            }
            for (j, &x) in jv.iter().enumerate() {
                v[base_dofs + j] = x;
            }
        }
        let state = RobotState::new(q, v);
        state
            .validate(&model)
            .map_err(|e| FwpError::schema("state", e.to_string()))?;

        // Contacts.
        let mut active = Vec::with_capacity(self.contacts.len());
        for (i, spec) in self.contacts.iter().enumerate() {
            let path = format!("contacts[{i}]");
            model
                .contact_point(&spec.name)
                .map_err(|_| {
                    FwpError::schema(
                        format!("{path}.name"),
                        format!("contact point `{}` is not defined in the model", spec.name),
                    )
                })?;
            if !(spec.mu >= 0.0) {
                return Err(FwpError::schema(
                    format!("{path}.mu"),
                    "friction coefficient must be non-negative",
                ));
            }
            let rotation = contact_rotation(base, &spec.normal, spec.tangent.as_deref())
                .map_err(|msg| FwpError::schema(format!("{path}.normal"), msg))?;
            active.push(ActiveContact {
                name: spec.name.clone(),
                rotation,
                mu: spec.mu,
            });
        }

        let limits = model.actuation_limits()?;
        let gravity = DVector::from_vec(self.gravity.clone());

        let mut options = FwpOptions {
            tolerances: self.options.tolerances.unwrap_or_default(),
            force_cap: self.options.force_cap,
            naive: self.options.naive,
            ..FwpOptions::default()
        };
        if let Some(cap) = self.options.max_enumerated_contacts {
            options.max_enumerated_contacts = cap;
        }
        options.subsets = match &self.options.subsets {
            None => SubsetSelection::All,
            Some(SubsetsSpec::All(word)) => {
                if word != "all" {
                    return Err(FwpError::schema(
                        "options.subsets",
                        format!("expected \"all\" or a list of bitmasks, got \"{word}\""),
                    ));
                }
                SubsetSelection::All
            }
            Some(SubsetsSpec::Masks(masks)) => SubsetSelection::Explicit(masks.clone()),
        };

        Ok(BuiltScenario {
            model,
            state,
            contacts: ContactSet::new(active),
            limits,
            gravity,
            options,
        })
    }
}

/// Build the world-from-contact rotation from a normal and optional tangent.
/// Planar frames take the tangent 90 degrees clockwise from the normal, so
/// `(tangent, normal)` is right-handed; spatial frames complete `tangent1`
/// with `tangent2 = normal x tangent1`.
pub fn contact_rotation(
    base: BaseType,
    normal: &[f64],
    tangent: Option<&[f64]>,
) -> Result<DMatrix<f64>, String> {
    let dim = base.contact_dim();
    if normal.len() != dim {
        return Err(format!("normal must have {dim} components"));
    }
    let n = DVector::from_row_slice(normal);
    let norm = n.norm();
    if norm < 1e-12 {
        return Err("normal vector is zero".into());
    }
    let n = n / norm;
    match base {
        BaseType::Planar3 => {
            let t = match tangent {
                Some(t) => {
                    if t.len() != 2 {
                        return Err("tangent must have 2 components".into());
                    }
                    let t = DVector::from_row_slice(t);
                    let t = t.clone() / t.norm();
                    if t.dot(&n).abs() > 1e-8 {
                        return Err("tangent is not orthogonal to the normal".into());
                    }
                    t
                }
                None => DVector::from_vec(vec![n[1], -n[0]]),
            };
            let mut rot = DMatrix::zeros(2, 2);
            rot[(0, 0)] = t[0];
            rot[(1, 0)] = t[1];
            rot[(0, 1)] = n[0];
            rot[(1, 1)] = n[1];
            if rot.determinant() < 0.0 {
                return Err("contact frame is left-handed; flip the tangent".into());
            }
            Ok(rot)
        }
        BaseType::Spatial6 => {
            let n3 = Vector3::new(n[0], n[1], n[2]);
            let t1 = match tangent {
                Some(t) => {
                    if t.len() != 3 {
                        return Err("tangent must have 3 components".into());
                    }
                    let t = Vector3::new(t[0], t[1], t[2]);
                    let t = t / t.norm();
                    if t.dot(&n3).abs() > 1e-8 {
                        return Err("tangent is not orthogonal to the normal".into());
                    }
                    t
                }
                None => {
                    // Deterministic completion: cross with the axis least
                    // aligned with the normal.
                    let seed = if n3.x.abs() < 0.9 {
                        Vector3::x()
                    } else {
                        Vector3::y()
                    };
                    (seed - n3 * seed.dot(&n3)).normalize()
                }
            };
            let t2 = n3.cross(&t1);
            let mut rot = DMatrix::zeros(3, 3);
            for r in 0..3 {
                rot[(r, 0)] = t1[r];
                rot[(r, 1)] = t2[r];
                rot[(r, 2)] = n3[r];
            }
            Ok(rot)
        }
    }
}
