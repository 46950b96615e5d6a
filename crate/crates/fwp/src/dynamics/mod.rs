//! Floating-base rigid-body dynamics for planar and spatial kinematic trees:
//! composite-rigid-body mass matrix, recursive Newton-Euler bias forces,
//! contact-point kinematics, and a contact-constrained forward-dynamics
//! solve used as an independent oracle by the wrench pipeline.

mod model;
mod planar;
mod spatial;

pub use model::{
    ActuatedJoint, BaseType, Body, ContactPointDef, FrameRotation, Joint, JointKind, RobotModel,
    RobotState, RotationalInertia,
};

use nalgebra::{DMatrix, DVector, UnitQuaternion, Vector2, Vector3};

use crate::FwpError;

/// Kinematics of one contact point, expressed in its environment frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactPointKinematics {
    pub position_world: DVector<f64>,
    /// Columns are the environment tangent axes followed by the normal.
    pub rotation_world_from_contact: DMatrix<f64>,
    /// Maps generalized velocities to the contact-point velocity in the
    /// contact frame (tangential components first, normal last).
    pub jacobian_contact_frame: DMatrix<f64>,
    /// Contact-frame point acceleration under zero generalized acceleration.
    pub bias_accel_contact_frame: DVector<f64>,
}

impl ContactPointKinematics {
    /// Contact-point velocity in the contact frame.
    pub fn velocity(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.jacobian_contact_frame * v
    }
}

/// Composite-rigid-body mass matrix; symmetric positive definite for any
/// valid state.
pub fn mass_matrix(model: &RobotModel, q: &DVector<f64>) -> Result<DMatrix<f64>, FwpError> {
    check_q(model, q)?;
    Ok(match model.base {
        BaseType::Planar3 => planar::mass_matrix(model, q),
        BaseType::Spatial6 => spatial::mass_matrix(model, q),
    })
}

/// Generalized forces from gravity and velocity effects, with the sign
/// convention `M vdot + h = S_a u + tau_e`.
pub fn bias_forces(
    model: &RobotModel,
    q: &DVector<f64>,
    v: &DVector<f64>,
    gravity: &DVector<f64>,
) -> Result<DVector<f64>, FwpError> {
    check_qv(model, q, v)?;
    Ok(match model.base {
        BaseType::Planar3 => planar::bias_forces(model, q, v, planar::gravity_from(gravity)?),
        BaseType::Spatial6 => spatial::bias_forces(model, q, v, spatial::gravity_from(gravity)?),
    })
}

/// World position of the system center of mass.
pub fn com(model: &RobotModel, q: &DVector<f64>) -> Result<DVector<f64>, FwpError> {
    check_q(model, q)?;
    Ok(match model.base {
        BaseType::Planar3 => {
            let c = planar::com(model, q);
            DVector::from_vec(vec![c.x, c.y])
        }
        BaseType::Spatial6 => {
            let c = spatial::com(model, q);
            DVector::from_vec(vec![c.x, c.y, c.z])
        }
    })
}

/// Kinetic energy from per-body twists; an independent route against
/// `0.5 * v' M v`.
pub fn kinetic_energy(
    model: &RobotModel,
    q: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<f64, FwpError> {
    check_qv(model, q, v)?;
    Ok(match model.base {
        BaseType::Planar3 => planar::kinetic_energy(model, q, v),
        BaseType::Spatial6 => spatial::kinetic_energy(model, q, v),
    })
}

/// Contact-point kinematics for a named contact, in the environment frame
/// whose rotation (columns: tangents then normal) is supplied.
pub fn contact_kinematics(
    model: &RobotModel,
    q: &DVector<f64>,
    v: &DVector<f64>,
    contact: &str,
    rotation_world_from_contact: &DMatrix<f64>,
) -> Result<ContactPointKinematics, FwpError> {
    check_qv(model, q, v)?;
    let cp = model.contact_point(contact)?;
    let t = model.base.contact_dim();
    let rot = rotation_world_from_contact;
    if rot.nrows() != t || rot.ncols() != t {
        return Err(FwpError::Dimension(format!(
            "contact rotation must be {t}x{t}"
        )));
    }
    let orth = (rot.transpose() * rot - DMatrix::identity(t, t)).amax();
    if orth > 1e-8 || rot.determinant() < 0.0 {
        return Err(FwpError::InvalidInput(format!(
            "contact frame for `{contact}` is not a proper rotation"
        )));
    }

    let (p_w, jac_w, bias_w): (DVector<f64>, DMatrix<f64>, DVector<f64>) = match model.base {
        BaseType::Planar3 => {
            let (p, j, a) =
                planar::point_kinematics(model, q, v, cp.body, Vector2::new(cp.point[0], cp.point[1]));
            (
                DVector::from_vec(vec![p.x, p.y]),
                j,
                DVector::from_vec(vec![a.x, a.y]),
            )
        }
        BaseType::Spatial6 => {
            let (p, j, a) = spatial::point_kinematics(
                model,
                q,
                v,
                cp.body,
                Vector3::new(cp.point[0], cp.point[1], cp.point[2]),
            );
            (
                DVector::from_vec(vec![p.x, p.y, p.z]),
                j,
                DVector::from_vec(vec![a.x, a.y, a.z]),
            )
        }
    };

    Ok(ContactPointKinematics {
        position_world: p_w,
        rotation_world_from_contact: rot.clone(),
        jacobian_contact_frame: rot.transpose() * jac_w,
        bias_accel_contact_frame: rot.transpose() * bias_w,
    })
}

/// Solution of the stick-constrained equations of motion.
#[derive(Debug, Clone)]
pub struct ConstrainedDynamics {
    pub accel: DVector<f64>,
    /// Contact forces stacked per contact, in contact-frame coordinates.
    pub forces: Vec<DVector<f64>>,
    /// True when the block system was rank deficient and the solution is the
    /// least-squares fallback.
    pub rank_deficient: bool,
}

/// Solve the block system pairing the equations of motion with zero contact
/// acceleration:
///
/// ```text
/// [ M  -J' ] [vdot]   [ S_a u - h ]
/// [ J   0  ] [ f  ] = [ -Jdot v   ]
/// ```
pub fn constrained_forward_dynamics(
    model: &RobotModel,
    state: &RobotState,
    u: &DVector<f64>,
    contacts: &[ContactPointKinematics],
    gravity: &DVector<f64>,
) -> Result<ConstrainedDynamics, FwpError> {
    state.validate(model)?;
    if u.len() != model.num_actuators() {
        return Err(FwpError::Dimension(format!(
            "u has {} entries, model has {} actuators",
            u.len(),
            model.num_actuators()
        )));
    }
    let nv = model.nv();
    let t = model.base.contact_dim();
    let nk = contacts.len();
    let m = mass_matrix(model, &state.q)?;
    let h = bias_forces(model, &state.q, &state.v, gravity)?;
    let s_a = model.selector();

    let dim = nv + t * nk;
    let mut kkt = DMatrix::zeros(dim, dim);
    kkt.view_mut((0, 0), (nv, nv)).copy_from(&m);
    let mut rhs = DVector::zeros(dim);
    rhs.rows_mut(0, nv).copy_from(&(&s_a * u - &h));
    for (i, kin) in contacts.iter().enumerate() {
        let j = &kin.jacobian_contact_frame;
        if j.ncols() != nv || j.nrows() != t {
            return Err(FwpError::Dimension(format!(
                "contact {i} jacobian is {}x{}, expected {t}x{nv}",
                j.nrows(),
                j.ncols()
            )));
        }
        kkt.view_mut((0, nv + t * i), (nv, t))
            .copy_from(&(-j.transpose()));
        kkt.view_mut((nv + t * i, 0), (t, nv)).copy_from(j);
        rhs.rows_mut(nv + t * i, t)
            .copy_from(&(-&kin.bias_accel_contact_frame));
    }

    let lu = kkt.clone().full_piv_lu();
    let (solution, rank_deficient) = match lu.solve(&rhs) {
        Some(z) => {
            let residual = (&kkt * &z - &rhs).norm();
            if residual <= 1e-8 * (1.0 + rhs.norm()) {
                (z, false)
            } else {
                (least_squares(&kkt, &rhs), true)
            }
        }
        None => (least_squares(&kkt, &rhs), true),
    };

    let accel = solution.rows(0, nv).into_owned();
    let forces = (0..nk)
        .map(|i| solution.rows(nv + t * i, t).into_owned())
        .collect();
    Ok(ConstrainedDynamics {
        accel,
        forces,
        rank_deficient,
    })
}

fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    crate::linalg::thin_svd(a).solve_min_norm(b, 1e-12)
}

/// Advance the configuration along `v` for time `dt`. Planar states add
/// directly; spatial states integrate the quaternion with the world-frame
/// angular velocity. Intended for finite-difference checks.
pub fn integrate_state(
    model: &RobotModel,
    q: &DVector<f64>,
    v: &DVector<f64>,
    dt: f64,
) -> Result<DVector<f64>, FwpError> {
    check_qv(model, q, v)?;
    match model.base {
        BaseType::Planar3 => Ok(q + v * dt),
        BaseType::Spatial6 => {
            let mut out = q.clone();
            for k in 0..3 {
                out[k] += v[k] * dt;
            }
            let quat = spatial::base_quaternion(q);
            let omega = Vector3::new(v[3], v[4], v[5]);
            let delta = UnitQuaternion::from_scaled_axis(omega * dt);
            let next = delta * quat;
            out[3] = next.w;
            out[4] = next.i;
            out[5] = next.j;
            out[6] = next.k;
            for j in 0..model.num_joints() {
                out[7 + j] += v[6 + j] * dt;
            }
            Ok(out)
        }
    }
}

fn check_q(model: &RobotModel, q: &DVector<f64>) -> Result<(), FwpError> {
    let state = RobotState::new(q.clone(), DVector::zeros(model.nv()));
    state.validate(model)
}

fn check_qv(model: &RobotModel, q: &DVector<f64>, v: &DVector<f64>) -> Result<(), FwpError> {
    let state = RobotState::new(q.clone(), v.clone());
    state.validate(model)
}

#[cfg(test)]
pub(crate) mod testkit;
