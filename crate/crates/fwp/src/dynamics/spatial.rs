//! Spatial floating-base dynamics in world-frame spatial algebra.
//!
//! Twists are `(omega, v)` with `v` the velocity of the body-fixed point at
//! the world origin; wrenches are `(torque about origin, force)`. The base
//! configuration is position plus a unit quaternion (w, x, y, z); base
//! velocities are world-aligned linear then angular components.

use nalgebra::{DMatrix, DVector, Matrix3, Matrix6, Quaternion, UnitQuaternion, Vector3, Vector6};

use super::model::{FrameRotation, JointKind, RobotModel, RotationalInertia};
use crate::FwpError;

fn skew(a: Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// Spatial motion vector `(omega, v_origin)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Twist3 {
    pub ang: Vector3<f64>,
    pub lin: Vector3<f64>,
}

impl Twist3 {
    const ZERO: Twist3 = Twist3 {
        ang: Vector3::new(0.0, 0.0, 0.0),
        lin: Vector3::new(0.0, 0.0, 0.0),
    };

    fn scaled(self, s: f64) -> Twist3 {
        Twist3 {
            ang: self.ang * s,
            lin: self.lin * s,
        }
    }

    fn add(self, o: Twist3) -> Twist3 {
        Twist3 {
            ang: self.ang + o.ang,
            lin: self.lin + o.lin,
        }
    }

    fn crm(self, o: Twist3) -> Twist3 {
        Twist3 {
            ang: self.ang.cross(&o.ang),
            lin: self.ang.cross(&o.lin) + self.lin.cross(&o.ang),
        }
    }

    fn point_velocity(self, p: Vector3<f64>) -> Vector3<f64> {
        self.lin + self.ang.cross(&p)
    }

    fn to_vector(self) -> Vector6<f64> {
        Vector6::new(
            self.ang.x, self.ang.y, self.ang.z, self.lin.x, self.lin.y, self.lin.z,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Wrench3 {
    ang: Vector3<f64>,
    lin: Vector3<f64>,
}

impl Wrench3 {
    fn add(self, o: Wrench3) -> Wrench3 {
        Wrench3 {
            ang: self.ang + o.ang,
            lin: self.lin + o.lin,
        }
    }

    fn from_vector(x: Vector6<f64>) -> Wrench3 {
        Wrench3 {
            ang: Vector3::new(x[0], x[1], x[2]),
            lin: Vector3::new(x[3], x[4], x[5]),
        }
    }
}

fn crf(v: Twist3, f: Wrench3) -> Wrench3 {
    Wrench3 {
        ang: v.ang.cross(&f.ang) + v.lin.cross(&f.lin),
        lin: v.ang.cross(&f.lin),
    }
}

fn dot(s: Twist3, f: Wrench3) -> f64 {
    s.ang.dot(&f.ang) + s.lin.dot(&f.lin)
}

/// 6x6 spatial inertia at the world origin for a body with CoM `c` and
/// rotational inertia `i_com` (both world frame).
fn spatial_inertia(mass: f64, c: Vector3<f64>, i_com: Matrix3<f64>) -> Matrix6<f64> {
    let cx = skew(c);
    let mut out = Matrix6::zeros();
    out.fixed_view_mut::<3, 3>(0, 0)
        .copy_from(&(i_com - mass * cx * cx));
    out.fixed_view_mut::<3, 3>(0, 3).copy_from(&(mass * cx));
    out.fixed_view_mut::<3, 3>(3, 0).copy_from(&(-mass * cx));
    out.fixed_view_mut::<3, 3>(3, 3)
        .copy_from(&(Matrix3::identity() * mass));
    out
}

fn apply_inertia(i: &Matrix6<f64>, v: Twist3) -> Wrench3 {
    Wrench3::from_vector(i * v.to_vector())
}

pub(crate) struct SpatialKinematics {
    pub rot: Vec<Matrix3<f64>>,
    pub pos: Vec<Vector3<f64>>,
    pub twist: Vec<Twist3>,
    pub accel_bias: Vec<Twist3>,
    pub subspace: Vec<Twist3>,
}

pub(crate) fn base_quaternion(q: &DVector<f64>) -> UnitQuaternion<f64> {
    UnitQuaternion::from_quaternion(Quaternion::new(q[3], q[4], q[5], q[6]))
}

pub(crate) fn kinematics(
    model: &RobotModel,
    q: &DVector<f64>,
    v: &DVector<f64>,
) -> SpatialKinematics {
    let nb = model.bodies.len();
    let nv = model.nv();
    let base_pos = Vector3::new(q[0], q[1], q[2]);
    let base_rot = base_quaternion(q).to_rotation_matrix().into_inner();

    let mut rots = vec![Matrix3::identity(); nb];
    let mut poss = vec![Vector3::zeros(); nb];
    rots[0] = base_rot;
    poss[0] = base_pos;

    let mut subspace = vec![Twist3::ZERO; nv];
    for k in 0..3 {
        let mut e = Vector3::zeros();
        e[k] = 1.0;
        subspace[k] = Twist3 {
            ang: Vector3::zeros(),
            lin: e,
        };
        subspace[3 + k] = Twist3 {
            ang: e,
            lin: base_pos.cross(&e),
        };
    }

    let mut twist = vec![Twist3::ZERO; nb];
    let base_lin = Vector3::new(v[0], v[1], v[2]);
    let base_ang = Vector3::new(v[3], v[4], v[5]);
    twist[0] = Twist3 {
        ang: base_ang,
        lin: base_lin + base_pos.cross(&base_ang),
    };

    let mut accel = vec![Twist3::ZERO; nb];
    // Only the angular base columns depend on the configuration; their time
    // derivative contributes (0, xdot_b x omega).
    accel[0] = Twist3 {
        ang: Vector3::zeros(),
        lin: base_lin.cross(&base_ang),
    };

    for &j in &model.joint_order {
        let joint = &model.joints[j];
        let parent = joint.parent;
        let child = joint.child;
        let qj = q[7 + j];
        let vj = v[6 + j];

        let fixed_rot = match &joint.orientation {
            FrameRotation::Spatial(quat) => quat.to_rotation_matrix().into_inner(),
            FrameRotation::Planar(_) => unreachable!("validated spatial"),
        };
        let joint_rot = rots[parent] * fixed_rot;
        let joint_pos =
            poss[parent] + rots[parent] * Vector3::new(joint.origin[0], joint.origin[1], joint.origin[2]);
        let axis_local =
            Vector3::new(joint.axis[0], joint.axis[1], joint.axis[2]).normalize();
        let axis_world = joint_rot * axis_local;

        let s = match joint.kind {
            JointKind::Revolute => {
                let motion = UnitQuaternion::from_axis_angle(
                    &nalgebra::Unit::new_normalize(axis_local),
                    qj,
                )
                .to_rotation_matrix()
                .into_inner();
                rots[child] = joint_rot * motion;
                poss[child] = joint_pos;
                Twist3 {
                    ang: axis_world,
                    lin: joint_pos.cross(&axis_world),
                }
            }
            JointKind::Prismatic => {
                rots[child] = joint_rot;
                poss[child] = joint_pos + axis_world * qj;
                Twist3 {
                    ang: Vector3::zeros(),
                    lin: axis_world,
                }
            }
        };
        subspace[6 + j] = s;
        twist[child] = twist[parent].add(s.scaled(vj));
        accel[child] = accel[parent].add(twist[parent].crm(s.scaled(vj)));
    }

    SpatialKinematics {
        rot: rots,
        pos: poss,
        twist,
        accel_bias: accel,
        subspace,
    }
}

fn body_com_world(model: &RobotModel, kin: &SpatialKinematics, b: usize) -> Vector3<f64> {
    let body = &model.bodies[b];
    kin.pos[b] + kin.rot[b] * Vector3::new(body.com[0], body.com[1], body.com[2])
}

fn body_inertia_world(model: &RobotModel, kin: &SpatialKinematics, b: usize) -> Matrix3<f64> {
    match &model.bodies[b].inertia {
        RotationalInertia::Spatial(i) => kin.rot[b] * i * kin.rot[b].transpose(),
        RotationalInertia::Planar(_) => unreachable!("validated spatial"),
    }
}

pub(crate) fn mass_matrix(model: &RobotModel, q: &DVector<f64>) -> DMatrix<f64> {
    let kin = kinematics(model, q, &DVector::zeros(model.nv()));
    let nb = model.bodies.len();
    let nv = model.nv();

    let mut composite: Vec<Matrix6<f64>> = (0..nb)
        .map(|b| {
            spatial_inertia(
                model.bodies[b].mass,
                body_com_world(model, &kin, b),
                body_inertia_world(model, &kin, b),
            )
        })
        .collect();
    for &j in model.joint_order.iter().rev() {
        let joint = &model.joints[j];
        let child_inertia = composite[joint.child];
        composite[joint.parent] += child_inertia;
    }

    let mut m = DMatrix::zeros(nv, nv);
    let body_of_dof = |i: usize| -> usize {
        if i < 6 {
            0
        } else {
            model.joints[i - 6].child
        }
    };
    for i in 0..nv {
        let b = body_of_dof(i);
        let f = apply_inertia(&composite[b], kin.subspace[i]);
        for &jdof in &model.path_dofs[b] {
            m[(jdof, i)] = dot(kin.subspace[jdof], f);
            m[(i, jdof)] = m[(jdof, i)];
        }
    }
    m
}

pub(crate) fn bias_forces(
    model: &RobotModel,
    q: &DVector<f64>,
    v: &DVector<f64>,
    gravity: Vector3<f64>,
) -> DVector<f64> {
    let kin = kinematics(model, q, v);
    let nb = model.bodies.len();
    let nv = model.nv();

    let grav = Twist3 {
        ang: Vector3::zeros(),
        lin: -gravity,
    };

    let mut wrench: Vec<Wrench3> = (0..nb)
        .map(|b| {
            let inertia = spatial_inertia(
                model.bodies[b].mass,
                body_com_world(model, &kin, b),
                body_inertia_world(model, &kin, b),
            );
            let momentum = apply_inertia(&inertia, kin.twist[b]);
            apply_inertia(&inertia, kin.accel_bias[b].add(grav)).add(crf(kin.twist[b], momentum))
        })
        .collect();

    for &j in model.joint_order.iter().rev() {
        let joint = &model.joints[j];
        let child_wrench = wrench[joint.child];
        wrench[joint.parent] = wrench[joint.parent].add(child_wrench);
    }

    let mut h = DVector::zeros(nv);
    for i in 0..6 {
        h[i] = dot(kin.subspace[i], wrench[0]);
    }
    for j in 0..model.joints.len() {
        h[6 + j] = dot(kin.subspace[6 + j], wrench[model.joints[j].child]);
    }
    h
}

pub(crate) fn com(model: &RobotModel, q: &DVector<f64>) -> Vector3<f64> {
    let kin = kinematics(model, q, &DVector::zeros(model.nv()));
    let mut total_mass = 0.0;
    let mut weighted = Vector3::zeros();
    for b in 0..model.bodies.len() {
        let m = model.bodies[b].mass;
        total_mass += m;
        weighted += m * body_com_world(model, &kin, b);
    }
    weighted / total_mass
}

pub(crate) fn kinetic_energy(model: &RobotModel, q: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let kin = kinematics(model, q, v);
    let mut ke = 0.0;
    for b in 0..model.bodies.len() {
        let c = body_com_world(model, &kin, b);
        let v_com = kin.twist[b].point_velocity(c);
        let omega = kin.twist[b].ang;
        let i_w = body_inertia_world(model, &kin, b);
        ke += 0.5 * model.bodies[b].mass * v_com.norm_squared()
            + 0.5 * omega.dot(&(i_w * omega));
    }
    ke
}

pub(crate) fn point_kinematics(
    model: &RobotModel,
    q: &DVector<f64>,
    v: &DVector<f64>,
    body: usize,
    local: Vector3<f64>,
) -> (Vector3<f64>, DMatrix<f64>, Vector3<f64>) {
    let kin = kinematics(model, q, v);
    let p = kin.pos[body] + kin.rot[body] * local;

    let mut jac = DMatrix::zeros(3, model.nv());
    for &dof in &model.path_dofs[body] {
        let s = kin.subspace[dof];
        let col = s.point_velocity(p);
        for r in 0..3 {
            jac[(r, dof)] = col[r];
        }
    }

    let tw = kin.twist[body];
    let acc = kin.accel_bias[body];
    let v_p = tw.point_velocity(p);
    let a_p = acc.lin + acc.ang.cross(&p) + tw.ang.cross(&v_p);
    (p, jac, a_p)
}

pub(crate) fn gravity_from(g: &DVector<f64>) -> Result<Vector3<f64>, FwpError> {
    if g.len() != 3 {
        return Err(FwpError::Dimension(format!(
            "spatial gravity must have 3 components, got {}",
            g.len()
        )));
    }
    Ok(Vector3::new(g[0], g[1], g[2]))
}
