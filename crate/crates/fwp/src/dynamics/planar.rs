//! Planar floating-base dynamics.
//!
//! Everything is carried in world-frame planar spatial vectors
//! `(omega, v)` where `v` is the velocity of the body-fixed point currently
//! at the world origin. Generalized coordinates are `(x, z, theta)` for the
//! base followed by the joint variables; the vertical axis is the second
//! coordinate and rotations are counterclockwise in the x-z plane.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Vector2};

use super::model::{FrameRotation, JointKind, RobotModel, RotationalInertia};
use crate::FwpError;

/// Rotate 90 degrees counterclockwise: the planar `omega x r` with unit rate.
fn perp(r: Vector2<f64>) -> Vector2<f64> {
    Vector2::new(-r.y, r.x)
}

fn cross2(a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

fn rot(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Planar spatial motion vector `(omega, v_origin)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Twist2 {
    pub ang: f64,
    pub lin: Vector2<f64>,
}

impl Twist2 {
    const ZERO: Twist2 = Twist2 {
        ang: 0.0,
        lin: Vector2::new(0.0, 0.0),
    };

    fn scaled(self, s: f64) -> Twist2 {
        Twist2 {
            ang: self.ang * s,
            lin: self.lin * s,
        }
    }

    fn add(self, o: Twist2) -> Twist2 {
        Twist2 {
            ang: self.ang + o.ang,
            lin: self.lin + o.lin,
        }
    }

    /// Motion cross product `self x other`.
    fn crm(self, o: Twist2) -> Twist2 {
        Twist2 {
            ang: 0.0,
            lin: self.ang * perp(o.lin) - o.ang * perp(self.lin),
        }
    }

    /// Velocity of the body-fixed point currently at `p`.
    fn point_velocity(self, p: Vector2<f64>) -> Vector2<f64> {
        self.lin + self.ang * perp(p)
    }
}

/// Planar wrench `(torque about origin, force)`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Wrench2 {
    ang: f64,
    lin: Vector2<f64>,
}

impl Wrench2 {
    fn add(self, o: Wrench2) -> Wrench2 {
        Wrench2 {
            ang: self.ang + o.ang,
            lin: self.lin + o.lin,
        }
    }
}

/// Force cross product `twist x* wrench`.
fn crf(v: Twist2, f: Wrench2) -> Wrench2 {
    Wrench2 {
        ang: cross2(v.lin, f.lin),
        lin: v.ang * perp(f.lin),
    }
}

fn dot(s: Twist2, f: Wrench2) -> f64 {
    s.ang * f.ang + s.lin.dot(&f.lin)
}

/// Spatial inertia of one body expressed at the world origin, as the 3x3
/// matrix acting on `(omega, vx, vz)`.
fn spatial_inertia(mass: f64, com_world: Vector2<f64>, inertia_com: f64) -> Matrix3<f64> {
    let c = com_world;
    let m = mass;
    Matrix3::new(
        inertia_com + m * c.norm_squared(),
        -m * c.y,
        m * c.x,
        -m * c.y,
        m,
        0.0,
        m * c.x,
        0.0,
        m,
    )
}

fn apply_inertia(i: &Matrix3<f64>, v: Twist2) -> Wrench2 {
    let x = i * nalgebra::Vector3::new(v.ang, v.lin.x, v.lin.y);
    Wrench2 {
        ang: x[0],
        lin: Vector2::new(x[1], x[2]),
    }
}

/// Forward kinematics, per-dof motion subspaces, body twists, and the
/// zero-acceleration (bias) spatial accelerations.
pub(crate) struct PlanarKinematics {
    pub rot: Vec<Matrix2<f64>>,
    pub pos: Vec<Vector2<f64>>,
    pub twist: Vec<Twist2>,
    /// Spatial acceleration of each body under zero generalized acceleration
    /// and zero gravity.
    pub accel_bias: Vec<Twist2>,
    /// World-frame motion subspace per degree of freedom.
    pub subspace: Vec<Twist2>,
}

pub(crate) fn kinematics(
    model: &RobotModel,
    q: &DVector<f64>,
    v: &DVector<f64>,
) -> PlanarKinematics {
    let nb = model.bodies.len();
    let nv = model.nv();
    let base_pos = Vector2::new(q[0], q[1]);
    let base_rot = rot(q[2]);

    let mut rots = vec![Matrix2::identity(); nb];
    let mut poss = vec![Vector2::zeros(); nb];
    rots[0] = base_rot;
    poss[0] = base_pos;

    let mut subspace = vec![Twist2::ZERO; nv];
    subspace[0] = Twist2 {
        ang: 0.0,
        lin: Vector2::new(1.0, 0.0),
    };
    subspace[1] = Twist2 {
        ang: 0.0,
        lin: Vector2::new(0.0, 1.0),
    };
    subspace[2] = Twist2 {
        ang: 1.0,
        lin: Vector2::new(base_pos.y, -base_pos.x),
    };

    let mut twist = vec![Twist2::ZERO; nb];
    twist[0] = subspace[0]
        .scaled(v[0])
        .add(subspace[1].scaled(v[1]))
        .add(subspace[2].scaled(v[2]));

    let mut accel = vec![Twist2::ZERO; nb];
    // d/dt of the base rotation column: the only configuration-dependent base
    // column is the angular one, whose origin velocity term moves with the
    // base origin.
    accel[0] = Twist2 {
        ang: 0.0,
        lin: Vector2::new(v[1] * v[2], -v[0] * v[2]),
    };

    for &j in &model.joint_order {
        let joint = &model.joints[j];
        let parent = joint.parent;
        let child = joint.child;
        let qj = q[3 + j];
        let vj = v[3 + j];

        let fixed_angle = match joint.orientation {
            FrameRotation::Planar(a) => a,
            FrameRotation::Spatial(_) => unreachable!("validated planar"),
        };
        let joint_rot = rots[parent] * rot(fixed_angle);
        let joint_pos = poss[parent] + rots[parent] * Vector2::new(joint.origin[0], joint.origin[1]);

        let s = match joint.kind {
            JointKind::Revolute => {
                rots[child] = joint_rot * rot(qj);
                poss[child] = joint_pos;
                Twist2 {
                    ang: 1.0,
                    lin: Vector2::new(joint_pos.y, -joint_pos.x),
                }
            }
            JointKind::Prismatic => {
                let axis_local = Vector2::new(joint.axis[0], joint.axis[1]).normalize();
                let axis_world = joint_rot * axis_local;
                rots[child] = joint_rot;
                poss[child] = joint_pos + axis_world * qj;
                Twist2 {
                    ang: 0.0,
                    lin: axis_world,
                }
            }
        };
        subspace[3 + j] = s;
        twist[child] = twist[parent].add(s.scaled(vj));
        accel[child] = accel[parent].add(twist[parent].crm(s.scaled(vj)));
    }

    PlanarKinematics {
        rot: rots,
        pos: poss,
        twist,
        accel_bias: accel,
        subspace,
    }
}

fn body_com_world(model: &RobotModel, kin: &PlanarKinematics, b: usize) -> Vector2<f64> {
    let body = &model.bodies[b];
    kin.pos[b] + kin.rot[b] * Vector2::new(body.com[0], body.com[1])
}

fn planar_inertia(model: &RobotModel, b: usize) -> f64 {
    match model.bodies[b].inertia {
        RotationalInertia::Planar(i) => i,
        RotationalInertia::Spatial(_) => unreachable!("validated planar"),
    }
}

/// Composite-rigid-body mass matrix.
pub(crate) fn mass_matrix(model: &RobotModel, q: &DVector<f64>) -> DMatrix<f64> {
    let kin = kinematics(model, q, &DVector::zeros(model.nv()));
    let nb = model.bodies.len();
    let nv = model.nv();

    let mut composite: Vec<Matrix3<f64>> = (0..nb)
        .map(|b| {
            spatial_inertia(
                model.bodies[b].mass,
                body_com_world(model, &kin, b),
                planar_inertia(model, b),
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
        if i < 3 {
            0
        } else {
            model.joints[i - 3].child
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

/// Generalized bias forces `h(q, v)` (gravity plus velocity effects) by the
/// recursive Newton-Euler pass with zero generalized acceleration.
pub(crate) fn bias_forces(
    model: &RobotModel,
    q: &DVector<f64>,
    v: &DVector<f64>,
    gravity: Vector2<f64>,
) -> DVector<f64> {
    let kin = kinematics(model, q, v);
    let nb = model.bodies.len();
    let nv = model.nv();

    // Gravity enters as a uniform offset on every spatial acceleration.
    let grav = Twist2 {
        ang: 0.0,
        lin: -gravity,
    };

    let mut wrench: Vec<Wrench2> = (0..nb)
        .map(|b| {
            let inertia = spatial_inertia(
                model.bodies[b].mass,
                body_com_world(model, &kin, b),
                planar_inertia(model, b),
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
    for i in 0..3 {
        h[i] = dot(kin.subspace[i], wrench[0]);
    }
    for j in 0..model.joints.len() {
        h[3 + j] = dot(kin.subspace[3 + j], wrench[model.joints[j].child]);
    }
    h
}

/// World position of the system CoM.
pub(crate) fn com(model: &RobotModel, q: &DVector<f64>) -> Vector2<f64> {
    let kin = kinematics(model, q, &DVector::zeros(model.nv()));
    let mut total_mass = 0.0;
    let mut weighted = Vector2::zeros();
    for b in 0..model.bodies.len() {
        let m = model.bodies[b].mass;
        total_mass += m;
        weighted += m * body_com_world(model, &kin, b);
    }
    weighted / total_mass
}

/// Twice the kinetic energy, computed per body from twists. Serves as an
/// independent check of the mass matrix.
pub(crate) fn kinetic_energy(model: &RobotModel, q: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let kin = kinematics(model, q, v);
    let mut ke = 0.0;
    for b in 0..model.bodies.len() {
        let c = body_com_world(model, &kin, b);
        let v_com = kin.twist[b].point_velocity(c);
        let omega = kin.twist[b].ang;
        ke += 0.5 * model.bodies[b].mass * v_com.norm_squared()
            + 0.5 * planar_inertia(model, b) * omega * omega;
    }
    ke
}

/// Contact-point position, world Jacobian rows, and bias acceleration.
pub(crate) fn point_kinematics(
    model: &RobotModel,
    q: &DVector<f64>,
    v: &DVector<f64>,
    body: usize,
    local: Vector2<f64>,
) -> (Vector2<f64>, DMatrix<f64>, Vector2<f64>) {
    let kin = kinematics(model, q, v);
    let p = kin.pos[body] + kin.rot[body] * local;

    let mut jac = DMatrix::zeros(2, model.nv());
    for &dof in &model.path_dofs[body] {
        let s = kin.subspace[dof];
        let col = s.point_velocity(p);
        jac[(0, dof)] = col.x;
        jac[(1, dof)] = col.y;
    }

    let tw = kin.twist[body];
    let acc = kin.accel_bias[body];
    let v_p = tw.point_velocity(p);
    let a_p = acc.lin + acc.ang * perp(p) + tw.ang * perp(v_p);
    (p, jac, a_p)
}

pub(crate) fn gravity_from(g: &DVector<f64>) -> Result<Vector2<f64>, FwpError> {
    if g.len() != 2 {
        return Err(FwpError::Dimension(format!(
            "planar gravity must have 2 components, got {}",
            g.len()
        )));
    }
    Ok(Vector2::new(g[0], g[1]))
}
