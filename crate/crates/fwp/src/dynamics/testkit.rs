//! Random model/state generators shared by the dynamics tests.

use nalgebra::{DVector, Matrix3, UnitQuaternion, Vector3};
use rand::rngs::StdRng;
use rand::Rng;

use super::model::{
    ActuatedJoint, BaseType, Body, ContactPointDef, FrameRotation, Joint, JointKind, RobotModel,
    RobotState, RotationalInertia,
};

pub(crate) fn random_planar_model(rng: &mut StdRng, n_links: usize) -> RobotModel {
    let mut bodies = vec![Body {
        name: "base".into(),
        mass: rng.gen_range(0.5..5.0),
        com: DVector::from_vec(vec![rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2)]),
        inertia: RotationalInertia::Planar(rng.gen_range(0.05..1.0)),
    }];
    let mut joints = Vec::new();
    for l in 0..n_links {
        bodies.push(Body {
            name: format!("link{l}"),
            mass: rng.gen_range(0.2..3.0),
            com: DVector::from_vec(vec![rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)]),
            inertia: RotationalInertia::Planar(rng.gen_range(0.02..0.5)),
        });
        let parent = if l == 0 { 0 } else { rng.gen_range(0..=l) };
        let kind = if rng.gen_bool(0.75) {
            JointKind::Revolute
        } else {
            JointKind::Prismatic
        };
        let angle = rng.gen_range(-1.0..1.0);
        let axis = DVector::from_vec(vec![rng.gen_range(-1.0..1.0f64), rng.gen_range(-1.0..1.0)]);
        let axis = if axis.norm() < 1e-3 {
            DVector::from_vec(vec![1.0, 0.0])
        } else {
            axis.clone() / axis.norm()
        };
        joints.push(Joint {
            name: format!("j{l}"),
            parent,
            child: l + 1,
            kind,
            axis,
            origin: DVector::from_vec(vec![rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)]),
            orientation: FrameRotation::Planar(angle),
        });
    }
    let actuated = (0..n_links)
        .map(|j| ActuatedJoint {
            joint: j,
            lower: -rng.gen_range(5.0..40.0),
            upper: rng.gen_range(5.0..40.0),
        })
        .collect();
    let contact_points = vec![ContactPointDef {
        name: "tip".into(),
        body: n_links,
        point: DVector::from_vec(vec![rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4)]),
    }];
    RobotModel::new(BaseType::Planar3, bodies, joints, actuated, contact_points).unwrap()
}

pub(crate) fn random_spatial_model(rng: &mut StdRng, n_links: usize) -> RobotModel {
    let mut bodies = vec![Body {
        name: "base".into(),
        mass: rng.gen_range(0.5..5.0),
        com: random_vec3(rng, 0.2),
        inertia: RotationalInertia::Spatial(random_inertia(rng)),
    }];
    let mut joints = Vec::new();
    for l in 0..n_links {
        bodies.push(Body {
            name: format!("link{l}"),
            mass: rng.gen_range(0.2..3.0),
            com: random_vec3(rng, 0.3),
            inertia: RotationalInertia::Spatial(random_inertia(rng)),
        });
        let parent = if l == 0 { 0 } else { rng.gen_range(0..=l) };
        let kind = if rng.gen_bool(0.75) {
            JointKind::Revolute
        } else {
            JointKind::Prismatic
        };
        joints.push(Joint {
            name: format!("j{l}"),
            parent,
            child: l + 1,
            kind,
            axis: random_unit3(rng),
            origin: random_vec3(rng, 0.5),
            orientation: FrameRotation::Spatial(random_quat(rng)),
        });
    }
    let actuated = (0..n_links)
        .map(|j| ActuatedJoint {
            joint: j,
            lower: -rng.gen_range(5.0..40.0),
            upper: rng.gen_range(5.0..40.0),
        })
        .collect();
    let contact_points = vec![ContactPointDef {
        name: "tip".into(),
        body: n_links,
        point: random_vec3(rng, 0.4),
    }];
    RobotModel::new(BaseType::Spatial6, bodies, joints, actuated, contact_points).unwrap()
}

pub(crate) fn random_state(rng: &mut StdRng, model: &RobotModel) -> RobotState {
    let mut q = DVector::zeros(model.nq());
    let mut v = DVector::zeros(model.nv());
    match model.base {
        BaseType::Planar3 => {
            for i in 0..model.nq() {
                q[i] = rng.gen_range(-1.0..1.0);
            }
        }
        BaseType::Spatial6 => {
            for i in 0..3 {
                q[i] = rng.gen_range(-1.0..1.0);
            }
            let quat = random_quat(rng);
            q[3] = quat.w;
            q[4] = quat.i;
            q[5] = quat.j;
            q[6] = quat.k;
            for j in 0..model.num_joints() {
                q[7 + j] = rng.gen_range(-1.0..1.0);
            }
        }
    }
    for i in 0..model.nv() {
        v[i] = rng.gen_range(-1.0..1.0);
    }
    RobotState::new(q, v)
}

fn random_vec3(rng: &mut StdRng, scale: f64) -> DVector<f64> {
    DVector::from_vec(vec![
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    ])
}

fn random_unit3(rng: &mut StdRng) -> DVector<f64> {
    loop {
        let v = random_vec3(rng, 1.0);
        if v.norm() > 1e-2 {
            return v.clone() / v.norm();
        }
    }
}

fn random_quat(rng: &mut StdRng) -> UnitQuaternion<f64> {
    let axis = random_unit3(rng);
    UnitQuaternion::from_scaled_axis(
        Vector3::new(axis[0], axis[1], axis[2]) * rng.gen_range(-3.0..3.0),
    )
}

fn random_inertia(rng: &mut StdRng) -> Matrix3<f64> {
    // SPD by construction: A A' plus a diagonal bump.
    let a = Matrix3::from_fn(|_, _| rng.gen_range(-0.3..0.3));
    a * a.transpose() + Matrix3::identity() * rng.gen_range(0.05..0.3)
}
