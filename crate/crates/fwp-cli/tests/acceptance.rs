//! Acceptance suite: every release-gating property of the pipeline, each as
//! one test printing a PASS line. Run with `cargo test --test acceptance --
//! --nocapture` to see the lines.

use std::path::{Path, PathBuf};
use std::process::Command;

use nalgebra::{DMatrix, DVector, Matrix3, UnitQuaternion, Vector3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use fwp::contact::ActuationLimits;
use fwp::dynamics::{
    self, ActuatedJoint, Body, ContactPointDef, FrameRotation, Joint, JointKind, RobotModel,
    RobotState, RotationalInertia,
};
use fwp::polytope::{facet_enum, vertex_enum, SupportOutcome};
use fwp::scenario::contact_rotation;
use fwp::wrench::{
    self, fwp_full, naive_fwp_opening, non_actuated_directions, opening_hrep, stick_hrep,
    wrench_map, ActiveContact, ContactSet, FwpOptions,
};
use fwp::{BaseType, Scenario, Tolerances};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn load_fixture(name: &str) -> fwp::scenario::BuiltScenario {
    Scenario::from_path(&fixture(name))
        .unwrap()
        .build()
        .unwrap()
}

struct TestScenario {
    model: RobotModel,
    state: RobotState,
    contacts: ContactSet,
    limits: ActuationLimits,
    gravity: DVector<f64>,
    options: FwpOptions,
}

/// Random legged system with `nk` contacts on distinct bodies, at rest so
/// every contact is established. The force cap keeps redundant-contact
/// scenarios bounded.
fn random_scenario(rng: &mut StdRng, planar: bool, nk: usize) -> TestScenario {
    let (base, space, tdim) = if planar {
        (BaseType::Planar3, 2usize, 2usize)
    } else {
        (BaseType::Spatial6, 3usize, 3usize)
    };
    let needed_joints = (tdim * nk + 1).saturating_sub(base.dofs()).max(nk);
    let nj = needed_joints + rng.gen_range(0..2);

    let rand_vec = |rng: &mut StdRng, scale: f64, dim: usize| -> DVector<f64> {
        DVector::from_fn(dim, |_, _| rng.gen_range(-scale..scale))
    };
    let body = |rng: &mut StdRng, name: String, planar: bool| -> Body {
        Body {
            name,
            mass: rng.gen_range(0.5..4.0),
            com: rand_vec(rng, 0.15, if planar { 2 } else { 3 }),
            inertia: if planar {
                RotationalInertia::Planar(rng.gen_range(0.02..0.4))
            } else {
                let a = Matrix3::from_fn(|_, _| rng.gen_range(-0.2..0.2));
                RotationalInertia::Spatial(a * a.transpose() + Matrix3::identity() * 0.05)
            },
        }
    };

    let mut bodies = vec![body(rng, "base".into(), planar)];
    let mut joints = Vec::new();
    for l in 0..nj {
        bodies.push(body(rng, format!("link{l}"), planar));
        let parent = if l == 0 { 0 } else { rng.gen_range(0..=l) };
        let axis = if planar {
            DVector::zeros(2)
        } else {
            loop {
                let a = rand_vec(rng, 1.0, 3);
                if a.norm() > 0.1 {
                    break a.clone() / a.norm();
                }
            }
        };
        joints.push(Joint {
            name: format!("j{l}"),
            parent,
            child: l + 1,
            kind: JointKind::Revolute,
            axis,
            origin: {
                let mut o = rand_vec(rng, 0.4, space);
                o[space - 1] -= 0.2;
                o
            },
            orientation: if planar {
                FrameRotation::Planar(rng.gen_range(-0.5..0.5))
            } else {
                FrameRotation::Spatial(UnitQuaternion::from_scaled_axis(Vector3::new(
                    rng.gen_range(-0.4..0.4),
                    rng.gen_range(-0.4..0.4),
                    rng.gen_range(-0.4..0.4),
                )))
            },
        });
    }
    let actuated = (0..nj)
        .map(|j| ActuatedJoint {
            joint: j,
            lower: -rng.gen_range(15.0..50.0),
            upper: rng.gen_range(15.0..50.0),
        })
        .collect();

    // Contacts on distinct bodies, deepest first so they spread out.
    let mut contact_points = Vec::new();
    let mut hosts: Vec<usize> = (1..=nj).collect();
    hosts.reverse();
    hosts.push(0);
    for k in 0..nk {
        contact_points.push(ContactPointDef {
            name: format!("c{k}"),
            body: hosts[k % hosts.len()],
            point: rand_vec(rng, 0.35, space),
        });
    }
    let model = RobotModel::new(base, bodies, joints, actuated, contact_points).unwrap();

    let mut q = DVector::zeros(model.nq());
    match base {
        BaseType::Planar3 => {
            for i in 0..model.nq() {
                q[i] = rng.gen_range(-0.6..0.6);
            }
            q[1] += 0.8;
        }
        BaseType::Spatial6 => {
            q[0] = rng.gen_range(-0.4..0.4);
            q[1] = rng.gen_range(-0.4..0.4);
            q[2] = 0.8 + rng.gen_range(-0.2..0.2);
            let quat = UnitQuaternion::from_scaled_axis(Vector3::new(
                rng.gen_range(-0.3..0.3),
                rng.gen_range(-0.3..0.3),
                rng.gen_range(-0.3..0.3),
            ));
            q[3] = quat.w;
            q[4] = quat.i;
            q[5] = quat.j;
            q[6] = quat.k;
            for j in 0..nj {
                q[7 + j] = rng.gen_range(-0.6..0.6);
            }
        }
    }
    let state = RobotState::new(q, DVector::zeros(model.nv()));

    let contacts = ContactSet::new(
        (0..nk)
            .map(|k| {
                // Normal within ~60 degrees of vertical.
                let mut n: Vec<f64> = (0..space).map(|_| rng.gen_range(-0.5..0.5)).collect();
                n[space - 1] = rng.gen_range(0.7..1.0);
                let rotation = contact_rotation(base, &n, None).unwrap();
                ActiveContact {
                    name: format!("c{k}"),
                    rotation,
                    mu: rng.gen_range(0.3..1.0),
                }
            })
            .collect(),
    );
    let gravity = if planar {
        DVector::from_vec(vec![0.0, -9.81])
    } else {
        DVector::from_vec(vec![0.0, 0.0, -9.81])
    };
    TestScenario {
        limits: model.actuation_limits().unwrap(),
        model,
        state,
        contacts,
        gravity,
        options: FwpOptions {
            force_cap: Some(300.0),
            ..FwpOptions::default()
        },
    }
}

/// Five randomized scenarios (planar and spatial, 1-4 contacts), resampled
/// until the stick system is feasible and bounded with a non-trivial vertex
/// set.
fn acceptance_scenarios() -> Vec<TestScenario> {
    let mut rng = StdRng::seed_from_u64(2024);
    let specs = [(true, 1), (true, 2), (true, 4), (false, 2), (false, 3)];
    let mut out = Vec::new();
    for &(planar, nk) in &specs {
        for attempt in 0.. {
            assert!(attempt < 200, "could not sample a feasible scenario");
            let sc = random_scenario(&mut rng, planar, nk);
            let poly = wrench::fwp_stick(
                &sc.model, &sc.state, &sc.contacts, &sc.limits, &sc.gravity, &sc.options,
            );
            match poly {
                Ok(p) if !p.is_empty() && p.is_bounded() && p.num_vertices() >= 2 => {
                    out.push(sc);
                    break;
                }
                _ => continue,
            }
        }
    }
    out
}

#[test]
fn c01_support_function_oracle() {
    let tol = Tolerances::default();
    let mut rng = StdRng::seed_from_u64(11);
    let mut checked = 0usize;
    for (idx, sc) in acceptance_scenarios().iter().enumerate() {
        let h = stick_hrep(
            &sc.model, &sc.state, &sc.contacts, &sc.limits, &sc.gravity, &sc.options,
        )
        .unwrap();
        let keep: Vec<usize> = (0..sc.contacts.len()).collect();
        let map = wrench_map(&sc.model, &sc.state.q, &sc.contacts, &keep).unwrap();
        let ext = map.extended(sc.model.num_actuators());
        let poly = wrench::fwp_stick(
            &sc.model, &sc.state, &sc.contacts, &sc.limits, &sc.gravity, &sc.options,
        )
        .unwrap();
        assert!(
            !poly.is_empty(),
            "scenario {idx}: stick set unexpectedly empty"
        );
        let dim = sc.model.base.wrench_dim();
        for _ in 0..1000 {
            let dir = loop {
                let d = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0f64..1.0));
                if d.norm() > 1e-3 {
                    break d.normalize();
                }
            };
            let via_lp = h.support(&(ext.transpose() * &dir), &tol).unwrap();
            let via_vertices = poly.support(&dir, &tol).unwrap();
            match (via_lp, via_vertices) {
                (
                    SupportOutcome::Bounded { value: a, .. },
                    SupportOutcome::Bounded { value: b, .. },
                ) => {
                    assert!(
                        (a - b).abs() <= 1e-7 * (1.0 + a.abs()),
                        "scenario {idx}: support mismatch {a} vs {b}"
                    );
                }
                other => panic!("scenario {idx}: unbounded/empty support {other:?}"),
            }
            checked += 1;
        }
    }
    println!("[acceptance] C1 support-function oracle ({checked} directions): PASS");
}

#[test]
fn c02_dynamics_consistency() {
    let mut replayed = 0usize;
    for (idx, sc) in acceptance_scenarios().iter().enumerate() {
        let h = stick_hrep(
            &sc.model, &sc.state, &sc.contacts, &sc.limits, &sc.gravity, &sc.options,
        )
        .unwrap();
        let e = vertex_enum(&h, &sc.options.tolerances).unwrap();
        let kin: Vec<_> = sc
            .contacts
            .contacts
            .iter()
            .map(|c| {
                dynamics::contact_kinematics(&sc.model, &sc.state.q, &sc.state.v, &c.name, &c.rotation)
                    .unwrap()
            })
            .collect();
        let t = sc.model.base.contact_dim();
        let nk = sc.contacts.len();
        for j in 0..e.polytope.num_vertices() {
            let x = e.polytope.vertex(j);
            let u = x.rows(t * nk, sc.model.num_actuators()).into_owned();
            let out =
                dynamics::constrained_forward_dynamics(&sc.model, &sc.state, &u, &kin, &sc.gravity)
                    .unwrap();
            for (i, k) in kin.iter().enumerate() {
                let f_vertex = x.rows(t * i, t).into_owned();
                let diff = (&out.forces[i] - &f_vertex).amax();
                assert!(
                    diff <= 1e-8,
                    "scenario {idx} vertex {j} contact {i}: force differs by {diff}"
                );
                let acc =
                    k.jacobian_contact_frame.clone() * &out.accel + &k.bias_accel_contact_frame;
                assert!(
                    acc.norm() <= 1e-8,
                    "scenario {idx} vertex {j} contact {i}: |contact accel| = {}",
                    acc.norm()
                );
            }
            replayed += 1;
        }
    }
    println!("[acceptance] C2 dynamics consistency ({replayed} vertices replayed): PASS");
}

#[test]
fn c03_non_penetration() {
    let mut replayed = 0usize;
    for (idx, sc) in acceptance_scenarios().iter().enumerate() {
        let nk = sc.contacts.len();
        if nk < 2 {
            continue;
        }
        let t = sc.model.base.contact_dim();
        for mask in 1..((1u32 << nk) - 1) {
            let Ok(h) = opening_hrep(
                &sc.model, &sc.state, &sc.contacts, mask, &sc.limits, &sc.gravity, &sc.options,
            ) else {
                continue;
            };
            let e = vertex_enum(&h, &sc.options.tolerances).unwrap();
            let stick_idx: Vec<usize> = (0..nk).filter(|i| mask & (1 << i) == 0).collect();
            let open_idx: Vec<usize> = (0..nk).filter(|i| mask & (1 << i) != 0).collect();
            let kin_stick: Vec<_> = stick_idx
                .iter()
                .map(|&i| {
                    let c = &sc.contacts.contacts[i];
                    dynamics::contact_kinematics(
                        &sc.model, &sc.state.q, &sc.state.v, &c.name, &c.rotation,
                    )
                    .unwrap()
                })
                .collect();
            let kin_open: Vec<_> = open_idx
                .iter()
                .map(|&i| {
                    let c = &sc.contacts.contacts[i];
                    dynamics::contact_kinematics(
                        &sc.model, &sc.state.q, &sc.state.v, &c.name, &c.rotation,
                    )
                    .unwrap()
                })
                .collect();
            for j in 0..e.polytope.num_vertices() {
                let x = e.polytope.vertex(j);
                let u = x
                    .rows(t * stick_idx.len(), sc.model.num_actuators())
                    .into_owned();
                let out = dynamics::constrained_forward_dynamics(
                    &sc.model, &sc.state, &u, &kin_stick, &sc.gravity,
                )
                .unwrap();
                for k in &kin_open {
                    let acc =
                        k.jacobian_contact_frame.clone() * &out.accel + &k.bias_accel_contact_frame;
                    let normal = acc[t - 1];
                    assert!(
                        normal >= -1e-8,
                        "scenario {idx} mask {mask} vertex {j}: opened normal accel {normal}"
                    );
                }
                replayed += 1;
            }
        }
    }
    println!("[acceptance] C3 non-penetration ({replayed} opening vertices): PASS");
}

#[test]
fn c04_naive_overestimation_on_the_biped_fixture() {
    let sc = load_fixture("planar_biped.json");
    let mut witnessed = false;
    let mut worst: f64 = f64::NEG_INFINITY;
    for mask in [0b01u32, 0b10] {
        let h_o = opening_hrep(
            &sc.model, &sc.state, &sc.contacts, mask, &sc.limits, &sc.gravity, &sc.options,
        )
        .unwrap();
        let np_row = h_o.num_inequalities() - 1;
        let a_np = h_o.a().row(np_row).transpose();
        let b_np = h_o.b()[np_row];
        let reduced = ContactSet::new(
            (0..sc.contacts.len())
                .filter(|i| mask & (1 << i) == 0)
                .map(|i| sc.contacts.contacts[i].clone())
                .collect(),
        );
        let h_n = stick_hrep(
            &sc.model, &sc.state, &reduced, &sc.limits, &sc.gravity, &sc.options,
        )
        .unwrap();
        let e_n = vertex_enum(&h_n, &sc.options.tolerances).unwrap();
        // The exact set is inside the naive one; a naive vertex violating
        // the non-penetration row witnesses strict inclusion.
        let exact = wrench::fwp_opening(
            &sc.model, &sc.state, &sc.contacts, mask, &sc.limits, &sc.gravity, &sc.options,
        )
        .unwrap();
        let naive = naive_fwp_opening(
            &sc.model, &sc.state, &sc.contacts, mask, &sc.limits, &sc.gravity, &sc.options,
        )
        .unwrap();
        for j in 0..exact.num_vertices() {
            assert!(
                naive.contains(&exact.vertex(j), 1e-6),
                "exact opening set must be inside the naive one"
            );
        }
        for j in 0..e_n.polytope.num_vertices() {
            let violation = a_np.dot(&e_n.polytope.vertex(j)) - b_np;
            worst = worst.max(violation);
            if violation > 1e-6 {
                witnessed = true;
            }
        }
    }
    assert!(witnessed, "no naive vertex violates non-penetration (worst {worst})");
    println!(
        "[acceptance] C4 naive opening overestimates (worst violation {worst:.3e}): PASS"
    );
}

#[test]
fn c05_non_actuated_directions_toggle() {
    let tol = Tolerances::default();
    let active = load_fixture("spatial_exo.json");
    let passive = load_fixture("spatial_exo_passive_ankle.json");

    let poly_active = wrench::fwp_stick(
        &active.model, &active.state, &active.contacts, &active.limits, &active.gravity,
        &active.options,
    )
    .unwrap();
    let poly_passive = wrench::fwp_stick(
        &passive.model, &passive.state, &passive.contacts, &passive.limits, &passive.gravity,
        &passive.options,
    )
    .unwrap();

    let n_active = non_actuated_directions(&poly_active, tol.hull).unwrap().ncols();
    let n_passive = non_actuated_directions(&poly_passive, tol.hull).unwrap().ncols();
    assert_ne!(
        n_active, n_passive,
        "toggling the ankle must change the blocked-direction count"
    );
    assert!(n_passive >= n_active);
    println!(
        "[acceptance] C5 non-actuated directions toggle (active {n_active}, passive {n_passive}): PASS"
    );
}

#[test]
fn c06_subset_count() {
    let mut rng = StdRng::seed_from_u64(77);
    for nk in 1..=4usize {
        let sc = random_scenario(&mut rng, true, nk);
        let result = fwp_full(
            &sc.model, &sc.state, &sc.contacts, &sc.limits, &sc.gravity, &sc.options,
        )
        .unwrap();
        let expected = (1usize << nk) - 2;
        assert_eq!(
            result.diagnostics.len(),
            expected,
            "nk = {nk}: wrong attempted-subset count"
        );
    }
    println!("[acceptance] C6 subset count 2^nk - 2 for nk in 1..=4: PASS");
}

#[test]
fn c07_statics_sanity() {
    let sc = load_fixture("planar_point_mass.json");
    let poly = wrench::fwp_stick(
        &sc.model, &sc.state, &sc.contacts, &sc.limits, &sc.gravity, &sc.options,
    )
    .unwrap();
    assert_eq!(poly.num_vertices(), 1, "statics fixture must pin one wrench");
    let w = poly.vertex(0);
    let expected = 4.0 * 9.81;
    assert!(w[0].abs() <= 1e-9, "torque: {}", w[0]);
    assert!(w[1].abs() <= 1e-9, "horizontal force: {}", w[1]);
    assert!((w[2] - expected).abs() <= 1e-9, "vertical force: {}", w[2]);
    println!("[acceptance] C7 statics sanity (single wrench (0, 0, m g)): PASS");
}

#[test]
fn c08_polytope_round_trips() {
    let tol = Tolerances::default();
    let mut rng = StdRng::seed_from_u64(4096);
    for trial in 0..100 {
        let dim = 2 + trial % 5; // 2..=6
        let rows = rng.gen_range(dim + 1..3 * dim + 4);
        let mut a = DMatrix::zeros(rows + 2 * dim, dim);
        let mut b = DVector::zeros(rows + 2 * dim);
        for i in 0..rows {
            let n = loop {
                let v = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0f64..1.0));
                if v.norm() > 0.1 {
                    break v.normalize();
                }
            };
            for j in 0..dim {
                a[(i, j)] = n[j];
            }
            b[i] = rng.gen_range(0.4..1.6);
        }
        for j in 0..dim {
            a[(rows + 2 * j, j)] = 1.0;
            b[rows + 2 * j] = 2.0;
            a[(rows + 2 * j + 1, j)] = -1.0;
            b[rows + 2 * j + 1] = 2.0;
        }
        let p = fwp::HPolytope::from_inequalities(a, b).unwrap();

        let e1 = vertex_enum(&p, &tol).unwrap();
        assert!(e1.polytope.is_bounded(), "trial {trial}: unbounded");
        assert!(!e1.polytope.is_empty(), "trial {trial}: empty");
        let h = facet_enum(&e1.polytope, &tol).unwrap();
        let e2 = vertex_enum(&h, &tol).unwrap();

        assert_eq!(
            e1.polytope.num_vertices(),
            e2.polytope.num_vertices(),
            "trial {trial} (dim {dim}): vertex count changed in the round trip"
        );
        let mut used = vec![false; e2.polytope.num_vertices()];
        for i in 0..e1.polytope.num_vertices() {
            let v = e1.polytope.vertex(i);
            let hit = (0..e2.polytope.num_vertices())
                .find(|&j| !used[j] && (e2.polytope.vertex(j) - &v).amax() <= 1e-8);
            match hit {
                Some(j) => used[j] = true,
                None => panic!("trial {trial} (dim {dim}): vertex {v} lost"),
            }
        }
    }
    println!("[acceptance] C8 polytope round trips (100 polytopes, dims 2-6): PASS");
}

#[test]
fn c09_finite_difference_suite() {
    let mut rng = StdRng::seed_from_u64(999);
    for trial in 0..50 {
        let sc = random_scenario(&mut rng, trial % 2 == 0, 1);
        let model = &sc.model;
        // Random velocities: the FD checks exercise the velocity terms.
        let mut state = sc.state.clone();
        for i in 0..model.nv() {
            state.v[i] = rng.gen_range(-1.0..1.0);
        }

        let m = dynamics::mass_matrix(model, &state.q).unwrap();
        let asym = (m.clone() - m.transpose()).amax();
        assert!(asym <= 1e-12, "trial {trial}: mass asymmetry {asym}");

        let c = &sc.contacts.contacts[0];
        let kin =
            dynamics::contact_kinematics(model, &state.q, &state.v, &c.name, &c.rotation).unwrap();
        let eps = 1e-7;
        for dof in 0..model.nv() {
            let mut dir = DVector::zeros(model.nv());
            dir[dof] = 1.0;
            let q_plus = dynamics::integrate_state(model, &state.q, &dir, eps).unwrap();
            let kin_plus =
                dynamics::contact_kinematics(model, &q_plus, &state.v, &c.name, &c.rotation)
                    .unwrap();
            let fd = c.rotation.transpose()
                * ((&kin_plus.position_world - &kin.position_world) / eps);
            let col = kin.jacobian_contact_frame.column(dof).into_owned();
            let err = (col - fd).amax();
            assert!(err <= 1e-5, "trial {trial} dof {dof}: jacobian FD error {err}");
        }

        let q_flow = dynamics::integrate_state(model, &state.q, &state.v, eps).unwrap();
        let kin_flow =
            dynamics::contact_kinematics(model, &q_flow, &state.v, &c.name, &c.rotation).unwrap();
        let fd = (kin_flow.jacobian_contact_frame * &state.v
            - kin.jacobian_contact_frame.clone() * &state.v)
            / eps;
        let err = (fd - &kin.bias_accel_contact_frame).amax();
        assert!(err <= 1e-4, "trial {trial}: Jdot v FD error {err}");
    }
    println!("[acceptance] C9 finite-difference suite (50 model/state pairs): PASS");
}

#[test]
fn c10_determinism() {
    let fixtures = [
        "planar_point_mass.json",
        "planar_biped.json",
        "spatial_exo.json",
        "spatial_exo_passive_ankle.json",
    ];
    let dir = tempfile::tempdir().unwrap();
    for name in fixtures {
        let out_a = dir.path().join(format!("a_{name}"));
        let out_b = dir.path().join(format!("b_{name}"));
        for (out, threads) in [(&out_a, "1"), (&out_b, "4")] {
            let status = Command::new(env!("CARGO_BIN_EXE_fwp"))
                .args([
                    "compute",
                    fixture(name).to_str().unwrap(),
                    "-o",
                    out.to_str().unwrap(),
                    "--naive",
                ])
                .env("FWP_THREADS", threads)
                .status()
                .unwrap();
            assert!(status.success(), "{name}: compute failed");
        }
        let a = std::fs::read(&out_a).unwrap();
        let b = std::fs::read(&out_b).unwrap();
        assert_eq!(a, b, "{name}: result files differ between runs");
    }
    println!("[acceptance] C10 determinism (byte-identical results, 4 fixtures): PASS");
}
