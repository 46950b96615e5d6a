//! Feasible wrench polytopes.
//!
//! The stacked unknowns are `x = (f_1, ..., f_nk, u)`: contact-frame forces
//! for every active contact followed by the actuator inputs. The stick system
//! constrains every contact-point acceleration to zero; an opening system
//! removes the opened contacts' forces from `x`, keeps the stick constraint
//! for the rest, and adds one non-penetration row per opened contact. Vertex
//! sets of these systems map to centroidal wrench vertices through the
//! per-contact transforms.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contact::{actuation_hrep, friction_hrep, ActuationLimits, FrictionDim, FrictionSpec};
use crate::dynamics::{
    self, com, contact_kinematics, ContactPointKinematics, RobotModel, RobotState,
};
use crate::polytope::{affine_hull, facet_enum, vertex_enum, HPolytope, VPolytope};
use crate::{BaseType, FwpError, Tolerances};

/// One active contact: a named model contact point, the environment frame it
/// touches (columns: tangents then normal), and the friction coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveContact {
    pub name: String,
    /// World-from-contact rotation.
    pub rotation: DMatrix<f64>,
    pub mu: f64,
}

/// Ordered set of active contacts; the order fixes the force stacking in `x`
/// and the bit positions of opening-subset masks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContactSet {
    pub contacts: Vec<ActiveContact>,
}

impl ContactSet {
    pub fn new(contacts: Vec<ActiveContact>) -> Self {
        ContactSet { contacts }
    }

    pub fn len(&self) -> usize {
        self.contacts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contacts.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.contacts.iter().map(|c| c.name.clone()).collect()
    }
}

/// Which opening subsets to attempt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SubsetSelection {
    /// Every proper non-empty subset (requires the contact count to stay at
    /// or below `max_enumerated_contacts`).
    All,
    /// Explicit bitmasks; bit `i` opens contact `i` in `ContactSet` order.
    Explicit(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FwpOptions {
    pub tolerances: Tolerances,
    /// Optional per-component force bound restoring boundedness when
    /// redundant contacts create internal-force rays.
    pub force_cap: Option<f64>,
    pub subsets: SubsetSelection,
    /// Also compute the naive opening sets (stick with fewer contacts, no
    /// non-penetration rows).
    pub naive: bool,
    /// Hard cap on contacts for exhaustive subset enumeration.
    pub max_enumerated_contacts: usize,
}

impl Default for FwpOptions {
    fn default() -> Self {
        FwpOptions {
            tolerances: Tolerances::default(),
            force_cap: None,
            subsets: SubsetSelection::All,
            naive: false,
            max_enumerated_contacts: 12,
        }
    }
}

/// Per-contact wrench transform blocks and their horizontal stack: the total
/// centroidal wrench is `T f` for stacked contact-frame forces `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct WrenchMap {
    /// Wrench dimension by force dimension per kept contact.
    pub blocks: Vec<DMatrix<f64>>,
    pub contact_order: Vec<String>,
    matrix: DMatrix<f64>,
}

impl WrenchMap {
    /// The stacked map `[T_1 ... T_m]`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `[T 0]`: the map extended over `(f, u)` with `na` trailing actuator
    /// columns.
    pub fn extended(&self, na: usize) -> DMatrix<f64> {
        let w = self.matrix.nrows();
        let mut out = DMatrix::zeros(w, self.matrix.ncols() + na);
        out.view_mut((0, 0), (w, self.matrix.ncols()))
            .copy_from(&self.matrix);
        out
    }

    pub fn wrench_dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Wrench transform for the kept contacts: each block maps a contact-frame
/// force to the wrench `(torque, force)` about the CoM.
pub fn wrench_map(
    model: &RobotModel,
    q: &DVector<f64>,
    contacts: &ContactSet,
    keep: &[usize],
) -> Result<WrenchMap, FwpError> {
    let t = model.base.contact_dim();
    let w = model.base.wrench_dim();
    let x_c = com(model, q)?;
    let v0 = DVector::zeros(model.nv());

    let mut blocks = Vec::with_capacity(keep.len());
    let mut order = Vec::with_capacity(keep.len());
    for &idx in keep {
        let contact = contacts.contacts.get(idx).ok_or_else(|| {
            FwpError::InvalidInput(format!("contact index {idx} out of range"))
        })?;
        let kin = contact_kinematics(model, q, &v0, &contact.name, &contact.rotation)?;
        let r = &kin.position_world - &x_c;
        let mut arm = DMatrix::zeros(w, t);
        match model.base {
            BaseType::Planar3 => {
                // Torque row is the planar cross product (r x f)_y, then the
                // identity for the force components.
                arm[(0, 0)] = -r[1];
                arm[(0, 1)] = r[0];
                arm[(1, 0)] = 1.0;
                arm[(2, 1)] = 1.0;
            }
            BaseType::Spatial6 => {
                arm[(0, 1)] = -r[2];
                arm[(0, 2)] = r[1];
                arm[(1, 0)] = r[2];
                arm[(1, 2)] = -r[0];
                arm[(2, 0)] = -r[1];
                arm[(2, 1)] = r[0];
                for k in 0..3 {
                    arm[(3 + k, k)] = 1.0;
                }
            }
        }
        blocks.push(arm * &contact.rotation);
        order.push(contact.name.clone());
    }

    let mut matrix = DMatrix::zeros(w, t * keep.len());
    for (i, block) in blocks.iter().enumerate() {
        matrix.view_mut((0, t * i), (w, t)).copy_from(block);
    }
    Ok(WrenchMap {
        blocks,
        contact_order: order,
        matrix,
    })
}

/// Shared pieces of the stick/opening assemblies.
struct Assembly {
    kin: Vec<ContactPointKinematics>,
    /// `M^{-1} J_i'` per contact, nv x t.
    minv_jt: Vec<DMatrix<f64>>,
    /// `M^{-1} S_a`, nv x na.
    minv_sa: DMatrix<f64>,
    /// `M^{-1} h`.
    minv_h: DVector<f64>,
    t: usize,
    na: usize,
}

fn assemble(
    model: &RobotModel,
    state: &RobotState,
    contacts: &ContactSet,
    limits: &ActuationLimits,
    gravity: &DVector<f64>,
    tol: &Tolerances,
) -> Result<Assembly, FwpError> {
    state.validate(model)?;
    if limits.len() != model.num_actuators() {
        return Err(FwpError::Dimension(format!(
            "{} actuation limits for {} actuators",
            limits.len(),
            model.num_actuators()
        )));
    }
    let t = model.base.contact_dim();

    let mut kin = Vec::with_capacity(contacts.len());
    for contact in &contacts.contacts {
        let k = contact_kinematics(model, &state.q, &state.v, &contact.name, &contact.rotation)?;
        let speed = k.velocity(&state.v).norm();
        if speed > tol.established {
            return Err(FwpError::ContactNotEstablished {
                name: contact.name.clone(),
                speed,
                limit: tol.established,
            });
        }
        if !(contact.mu >= 0.0) {
            return Err(FwpError::InvalidInput(format!(
                "contact `{}` has negative friction coefficient",
                contact.name
            )));
        }
        kin.push(k);
    }

    let mass = dynamics::mass_matrix(model, &state.q)?;
    let chol = mass.clone().cholesky().ok_or_else(|| {
        FwpError::SingularMass("mass matrix has no Cholesky factorization".into())
    })?;
    let h = dynamics::bias_forces(model, &state.q, &state.v, gravity)?;
    let s_a = model.selector();

    let minv_jt = kin
        .iter()
        .map(|k| chol.solve(&k.jacobian_contact_frame.transpose()))
        .collect();
    let minv_sa = chol.solve(&s_a);
    let minv_h = chol.solve(&h);

    Ok(Assembly {
        kin,
        minv_jt,
        minv_sa,
        minv_h,
        t,
        na: limits.len(),
    })
}

fn friction_dim(base: BaseType) -> FrictionDim {
    match base {
        BaseType::Planar3 => FrictionDim::Planar2,
        BaseType::Spatial6 => FrictionDim::Spatial3,
    }
}

/// H-description of the stick system over `x = (f_1, ..., f_nk, u)`:
/// bilateral zero-acceleration rows for every contact, friction cones,
/// actuation bounds, and the optional force cap.
pub fn stick_hrep(
    model: &RobotModel,
    state: &RobotState,
    contacts: &ContactSet,
    limits: &ActuationLimits,
    gravity: &DVector<f64>,
    options: &FwpOptions,
) -> Result<HPolytope, FwpError> {
    if contacts.is_empty() {
        return Err(FwpError::InvalidInput(
            "stick system needs at least one active contact".into(),
        ));
    }
    let sys = assemble(model, state, contacts, limits, gravity, &options.tolerances)?;
    let all: Vec<usize> = (0..contacts.len()).collect();
    build_hrep(model, contacts, limits, &sys, &all, &[], options)
}

/// H-description of an opening system over `x_o = (f_s, u)`: the opened
/// contacts' forces are removed, the rest keep the stick rows, and each
/// opened contact contributes one non-penetration inequality.
pub fn opening_hrep(
    model: &RobotModel,
    state: &RobotState,
    contacts: &ContactSet,
    opening_subset: u32,
    limits: &ActuationLimits,
    gravity: &DVector<f64>,
    options: &FwpOptions,
) -> Result<HPolytope, FwpError> {
    let (stick, open) = split_subset(contacts, opening_subset)?;
    let sys = assemble(model, state, contacts, limits, gravity, &options.tolerances)?;
    build_hrep(model, contacts, limits, &sys, &stick, &open, options)
}

fn split_subset(contacts: &ContactSet, mask: u32) -> Result<(Vec<usize>, Vec<usize>), FwpError> {
    let nk = contacts.len();
    if nk > 32 {
        return Err(FwpError::InvalidInput("more than 32 contacts".into()));
    }
    let full: u32 = if nk == 32 { u32::MAX } else { (1 << nk) - 1 };
    if mask == 0 {
        return Err(FwpError::InvalidInput(
            "opening subset is empty: that is the stick case".into(),
        ));
    }
    if mask & !full != 0 {
        return Err(FwpError::InvalidInput(format!(
            "opening subset {mask:#b} references contacts beyond the {nk} active ones"
        )));
    }
    if mask == full {
        return Err(FwpError::InvalidInput(
            "opening every contact leaves no force to apply (pure flight)".into(),
        ));
    }
    let stick = (0..nk).filter(|i| mask & (1 << i) == 0).collect();
    let open = (0..nk).filter(|i| mask & (1 << i) != 0).collect();
    Ok((stick, open))
}

/// Assemble the H-polytope for a given stick/open split of the contacts.
fn build_hrep(
    model: &RobotModel,
    contacts: &ContactSet,
    limits: &ActuationLimits,
    sys: &Assembly,
    stick: &[usize],
    open: &[usize],
    options: &FwpOptions,
) -> Result<HPolytope, FwpError> {
    let t = sys.t;
    let na = sys.na;
    let ns = stick.len();
    let dim = t * ns + na;

    // Equalities: J_s M^{-1} J_s' f_s + J_s M^{-1} S_a u = J_s M^{-1} h - Jdot_s v.
    let mut c = DMatrix::zeros(t * ns, dim);
    let mut d = DVector::zeros(t * ns);
    for (row_block, &i) in stick.iter().enumerate() {
        let j_i = &sys.kin[i].jacobian_contact_frame;
        for (col_block, &k) in stick.iter().enumerate() {
            let block = j_i * &sys.minv_jt[k];
            c.view_mut((t * row_block, t * col_block), (t, t))
                .copy_from(&block);
        }
        c.view_mut((t * row_block, t * ns), (t, na))
            .copy_from(&(j_i * &sys.minv_sa));
        let rhs = j_i * &sys.minv_h - &sys.kin[i].bias_accel_contact_frame;
        d.rows_mut(t * row_block, t).copy_from(&rhs);
    }

    // Inequalities: block-diagonal friction cones, actuation box, one
    // non-penetration row per opened contact, optional force caps.
    let fdim = friction_dim(model.base);
    let cone_rows = fdim.cone_rows();
    let cap_rows = if options.force_cap.is_some() { 2 * t * ns } else { 0 };
    let rows = cone_rows * ns + 2 * na + open.len() + cap_rows;
    let mut a = DMatrix::zeros(rows, dim);
    let mut b = DVector::zeros(rows);
    let mut cursor = 0;

    for (col_block, &i) in stick.iter().enumerate() {
        let spec = FrictionSpec::new(contacts.contacts[i].mu, fdim)?;
        let cone = friction_hrep(&spec)?;
        a.view_mut((cursor, t * col_block), (cone_rows, t))
            .copy_from(cone.a());
        cursor += cone_rows;
    }

    let act = actuation_hrep(limits)?;
    a.view_mut((cursor, t * ns), (2 * na, na)).copy_from(act.a());
    b.rows_mut(cursor, 2 * na).copy_from(act.b());
    cursor += 2 * na;

    for &o in open {
        // Normal row of the opened contact's jacobian.
        let j_o = &sys.kin[o].jacobian_contact_frame;
        let normal_row = j_o.row(t - 1);
        for (col_block, &k) in stick.iter().enumerate() {
            let block = normal_row * &sys.minv_jt[k];
            for col in 0..t {
                a[(cursor, t * col_block + col)] = -block[col];
            }
        }
        let actuation_block = normal_row * &sys.minv_sa;
        for col in 0..na {
            a[(cursor, t * ns + col)] = -actuation_block[col];
        }
        let jdotv_normal = sys.kin[o].bias_accel_contact_frame[t - 1];
        let minv_h_normal = (normal_row * &sys.minv_h)[0];
        b[cursor] = jdotv_normal - minv_h_normal;
        cursor += 1;
    }

    if let Some(cap) = options.force_cap {
        if !(cap > 0.0) {
            return Err(FwpError::InvalidInput("force cap must be positive".into()));
        }
        for comp in 0..t * ns {
            a[(cursor, comp)] = 1.0;
            b[cursor] = cap;
            a[(cursor + 1, comp)] = -1.0;
            b[cursor + 1] = cap;
            cursor += 2;
        }
    }
    debug_assert_eq!(cursor, rows);

    HPolytope::new(a, b, c, d)
}

/// Wrench polytope with its enumeration diagnostics.
#[derive(Debug, Clone)]
struct ComputedSet {
    polytope: VPolytope,
    warnings: Vec<String>,
}

fn compute_wrench_set(
    model: &RobotModel,
    state: &RobotState,
    contacts: &ContactSet,
    keep: &[usize],
    hrep: &HPolytope,
    options: &FwpOptions,
) -> Result<ComputedSet, FwpError> {
    let tol = &options.tolerances;
    let enumeration = vertex_enum(hrep, tol)?;
    let map = wrench_map(model, &state.q, contacts, keep)?;
    let extended = map.extended(model.num_actuators());
    let mapped = enumeration.polytope.map(&extended, tol)?;
    let polytope = mapped.extreme_points(tol);
    Ok(ComputedSet {
        polytope,
        warnings: enumeration.warnings,
    })
}

/// Feasible wrench polytope with every contact sticking.
pub fn fwp_stick(
    model: &RobotModel,
    state: &RobotState,
    contacts: &ContactSet,
    limits: &ActuationLimits,
    gravity: &DVector<f64>,
    options: &FwpOptions,
) -> Result<VPolytope, FwpError> {
    let hrep = stick_hrep(model, state, contacts, limits, gravity, options)?;
    let all: Vec<usize> = (0..contacts.len()).collect();
    Ok(compute_wrench_set(model, state, contacts, &all, &hrep, options)?.polytope)
}

/// Feasible wrench polytope when the contacts in `subset` open.
pub fn fwp_opening(
    model: &RobotModel,
    state: &RobotState,
    contacts: &ContactSet,
    subset: u32,
    limits: &ActuationLimits,
    gravity: &DVector<f64>,
    options: &FwpOptions,
) -> Result<VPolytope, FwpError> {
    let hrep = opening_hrep(model, state, contacts, subset, limits, gravity, options)?;
    let (stick, _) = split_subset(contacts, subset)?;
    Ok(compute_wrench_set(model, state, contacts, &stick, &hrep, options)?.polytope)
}

/// Naive opening set: the stick computation over the reduced contact set,
/// with no non-penetration rows. Always a superset of [`fwp_opening`].
pub fn naive_fwp_opening(
    model: &RobotModel,
    state: &RobotState,
    contacts: &ContactSet,
    subset: u32,
    limits: &ActuationLimits,
    gravity: &DVector<f64>,
    options: &FwpOptions,
) -> Result<VPolytope, FwpError> {
    let (stick, _) = split_subset(contacts, subset)?;
    let reduced = ContactSet::new(
        stick
            .iter()
            .map(|&i| contacts.contacts[i].clone())
            .collect(),
    );
    fwp_stick(model, state, &reduced, limits, gravity, options)
}

/// Outcome for one attempted opening subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetDiagnostics {
    pub subset: u32,
    pub opened: Vec<String>,
    pub feasible: bool,
    pub bounded: bool,
    pub vertex_count: usize,
    pub affine_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// The complete result: the stick polytope, every non-empty opening
/// polytope keyed by subset bitmask, optional naive sets, and per-subset
/// diagnostics (including subsets that came back empty or failed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FwpResult {
    pub wrench_dim: usize,
    pub contact_names: Vec<String>,
    pub stick: VPolytope,
    pub stick_diagnostics: SubsetDiagnostics,
    pub opening: BTreeMap<u32, VPolytope>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub naive_opening: Option<BTreeMap<u32, VPolytope>>,
    pub diagnostics: Vec<SubsetDiagnostics>,
}

fn diagnostics_for(
    subset: u32,
    opened: Vec<String>,
    set: &ComputedSet,
    tol: &Tolerances,
) -> SubsetDiagnostics {
    let affine_dim = if set.polytope.is_empty() {
        None
    } else {
        affine_hull(&set.polytope, tol.hull)
            .ok()
            .map(|h| h.dim())
    };
    SubsetDiagnostics {
        subset,
        opened,
        feasible: !set.polytope.is_empty(),
        bounded: set.polytope.is_bounded(),
        vertex_count: set.polytope.num_vertices(),
        affine_dim,
        warnings: set.warnings.clone(),
        error: None,
    }
}

/// Run the full pipeline: the stick set plus every requested opening subset
/// (all `2^nk - 2` of them by default), in parallel, with per-subset
/// failures recorded rather than aborting the rest.
pub fn fwp_full(
    model: &RobotModel,
    state: &RobotState,
    contacts: &ContactSet,
    limits: &ActuationLimits,
    gravity: &DVector<f64>,
    options: &FwpOptions,
) -> Result<FwpResult, FwpError> {
    let nk = contacts.len();
    if nk == 0 {
        return Err(FwpError::InvalidInput(
            "the pipeline needs at least one active contact".into(),
        ));
    }

    let stick_hpoly = stick_hrep(model, state, contacts, limits, gravity, options)?;
    let all: Vec<usize> = (0..nk).collect();
    let stick_set = compute_wrench_set(model, state, contacts, &all, &stick_hpoly, options)?;
    let stick_diagnostics =
        diagnostics_for(0, Vec::new(), &stick_set, &options.tolerances);

    let masks: Vec<u32> = match &options.subsets {
        SubsetSelection::All => {
            if nk > options.max_enumerated_contacts {
                return Err(FwpError::InvalidInput(format!(
                    "{nk} contacts exceed the exhaustive-enumeration cap of {}; \
                     pass an explicit subset list",
                    options.max_enumerated_contacts
                )));
            }
            if nk == 1 {
                Vec::new()
            } else {
                (1..((1u32 << nk) - 1)).collect()
            }
        }
        SubsetSelection::Explicit(list) => {
            for &mask in list {
                split_subset(contacts, mask)?;
            }
            let mut sorted = list.clone();
            sorted.sort_unstable();
            sorted.dedup();
            sorted
        }
    };

    struct SubsetOutcome {
        mask: u32,
        diag: SubsetDiagnostics,
        polytope: Option<VPolytope>,
        naive: Option<VPolytope>,
    }

    let outcomes: Vec<SubsetOutcome> = masks
        .par_iter()
        .map(|&mask| {
            let opened: Vec<String> = (0..nk)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| contacts.contacts[i].name.clone())
                .collect();
            let result = opening_hrep(model, state, contacts, mask, limits, gravity, options)
                .and_then(|hrep| {
                    let (stick_idx, _) = split_subset(contacts, mask)?;
                    compute_wrench_set(model, state, contacts, &stick_idx, &hrep, options)
                });
            let naive = if options.naive {
                naive_fwp_opening(model, state, contacts, mask, limits, gravity, options).ok()
            } else {
                None
            };
            match result {
                Ok(set) => {
                    let diag = diagnostics_for(mask, opened, &set, &options.tolerances);
                    SubsetOutcome {
                        mask,
                        diag,
                        polytope: (!set.polytope.is_empty()).then_some(set.polytope),
                        naive: naive.filter(|p| !p.is_empty()),
                    }
                }
                Err(err) => SubsetOutcome {
                    mask,
                    diag: SubsetDiagnostics {
                        subset: mask,
                        opened,
                        feasible: false,
                        bounded: true,
                        vertex_count: 0,
                        affine_dim: None,
                        warnings: Vec::new(),
                        error: Some(err.to_string()),
                    },
                    polytope: None,
                    naive: naive.filter(|p| !p.is_empty()),
                },
            }
        })
        .collect();

    let mut opening = BTreeMap::new();
    let mut naive_opening = options.naive.then(BTreeMap::new);
    let mut diagnostics = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        if let Some(p) = outcome.polytope {
            opening.insert(outcome.mask, p.sorted_lexicographic());
        }
        if let (Some(map), Some(p)) = (naive_opening.as_mut(), outcome.naive) {
            map.insert(outcome.mask, p.sorted_lexicographic());
        }
        diagnostics.push(outcome.diag);
    }
    diagnostics.sort_by_key(|d| d.subset);

    Ok(FwpResult {
        wrench_dim: model.base.wrench_dim(),
        contact_names: contacts.names(),
        stick: stick_set.polytope.sorted_lexicographic(),
        stick_diagnostics,
        opening,
        naive_opening,
        diagnostics,
    })
}

/// Membership of a wrench in one configuration's polytope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetMembership {
    pub inside: bool,
    /// Signed distance to the boundary through the facet description:
    /// negative inside, positive outside. For degenerate sets the distance
    /// to the affine hull dominates when it is larger.
    pub signed_distance: f64,
}

/// Membership report across the stick set and every opening set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WrenchMembership {
    pub stick: Option<SetMembership>,
    pub opening: BTreeMap<u32, SetMembership>,
}

fn membership(
    poly: &VPolytope,
    w: &DVector<f64>,
    tol: &Tolerances,
) -> Result<Option<SetMembership>, FwpError> {
    if poly.is_empty() {
        return Ok(None);
    }
    let h = facet_enum(poly, tol)?;
    let mut distance = f64::NEG_INFINITY;
    for i in 0..h.num_inequalities() {
        let row = h.a().row(i);
        let norm = row.norm();
        if norm > 0.0 {
            distance = distance.max((row.dot(&w.transpose()) - h.b()[i]) / norm);
        }
    }
    for i in 0..h.num_equalities() {
        let row = h.c().row(i);
        let norm = row.norm();
        if norm > 0.0 {
            distance = distance.max((row.dot(&w.transpose()) - h.d()[i]).abs() / norm);
        }
    }
    if distance == f64::NEG_INFINITY {
        // No facets at all: a single point, distance in the max norm.
        distance = (poly.vertex(0) - w).amax();
    }
    // Tolerance relative to the coordinate scale of the set.
    let scale = (0..poly.num_vertices())
        .map(|j| poly.vertex(j).amax())
        .fold(0.0_f64, f64::max);
    Ok(Some(SetMembership {
        inside: distance <= tol.feasibility * (1.0 + scale),
        signed_distance: distance,
    }))
}

/// Which contact configurations can realize the wrench `w`.
pub fn check_wrench(
    result: &FwpResult,
    w: &DVector<f64>,
    tol: &Tolerances,
) -> Result<WrenchMembership, FwpError> {
    if w.len() != result.wrench_dim {
        return Err(FwpError::Dimension(format!(
            "wrench has {} entries, result is {}-dimensional",
            w.len(),
            result.wrench_dim
        )));
    }
    let stick = membership(&result.stick, w, tol)?;
    let mut opening = BTreeMap::new();
    for (&mask, poly) in &result.opening {
        if let Some(m) = membership(poly, w, tol)? {
            opening.insert(mask, m);
        }
    }
    Ok(WrenchMembership { stick, opening })
}

/// Orthonormal wrench directions along which the polytope has zero extent:
/// the system cannot exert any wrench component there.
pub fn non_actuated_directions(
    poly: &VPolytope,
    tol: f64,
) -> Result<DMatrix<f64>, FwpError> {
    if poly.is_empty() {
        return Err(FwpError::InvalidInput(
            "non-actuation analysis of an empty polytope".into(),
        ));
    }
    Ok(affine_hull(poly, tol)?.null_basis)
}
