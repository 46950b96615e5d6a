//! OFF mesh export for three-dimensional vertex polytopes. Wrench polytopes
//! of planar scenarios are 3-D, and spatial results are sliced down to 3-D
//! before export, so this is the single mesh format the tooling needs.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use nalgebra::Vector3;

use super::{facet_enum, VPolytope};
use crate::{FwpError, Tolerances};

/// Render a 3-D polytope as an OFF mesh.
///
/// Output is deterministic: vertices are ordered lexicographically and each
/// face starts at its smallest vertex index, oriented outward. Degenerate
/// sets (affine dimension below 3) are emitted as vertices with a single
/// polygon for planar sets and no faces below that.
pub fn vpolytope_to_off(v: &VPolytope, tol: &Tolerances) -> Result<String, FwpError> {
    if v.dim() != 3 {
        return Err(FwpError::Dimension(format!(
            "OFF export needs a 3-D polytope, got dimension {}",
            v.dim()
        )));
    }
    if !v.is_bounded() {
        return Err(FwpError::InvalidInput(
            "OFF export requires a bounded polytope".into(),
        ));
    }
    if v.is_empty() {
        return Ok("OFF\n0 0 0\n".to_string());
    }

    let poly = v.extreme_points(tol).sorted_lexicographic();
    let m = poly.num_vertices();
    let verts: Vec<Vector3<f64>> = (0..m)
        .map(|j| {
            let c = poly.vertex(j);
            Vector3::new(c[0], c[1], c[2])
        })
        .collect();

    let h = facet_enum(&poly, tol)?;
    let scale = verts
        .iter()
        .map(|p| p.amax())
        .fold(1.0_f64, f64::max);
    let incident_eps = tol.hull.max(tol.feasibility) * (1.0 + scale);

    let mut faces: Vec<Vec<usize>> = Vec::new();
    if h.num_equalities() <= 1 {
        // Full-dimensional (0 equalities) or planar (1 equality): polygonal
        // facets come from the inequality rows; for the planar case the
        // single loop is the polygon itself.
        let rows = if h.num_equalities() == 0 {
            (0..h.num_inequalities())
                .map(|i| (h.a().row(i).transpose(), h.b()[i]))
                .collect::<Vec<_>>()
        } else {
            let normal = h.c().row(0).transpose();
            let offset = h.d()[0];
            vec![(normal, offset)]
        };
        for (normal_d, offset) in rows {
            let normal = Vector3::new(normal_d[0], normal_d[1], normal_d[2]);
            let members: Vec<usize> = (0..m)
                .filter(|&j| (normal.dot(&verts[j]) - offset).abs() <= incident_eps)
                .collect();
            if members.len() < 3 {
                continue;
            }
            faces.push(order_face(&verts, &members, &normal));
        }
    }

    faces.sort();
    let edges: BTreeSet<(usize, usize)> = faces
        .iter()
        .flat_map(|f| {
            f.iter()
                .zip(f.iter().cycle().skip(1))
                .take(f.len())
                .map(|(&a, &b)| (a.min(b), a.max(b)))
                .collect::<Vec<_>>()
        })
        .collect();

    let mut out = String::new();
    out.push_str("OFF\n");
    let _ = writeln!(out, "{} {} {}", m, faces.len(), edges.len());
    for p in &verts {
        let _ = writeln!(out, "{} {} {}", fmt_coord(p.x), fmt_coord(p.y), fmt_coord(p.z));
    }
    for f in &faces {
        let _ = write!(out, "{}", f.len());
        for &i in f {
            let _ = write!(out, " {i}");
        }
        out.push('\n');
    }
    Ok(out)
}

/// Order face members counterclockwise about the outward normal, starting at
/// the smallest vertex index.
fn order_face(verts: &[Vector3<f64>], members: &[usize], normal: &Vector3<f64>) -> Vec<usize> {
    let centroid = members
        .iter()
        .fold(Vector3::zeros(), |acc, &j| acc + verts[j])
        / members.len() as f64;
    let n = normal.normalize();
    // In-plane frame.
    let seed = if n.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let u = (seed - n * seed.dot(&n)).normalize();
    let w = n.cross(&u);
    let mut ordered: Vec<usize> = members.to_vec();
    ordered.sort_by(|&a, &b| {
        let pa = verts[a] - centroid;
        let pb = verts[b] - centroid;
        let ta = pa.dot(&w).atan2(pa.dot(&u));
        let tb = pb.dot(&w).atan2(pb.dot(&u));
        ta.total_cmp(&tb)
    });
    // Outward orientation.
    if ordered.len() >= 3 {
        let e1 = verts[ordered[1]] - verts[ordered[0]];
        let e2 = verts[ordered[2]] - verts[ordered[0]];
        if e1.cross(&e2).dot(&n) < 0.0 {
            ordered.reverse();
        }
    }
    // Canonical rotation: begin at the smallest index.
    let start = ordered
        .iter()
        .enumerate()
        .min_by_key(|(_, &v)| v)
        .map(|(i, _)| i)
        .unwrap_or(0);
    ordered.rotate_left(start);
    ordered
}

fn fmt_coord(x: f64) -> String {
    // Shortest round-trip representation keeps files byte-stable.
    let mut buf = ryu_format(x);
    if buf == "-0" {
        buf = "0".to_string();
    }
    buf
}

fn ryu_format(x: f64) -> String {
    // `{}` on f64 is already the shortest round-trip form in Rust.
    format!("{x}")
}
