//! End-to-end checks of the command-line interface: exit codes, file
//! outputs, and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fwp_bin() -> &'static str {
    env!("CARGO_BIN_EXE_fwp")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(fwp_bin())
        .args(args)
        .output()
        .expect("spawn fwp")
}

#[test]
fn compute_writes_a_result_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("result.json");
    let output = run(&[
        "compute",
        fixture("planar_point_mass.json").to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("stick"), "summary missing: {stdout}");
    let text = std::fs::read_to_string(&out).unwrap();
    let result: fwp::FwpResult = serde_json::from_str(&text).unwrap();
    assert_eq!(result.stick.num_vertices(), 1);
    assert!(result.opening.is_empty());
}

#[test]
fn malformed_scenario_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = dir.path().join("result.json");
    let output = run(&[
        "compute",
        bad.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn contact_velocity_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("planar_point_mass.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["state"]["base_velocity"] = serde_json::json!([0.0, 0.5, 0.0]);
    let moved = dir.path().join("moving.json");
    std::fs::write(&moved, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = dir.path().join("result.json");
    let output = run(&["compute", moved.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("not established"), "stderr: {stderr}");
}

#[test]
fn check_reports_membership_per_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("result.json");
    let status = run(&[
        "compute",
        fixture("planar_biped.json").to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());

    // The total weight of the biped is 13 kg.
    let inside = run(&["check", out.to_str().unwrap(), "--wrench", "0,0,127.53"]);
    assert!(inside.status.success());
    let text = String::from_utf8_lossy(&inside.stdout);
    assert!(text.contains("stick: inside"), "got: {text}");

    let outside = run(&["check", out.to_str().unwrap(), "--wrench", "0,1e6,127.53"]);
    let text = String::from_utf8_lossy(&outside.stdout);
    assert!(text.contains("stick: outside"), "got: {text}");
    assert!(!text.contains(" inside"), "got: {text}");

    // Wrong dimension is a usage error.
    let bad = run(&["check", out.to_str().unwrap(), "--wrench", "0,0"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn export_formats_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("result.json");
    run(&[
        "compute",
        fixture("planar_biped.json").to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    let prefix = dir.path().join("export");
    let prefix_str = prefix.to_str().unwrap();

    // JSON export loads back as a polytope.
    let output = run(&["export", out.to_str().unwrap(), "--format", "json", "--out", prefix_str]);
    assert!(output.status.success());
    let poly_text = std::fs::read_to_string(format!("{prefix_str}_stick.json")).unwrap();
    let poly: fwp::VPolytope = serde_json::from_str(&poly_text).unwrap();
    assert!(poly.num_vertices() > 0);

    // CSV has the wrench axis header and one row per vertex.
    let output = run(&["export", out.to_str().unwrap(), "--format", "csv", "--out", prefix_str]);
    assert!(output.status.success());
    let csv = std::fs::read_to_string(format!("{prefix_str}_stick.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "tau,fx,fz");
    assert_eq!(csv.lines().count(), 1 + poly.num_vertices());

    // OFF is a valid mesh header for the 3-D planar result.
    let output = run(&["export", out.to_str().unwrap(), "--format", "off", "--out", prefix_str]);
    assert!(output.status.success());
    let off = std::fs::read_to_string(format!("{prefix_str}_stick.off")).unwrap();
    assert!(off.starts_with("OFF\n"));
    let counts: Vec<usize> = off
        .lines()
        .nth(1)
        .unwrap()
        .split_whitespace()
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(counts[0], poly.num_vertices());
    assert!(counts[1] >= 4, "a 3-D polytope has at least 4 faces");

    // Unsupported slice spec on a planar result is fine (ignored), but a
    // 6-D result without a slice is a usage error.
    let exo_out = dir.path().join("exo.json");
    run(&[
        "compute",
        fixture("spatial_exo.json").to_str().unwrap(),
        "-o",
        exo_out.to_str().unwrap(),
    ]);
    let noslice = run(&["export", exo_out.to_str().unwrap(), "--format", "off", "--out", prefix_str]);
    assert_eq!(noslice.status.code(), Some(2));
    let sliced = run(&[
        "export",
        exo_out.to_str().unwrap(),
        "--format",
        "off",
        "--out",
        prefix_str,
        "--slice",
        "tau_x=0,tau_z=0,fy=0",
    ]);
    assert!(
        sliced.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&sliced.stderr)
    );
}

#[test]
fn nullspace_lists_blocked_directions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exo.json");
    run(&[
        "compute",
        fixture("spatial_exo.json").to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    let output = run(&["nullspace", out.to_str().unwrap()]);
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("stick: 1 non-actuated direction"), "got: {text}");
}

#[test]
fn explicit_subset_list_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("result.json");
    let output = run(&[
        "compute",
        fixture("planar_biped.json").to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
        "--subsets",
        "2",
    ]);
    assert!(output.status.success());
    let result: fwp::FwpResult =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(result.diagnostics.len(), 1);
    assert_eq!(result.diagnostics[0].subset, 2);
}
