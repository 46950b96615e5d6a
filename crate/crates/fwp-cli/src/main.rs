//! `fwp`: compute and inspect feasible wrench polytopes of legged robots.
//!
//! Exit codes: 0 on success, 2 for schema or usage problems, 3 for numerical
//! failures. Data and summaries go to stdout, diagnostics to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};

use fwp::polytope::{facet_enum, vertex_enum, vpolytope_to_off};
use fwp::wrench::{check_wrench, fwp_full, non_actuated_directions, SubsetSelection};
use fwp::{ErrorClass, FwpError, FwpResult, Scenario, Tolerances, VPolytope};

const EXIT_SCHEMA: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "fwp",
    version,
    about = "Feasible wrench polytopes of legged robots under friction and actuation limits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline on a scenario file and write the result JSON.
    Compute {
        scenario: PathBuf,
        /// Output path for the result file.
        #[arg(short, long)]
        out: PathBuf,
        /// Also compute the naive opening sets (no non-penetration rows).
        #[arg(long)]
        naive: bool,
        /// "all" or comma-separated subset bitmasks, overriding the scenario.
        #[arg(long)]
        subsets: Option<String>,
        /// Per-component force cap restoring boundedness.
        #[arg(long)]
        fmax: Option<f64>,
        #[arg(long, help = "Rank tolerance (relative)")]
        tol_rank: Option<f64>,
        #[arg(long, help = "Vertex deduplication tolerance")]
        tol_vert: Option<f64>,
        #[arg(long, help = "Constraint satisfaction tolerance")]
        tol_feas: Option<f64>,
        #[arg(long, help = "Affine hull tolerance (relative)")]
        tol_hull: Option<f64>,
        #[arg(long, help = "Established-contact speed tolerance")]
        tol_est: Option<f64>,
    },
    /// Report which contact configurations can realize a wrench.
    Check {
        result: PathBuf,
        /// Comma-separated wrench components, torque first.
        #[arg(long)]
        wrench: String,
    },
    /// List non-actuated wrench directions of each configuration.
    Nullspace {
        result: PathBuf,
        /// Relative singular-value cutoff for the affine hull.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Export result polytopes as JSON, OFF meshes, or CSV vertex tables.
    Export {
        result: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        /// Output prefix; files are written as <prefix>_stick.<ext> etc.
        #[arg(long)]
        out: String,
        /// For OFF export of 6-D results: fix three coordinates, e.g.
        /// "tau_x=0,tau_y=0,tau_z=0" (axis names or indices).
        #[arg(long)]
        slice: Option<String>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Json,
    Off,
    Csv,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("FWP_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        } else {
            eprintln!("warning: ignoring non-numeric FWP_THREADS={threads}");
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err.class() {
                ErrorClass::Input => EXIT_SCHEMA,
                ErrorClass::Numerical => EXIT_NUMERICAL,
            })
        }
    }
}

fn run(command: Command) -> Result<(), FwpError> {
    match command {
        Command::Compute {
            scenario,
            out,
            naive,
            subsets,
            fmax,
            tol_rank,
            tol_vert,
            tol_feas,
            tol_hull,
            tol_est,
        } => {
            let scenario = Scenario::from_path(&scenario)?;
            let mut built = scenario.build()?;
            if naive {
                built.options.naive = true;
            }
            if let Some(fmax) = fmax {
                built.options.force_cap = Some(fmax);
            }
            if let Some(spec) = subsets {
                built.options.subsets = parse_subsets(&spec)?;
            }
            let t = &mut built.options.tolerances;
            apply(tol_rank, &mut t.rank);
            apply(tol_vert, &mut t.vertex);
            apply(tol_feas, &mut t.feasibility);
            apply(tol_hull, &mut t.hull);
            apply(tol_est, &mut t.established);

            let result = fwp_full(
                &built.model,
                &built.state,
                &built.contacts,
                &built.limits,
                &built.gravity,
                &built.options,
            )?;
            write_result(&out, &result)?;
            print_summary(&result);
            Ok(())
        }
        Command::Check { result, wrench } => {
            let result = load_result(&result)?;
            let w = parse_vector(&wrench)?;
            if w.len() != result.wrench_dim {
                return Err(FwpError::Dimension(format!(
                    "wrench has {} components, result is {}-dimensional",
                    w.len(),
                    result.wrench_dim
                )));
            }
            let report = check_wrench(&result, &w, &Tolerances::default())?;
            match report.stick {
                Some(m) => println!("stick: {}", membership_line(&m)),
                None => println!("stick: empty set"),
            }
            for (mask, m) in &report.opening {
                println!(
                    "open {mask} [{}]: {}",
                    opened_names(&result, *mask).join(","),
                    membership_line(m)
                );
            }
            Ok(())
        }
        Command::Nullspace { result, tol } => {
            let result = load_result(&result)?;
            let tol = tol.unwrap_or(Tolerances::default().hull);
            if result.stick.is_empty() {
                return Err(FwpError::Numerical(
                    "result contains an empty stick polytope; nothing to analyze".into(),
                ));
            }
            print_nullspace("stick", &result.stick, tol)?;
            for (mask, poly) in &result.opening {
                let label = format!("open {mask} [{}]", opened_names(&result, *mask).join(","));
                print_nullspace(&label, poly, tol)?;
            }
            Ok(())
        }
        Command::Export {
            result,
            format,
            out,
            slice,
        } => {
            let result = load_result(&result)?;
            let mut sets: Vec<(String, &VPolytope)> =
                vec![("stick".to_string(), &result.stick)];
            for (mask, poly) in &result.opening {
                sets.push((format!("open_{mask}"), poly));
            }
            if let Some(naive) = &result.naive_opening {
                for (mask, poly) in naive {
                    sets.push((format!("naive_open_{mask}"), poly));
                }
            }
            let slice = slice
                .map(|s| parse_slice(&s, result.wrench_dim))
                .transpose()?;
            for (label, poly) in sets {
                let path = export_one(&out, &label, poly, format, slice.as_deref(), result.wrench_dim)?;
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn apply(src: Option<f64>, dst: &mut f64) {
    if let Some(x) = src {
        *dst = x;
    }
}

fn parse_subsets(spec: &str) -> Result<SubsetSelection, FwpError> {
    if spec.trim() == "all" {
        return Ok(SubsetSelection::All);
    }
    let masks = spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| FwpError::InvalidInput(format!("bad subset mask `{s}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SubsetSelection::Explicit(masks))
}

fn parse_vector(text: &str) -> Result<DVector<f64>, FwpError> {
    let values = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| FwpError::InvalidInput(format!("bad number `{s}` in vector")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DVector::from_vec(values))
}

fn load_result(path: &Path) -> Result<FwpResult, FwpError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| FwpError::schema("<file>", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| FwpError::schema("<result>", e.to_string()))
}

fn write_result(path: &Path, result: &FwpResult) -> Result<(), FwpError> {
    let mut text = serde_json::to_string_pretty(result)
        .map_err(|e| FwpError::Numerical(format!("serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| FwpError::Numerical(format!("cannot write {}: {e}", path.display())))
}

fn print_summary(result: &FwpResult) {
    println!(
        "{:<28} {:>8} {:>9} {:>8} {:>11}",
        "configuration", "feasible", "vertices", "bounded", "affine-dim"
    );
    let row = |label: &str, d: &fwp::wrench::SubsetDiagnostics| {
        println!(
            "{:<28} {:>8} {:>9} {:>8} {:>11}",
            label,
            if d.feasible { "yes" } else { "no" },
            d.vertex_count,
            if d.feasible {
                if d.bounded { "yes" } else { "no" }
            } else {
                "-"
            },
            d.affine_dim
                .map(|k| k.to_string())
                .unwrap_or_else(|| "-".into()),
        );
    };
    row("stick", &result.stick_diagnostics);
    for d in &result.diagnostics {
        let label = format!("open {} [{}]", d.subset, d.opened.join(","));
        row(&label, d);
        if let Some(err) = &d.error {
            eprintln!("subset {}: {err}", d.subset);
        }
    }
}

fn membership_line(m: &fwp::wrench::SetMembership) -> String {
    format!(
        "{} (signed distance {:+.6e})",
        if m.inside { "inside" } else { "outside" },
        m.signed_distance
    )
}

fn opened_names(result: &FwpResult, mask: u32) -> Vec<String> {
    result
        .contact_names
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, n)| n.clone())
        .collect()
}

fn print_nullspace(label: &str, poly: &VPolytope, tol: f64) -> Result<(), FwpError> {
    let basis = non_actuated_directions(poly, tol)?;
    if basis.ncols() == 0 {
        println!("{label}: none (full-dimensional wrench set)");
        return Ok(());
    }
    println!("{label}: {} non-actuated direction(s)", basis.ncols());
    for j in 0..basis.ncols() {
        let col: Vec<String> = basis
            .column(j)
            .iter()
            .map(|x| format!("{x:+.6}"))
            .collect();
        println!("  [{}]", col.join(", "));
    }
    Ok(())
}

fn wrench_axis_names(dim: usize) -> Vec<&'static str> {
    match dim {
        3 => vec!["tau", "fx", "fz"],
        6 => vec!["tau_x", "tau_y", "tau_z", "fx", "fy", "fz"],
        _ => vec![],
    }
}

/// Parse "axis=value,..." with axis names or indices; exactly enough to
/// bring the dimension down to 3.
fn parse_slice(spec: &str, dim: usize) -> Result<Vec<(usize, f64)>, FwpError> {
    let names = wrench_axis_names(dim);
    let mut fixed = Vec::new();
    for part in spec.split(',') {
        let (axis, value) = part.split_once('=').ok_or_else(|| {
            FwpError::InvalidInput(format!("bad slice component `{part}`, expected axis=value"))
        })?;
        let axis = axis.trim();
        let idx = names
            .iter()
            .position(|n| *n == axis)
            .or_else(|| axis.parse::<usize>().ok().filter(|&i| i < dim))
            .ok_or_else(|| FwpError::InvalidInput(format!("unknown wrench axis `{axis}`")))?;
        let value = value.trim().parse::<f64>().map_err(|_| {
            FwpError::InvalidInput(format!("bad slice value `{value}` for axis `{axis}`"))
        })?;
        fixed.push((idx, value));
    }
    fixed.sort_by_key(|&(i, _)| i);
    fixed.dedup_by_key(|&mut (i, _)| i);
    if dim - fixed.len() != 3 {
        return Err(FwpError::InvalidInput(format!(
            "slice must fix {} coordinates of a {dim}-D wrench, got {}",
            dim - 3,
            fixed.len()
        )));
    }
    Ok(fixed)
}

fn export_one(
    prefix: &str,
    label: &str,
    poly: &VPolytope,
    format: ExportFormat,
    slice: Option<&[(usize, f64)]>,
    dim: usize,
) -> Result<PathBuf, FwpError> {
    let tol = Tolerances::default();
    let (path, contents): (PathBuf, String) = match format {
        ExportFormat::Json => {
            let text = serde_json::to_string_pretty(poly)
                .map_err(|e| FwpError::Numerical(e.to_string()))?;
            (PathBuf::from(format!("{prefix}_{label}.json")), text + "\n")
        }
        ExportFormat::Csv => {
            let names = wrench_axis_names(dim);
            let mut text = names.join(",");
            text.push('\n');
            let sorted = poly.sorted_lexicographic();
            for j in 0..sorted.num_vertices() {
                let row: Vec<String> = sorted.vertex(j).iter().map(|x| format!("{x}")).collect();
                text.push_str(&row.join(","));
                text.push('\n');
            }
            (PathBuf::from(format!("{prefix}_{label}.csv")), text)
        }
        ExportFormat::Off => {
            let three_d = if dim == 3 {
                poly.clone()
            } else {
                let slice = slice.ok_or_else(|| {
                    FwpError::InvalidInput(
                        "OFF export of a 6-D result needs --slice fixing three coordinates".into(),
                    )
                })?;
                slice_to_3d(poly, slice, &tol)?
            };
            let off = vpolytope_to_off(&three_d, &tol)?;
            (PathBuf::from(format!("{prefix}_{label}.off")), off)
        }
    };
    std::fs::write(&path, contents)
        .map_err(|e| FwpError::Numerical(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Intersect a wrench polytope with an axis-aligned slice and project onto
/// the free coordinates.
fn slice_to_3d(
    poly: &VPolytope,
    fixed: &[(usize, f64)],
    tol: &Tolerances,
) -> Result<VPolytope, FwpError> {
    if poly.is_empty() {
        return Ok(VPolytope::empty(3));
    }
    let dim = poly.dim();
    let h = facet_enum(poly, tol)?;
    let mut c = DMatrix::zeros(fixed.len(), dim);
    let mut d = DVector::zeros(fixed.len());
    for (row, &(axis, value)) in fixed.iter().enumerate() {
        c[(row, axis)] = 1.0;
        d[row] = value;
    }
    let sliced = h.intersect_equalities(c, d)?;
    let e = vertex_enum(&sliced, tol)?;
    let free: Vec<usize> = (0..dim)
        .filter(|i| !fixed.iter().any(|&(a, _)| a == *i))
        .collect();
    let mut proj = DMatrix::zeros(3, dim);
    for (r, &i) in free.iter().enumerate() {
        proj[(r, i)] = 1.0;
    }
    e.polytope.map(&proj, tol)
}
