//! The run pipeline: scenario and mesh resolution, solving, artifact
//! emission (VTK, native field, CSVs, optional MatrixMarket export).

use std::path::{Path, PathBuf};

use frackbench_core::ccdfm::{self, IntersectionMode};
use frackbench_core::discrete::DiscreteSolution;
use frackbench_core::edfm;
use frackbench_core::error::Error;
use frackbench_core::geometry::{Point2, Segment2};
use frackbench_core::linalg;
use frackbench_core::mesh::{
    build_boundary_fitted_quads, build_structured_quads, read_mesh, Mesh,
};
use frackbench_core::postproc::{self, SummaryRow};
use frackbench_core::reference::{
    build_equidimensional_grid, solve_reference, ReferenceField, DEFAULT_GRADING,
};
use frackbench_core::scenario::{builtin_benchmark, load_scenario, BenchmarkId, Scenario};
use frackbench_core::vtk;

use crate::config::{LineSpec, Method, RunConfig};

/// Sanity guard applied to every run: a dropped coupling or sign error
/// breaks these by many orders of magnitude, while the f64 flux-evaluation
/// floor of extreme-contrast reference systems stays well below.
const CONSERVATION_GUARD: f64 = 1e-6;

/// Environment variable naming the benchmark-data directory (defaults to
/// `data`).
pub const DATA_ENV: &str = "FRACKBENCH_DATA";

pub fn data_dir() -> PathBuf {
    std::env::var_os(DATA_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data"))
}

fn resolve_scenario(config: &RunConfig) -> Result<Scenario, Error> {
    match (&config.benchmark, &config.scenario) {
        (Some(_), Some(_)) => Err(Error::Scenario(
            "pass either --benchmark or --scenario, not both".into(),
        )),
        (Some(id), None) => {
            let id: BenchmarkId = id.parse()?;
            builtin_benchmark(id, Some(&data_dir()))
        }
        (None, Some(path)) => load_scenario(path),
        (None, None) => Err(Error::Scenario(
            "a scenario is required: --benchmark <id> or --scenario <file>".into(),
        )),
    }
}

/// Snap lines that make a structured grid conform to an axis-aligned
/// network: fracture lines plus their endpoint coordinates.
fn conforming_snap_lines(scenario: &Scenario) -> Result<(Vec<f64>, Vec<f64>), Error> {
    let tol = scenario.tolerance();
    let mut snap_x = Vec::new();
    let mut snap_y = Vec::new();
    for (i, f) in scenario.fractures.fractures.iter().enumerate() {
        let a = f.geometry.a;
        let b = f.geometry.b;
        if (a.x - b.x).abs() <= tol {
            snap_x.push(a.x);
            snap_y.push(a.y);
            snap_y.push(b.y);
        } else if (a.y - b.y).abs() <= tol {
            snap_y.push(a.y);
            snap_x.push(a.x);
            snap_x.push(b.x);
        } else {
            return Err(Error::Scenario(format!(
                "fracture {i} is not axis-aligned; a structured grid cannot conform to it, pass a conforming --mesh file instead"
            )));
        }
    }
    Ok((snap_x, snap_y))
}

fn resolve_mesh(scenario: &Scenario, method: Method, config: &RunConfig) -> Result<Mesh, Error> {
    if let Some(path) = &config.mesh {
        return read_mesh(path);
    }
    let Some((nx, ny)) = config.parse_grid()? else {
        return Err(Error::Scenario(
            "a mesh is required: --mesh <file> or --grid NXxNY".into(),
        ));
    };
    let bb = scenario.bounding_box();
    let is_rectangle = scenario.domain.len() == 4
        && scenario.domain.iter().all(|v| {
            let tol = scenario.tolerance();
            ((v.x - bb.min.x).abs() <= tol || (v.x - bb.max.x).abs() <= tol)
                && ((v.y - bb.min.y).abs() <= tol || (v.y - bb.max.y).abs() <= tol)
        });
    match method {
        Method::Ccdfm | Method::CcdfmStar => {
            if !is_rectangle {
                return Err(Error::Scenario(
                    "structured conforming grids need a rectangular domain; pass a conforming --mesh file".into(),
                ));
            }
            let (snap_x, snap_y) = conforming_snap_lines(scenario)?;
            build_structured_quads(
                bb.min.x, bb.min.y, bb.max.x, bb.max.y, nx, ny, &snap_x, &snap_y,
            )
        }
        Method::Edfm => {
            if is_rectangle {
                build_structured_quads(bb.min.x, bb.min.y, bb.max.x, bb.max.y, nx, ny, &[], &[])
            } else {
                build_boundary_fitted_quads(&scenario.domain, nx, ny)
            }
        }
        Method::Reference => unreachable!("reference grids are built from grading parameters"),
    }
}

fn load_lines(path: &Path) -> Result<Vec<LineSpec>, Error> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn check_conservation(solution: &DiscreteSolution) -> Result<(), Error> {
    let rep = solution.conservation();
    println!(
        "conservation: max residual {:.3e} (relative {:.3e}, backward error {:.3e}), global imbalance {:.3e}",
        rep.max_residual, rep.relative_residual, rep.backward_error, rep.global_imbalance
    );
    if rep.backward_error > CONSERVATION_GUARD || rep.global_imbalance > CONSERVATION_GUARD {
        return Err(Error::Solver(format!(
            "conservation violated: backward error {:.3e}, imbalance {:.3e}",
            rep.backward_error, rep.global_imbalance
        )));
    }
    Ok(())
}

fn write_lines(
    out: &Path,
    specs: &[LineSpec],
    mesh: &Mesh,
    scenario: &Scenario,
    solution: &DiscreteSolution,
) -> Result<(), Error> {
    for (i, spec) in specs.iter().enumerate() {
        let line = Segment2::new(Point2::from(spec.a), Point2::from(spec.b));
        let sample = postproc::sample_line(
            mesh,
            &solution.matrix_pressure,
            &solution.fracture_elements,
            &scenario.fractures,
            &line,
            spec.n,
        );
        let name = if spec.name.is_empty() {
            format!("line_{i}.csv")
        } else {
            format!("line_{}.csv", spec.name)
        };
        std::fs::write(out.join(name), sample.to_csv())?;
    }
    Ok(())
}

/// Runs one configuration to completion, writing all artifacts into the
/// output directory.
pub fn run(config: &RunConfig) -> Result<(), Error> {
    let method: Method = config
        .method
        .as_deref()
        .ok_or_else(|| Error::Scenario("a --method is required".into()))?
        .parse()?;
    let scenario = resolve_scenario(config)?;
    let out = config.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out)?;
    let line_specs = match &config.lines {
        Some(path) => load_lines(path)?,
        None => Vec::new(),
    };

    if method == Method::Reference {
        let cells_across = config.cells_across.unwrap_or(10);
        let grading = config.grading.unwrap_or(DEFAULT_GRADING);
        let mesh = build_equidimensional_grid(&scenario, cells_across, grading)?;
        println!(
            "reference grid: {} cells ({} vertices)",
            mesh.n_cells(),
            mesh.n_vertices()
        );
        let (field, solution) = solve_reference(&scenario, &mesh, cells_across, grading)?;
        check_conservation(&solution)?;
        field.write_file(&out.join("reference.field"))?;
        {
            let f = std::fs::File::create(out.join("solution.vtk"))?;
            vtk::write_cells(
                std::io::BufWriter::new(f),
                &mesh,
                &solution.matrix_pressure,
                field_name(&scenario),
            )?;
        }
        write_lines(&out, &line_specs, &mesh, &scenario, &solution)?;
        let row = summary_row(&scenario, "reference", &solution, None, config.report)?;
        finish(&out, config, &solution, row)?;
        return Ok(());
    }

    let mesh = resolve_mesh(&scenario, method, config)?;
    let solution = match method {
        Method::Ccdfm => ccdfm::solve(&scenario, &mesh, IntersectionMode::Eliminate)?,
        Method::CcdfmStar => ccdfm::solve(&scenario, &mesh, IntersectionMode::Keep)?,
        Method::Edfm => edfm::solve(&scenario, &mesh)?,
        Method::Reference => unreachable!(),
    };
    check_conservation(&solution)?;

    {
        let f = std::fs::File::create(out.join("solution.vtk"))?;
        vtk::write_cells(
            std::io::BufWriter::new(f),
            &mesh,
            &solution.matrix_pressure,
            field_name(&scenario),
        )?;
    }
    if !solution.fracture_elements.is_empty() {
        let f = std::fs::File::create(out.join("fractures.vtk"))?;
        vtk::write_fracture_lines(
            std::io::BufWriter::new(f),
            &solution.fracture_elements,
            field_name(&scenario),
        )?;
    }
    // matrix part in the reference-field format, for reuse as a reference
    let field = ReferenceField {
        mesh: mesh.clone(),
        pressures: solution.matrix_pressure.clone(),
        metadata: Default::default(),
    };
    field.write_file(&out.join("solution.field"))?;

    let errors = match &config.reference {
        Some(path) => {
            let reference = ReferenceField::read_file(path)?;
            let report = postproc::compute_errors(
                &mesh,
                &solution.matrix_pressure,
                &solution.fracture_elements,
                &scenario.fractures,
                &reference,
            )?;
            println!(
                "errors vs reference: err_m {:.4e}, err_f {:.4e} (dp_ref {:.4e})",
                report.err_m, report.err_f, report.dp_ref
            );
            Some(report)
        }
        None => None,
    };

    write_lines(&out, &line_specs, &mesh, &scenario, &solution)?;
    let row = summary_row(&scenario, &method.to_string(), &solution, errors.as_ref().map(|e| (e.err_m, e.err_f)), config.report)?;
    finish(&out, config, &solution, row)?;
    Ok(())
}

fn field_name(scenario: &Scenario) -> &'static str {
    match scenario.field {
        frackbench_core::scenario::FieldKind::Pressure => "pressure",
        frackbench_core::scenario::FieldKind::Head => "head",
    }
}

fn summary_row(
    scenario: &Scenario,
    method: &str,
    solution: &DiscreteSolution,
    errors: Option<(f64, f64)>,
    report: bool,
) -> Result<SummaryRow, Error> {
    let (nnz_density, cond2) = if report {
        let stats = linalg::matrix_stats(&solution.sparse)?;
        let status = match stats.status {
            linalg::EstimateStatus::Converged => "converged",
            linalg::EstimateStatus::LowerBound => "lower bound (iteration cap)",
        };
        println!(
            "matrix: nnz/size^2 {:.4e}, cond2 {:.4e} [{status}]",
            stats.nnz_density, stats.cond2
        );
        (Some(stats.nnz_density), Some(stats.cond2))
    } else {
        (None, None)
    };
    Ok(SummaryRow {
        scenario: scenario.name.clone(),
        method: method.to_string(),
        err_m: errors.map(|e| e.0),
        err_f: errors.map(|e| e.1),
        nnz_density,
        cond2,
        dofs: solution.dofs,
    })
}

fn finish(
    out: &Path,
    config: &RunConfig,
    solution: &DiscreteSolution,
    row: SummaryRow,
) -> Result<(), Error> {
    if config.export_matrix {
        let f = std::fs::File::create(out.join("matrix.mtx"))?;
        linalg::write_matrix_market(&solution.sparse, std::io::BufWriter::new(f))?;
    }
    let csv = postproc::summary_csv(std::slice::from_ref(&row));
    std::fs::write(out.join("summary.csv"), &csv)?;
    print!("{csv}");
    println!("dofs: {}", row.dofs);
    Ok(())
}
