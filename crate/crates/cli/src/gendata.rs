//! Generators for the shipped benchmark data: scenario JSON files and the
//! conforming triangulations used by the CC-DFM runs.

use std::path::Path;

use frackbench_core::error::Error;
use frackbench_core::scenario::{builtin_benchmark, load_scenario, BenchmarkId, Scenario};
use frackbench_core::triangulate::conforming_triangulation;

/// Triangle sizes tuned so the benchmark grids land near 1400 matrix cells
/// plus the fracture cells, the scale the comparisons are quoted at.
const B1_H: f64 = 55.0;
const B2_H: f64 = 0.0395;
const B3_H: f64 = 0.0395;

fn resolve(benchmark: Option<&str>, scenario: Option<&Path>) -> Result<Scenario, Error> {
    match (benchmark, scenario) {
        (Some(id), None) => {
            let id: BenchmarkId = id.parse()?;
            builtin_benchmark(id, Some(&crate::run::data_dir()))
        }
        (None, Some(path)) => load_scenario(path),
        _ => Err(Error::Scenario(
            "pass exactly one of --benchmark or --scenario".into(),
        )),
    }
}

pub fn gen_mesh(
    benchmark: Option<&str>,
    scenario: Option<&Path>,
    target_h: f64,
    out: &Path,
) -> Result<(), Error> {
    let scenario = resolve(benchmark, scenario)?;
    let mesh = conforming_triangulation(&scenario.domain, &scenario.fractures, target_h)?;
    if let Some(dir) = out.parent() {
        std::fs::create_dir_all(dir)?;
    }
    mesh.write_native_file(out)?;
    println!(
        "{}: {} cells, {} vertices, {} fracture faces",
        out.display(),
        mesh.n_cells(),
        mesh.n_vertices(),
        mesh.fracture_face_pairs().len()
    );
    Ok(())
}

/// Writes the shipped scenario files and conforming meshes.
pub fn gen_data(out: &Path) -> Result<(), Error> {
    let scenarios = out.join("scenarios");
    let meshes = out.join("meshes");
    std::fs::create_dir_all(&scenarios)?;
    std::fs::create_dir_all(&meshes)?;

    for (id, file) in [
        (BenchmarkId::B1, "benchmark1.json"),
        (BenchmarkId::B2a, "benchmark2a.json"),
        (BenchmarkId::B2b, "benchmark2b.json"),
        (BenchmarkId::B3a, "benchmark3a.json"),
        (BenchmarkId::B3b, "benchmark3b.json"),
    ] {
        let s = builtin_benchmark(id, None)?;
        s.save(&scenarios.join(file))?;
        println!("{}: {} fractures", file, s.fractures.len());
    }

    for (id, file, h) in [
        (BenchmarkId::B1, "b1_tri.fvmesh", B1_H),
        (BenchmarkId::B2a, "b2_tri.fvmesh", B2_H),
        (BenchmarkId::B3a, "b3_tri.fvmesh", B3_H),
    ] {
        let s = builtin_benchmark(id, None)?;
        let mesh = conforming_triangulation(&s.domain, &s.fractures, h)?;
        mesh.write_native_file(&meshes.join(file))?;
        println!(
            "{}: {} cells, {} fracture faces",
            file,
            mesh.n_cells(),
            mesh.fracture_face_pairs().len()
        );
    }
    Ok(())
}
