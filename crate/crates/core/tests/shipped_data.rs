//! Integrity of the shipped benchmark data: scenario files re-serialize
//! byte-identically and match the built-in definitions; shipped meshes
//! round-trip and conform to their fracture networks.

use std::path::{Path, PathBuf};

use frackbench_core::mesh::{read_mesh, tag_fracture_faces};
use frackbench_core::scenario::{builtin_benchmark, load_scenario, BenchmarkId};

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

#[test]
fn scenario_files_roundtrip_byte_identically() {
    let dir = data_dir().join("scenarios");
    let mut checked = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let original = std::fs::read_to_string(&path).unwrap();
        let scenario = load_scenario(&path).unwrap();
        let reserialized = scenario.to_json_string().unwrap();
        assert_eq!(
            original,
            reserialized,
            "{} does not re-serialize byte-identically",
            path.display()
        );
        checked += 1;
    }
    assert_eq!(checked, 5, "expected the five shipped scenarios");
}

#[test]
fn shipped_scenarios_match_builtins() {
    for (id, file) in [
        (BenchmarkId::B1, "benchmark1.json"),
        (BenchmarkId::B2a, "benchmark2a.json"),
        (BenchmarkId::B2b, "benchmark2b.json"),
        (BenchmarkId::B3a, "benchmark3a.json"),
        (BenchmarkId::B3b, "benchmark3b.json"),
    ] {
        let shipped = std::fs::read_to_string(data_dir().join("scenarios").join(file)).unwrap();
        let builtin = builtin_benchmark(id, None).unwrap().to_json_string().unwrap();
        assert_eq!(shipped, builtin, "{file} has drifted from the built-in definition");
    }
}

#[test]
fn shipped_meshes_roundtrip_and_conform() {
    for (id, file) in [
        (BenchmarkId::B1, "b1_tri.fvmesh"),
        (BenchmarkId::B2a, "b2_tri.fvmesh"),
        (BenchmarkId::B3a, "b3_tri.fvmesh"),
    ] {
        let path = data_dir().join("meshes").join(file);
        let mesh = read_mesh(&path).unwrap();
        let mut buf = Vec::new();
        mesh.write_native(&mut buf).unwrap();
        let original = std::fs::read(&path).unwrap();
        assert_eq!(original, buf, "{file} does not round-trip byte-identically");

        let scenario = builtin_benchmark(id, None).unwrap();
        let tags = tag_fracture_faces(&mesh, &scenario.fractures).unwrap();
        for (fi, f) in scenario.fractures.fractures.iter().enumerate() {
            let covered = tags.covered_length(fi, &scenario.fractures);
            let expect = f.geometry.length();
            assert!(
                (covered - expect).abs() <= 1e-9 * expect,
                "{file}: fracture {fi} covered {covered} of {expect}"
            );
        }
    }
}
