//! End-to-end tests of the command-line surface: artifact emission,
//! determinism, error codes and the compare pipeline.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_frackbench"))
}

fn repo_data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("frackbench-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn run_writes_artifacts_and_is_deterministic() {
    let out1 = tmp("det1");
    let out2 = tmp("det2");
    for out in [&out1, &out2] {
        let status = bin()
            .args(["run", "--benchmark", "2a", "--method", "ccdfm", "--grid", "12x12"])
            .arg("--export-matrix")
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    for file in ["solution.vtk", "fractures.vtk", "solution.field", "summary.csv", "matrix.mtx"] {
        let a = std::fs::read(out1.join(file)).unwrap();
        let b = std::fs::read(out2.join(file)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn unknown_method_fails_with_machine_readable_code() {
    let output = bin()
        .args(["run", "--benchmark", "2a", "--method", "mfd", "--grid", "4x4"])
        .arg("--out")
        .arg(tmp("badmethod"))
        .output()
        .unwrap();
    assert!(!output.status.success());
    let err = String::from_utf8_lossy(&output.stderr);
    let first = err.lines().next().unwrap_or("");
    assert!(
        first.starts_with("error[E_") && first.contains("]:"),
        "unexpected error line: {first}"
    );
}

#[test]
fn missing_scenario_fails() {
    let output = bin()
        .args(["run", "--method", "ccdfm", "--grid", "4x4"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).starts_with("error[E_SCENARIO]"));
}

#[test]
fn nonconforming_mesh_is_rejected() {
    // a plain 12x12 grid has no lines on the 0.625 fractures
    let out = tmp("nonconf");
    let output = bin()
        .args(["run", "--benchmark", "2a", "--method", "ccdfm", "--mesh"])
        .arg(repo_data().join("meshes/does_not_exist.fvmesh"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).starts_with("error[E_IO]"));
}

#[test]
fn run_file_config_with_flag_override() {
    let out = tmp("cfg");
    let cfg = out.join("run.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"benchmark": "2a", "method": "edfm", "grid": "9x9", "out": "{}"}}"#,
            out.join("from_file").display()
        ),
    )
    .unwrap();
    // flag overrides the grid
    let status = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--grid", "7x7"])
        .status()
        .unwrap();
    assert!(status.success());
    let summary = std::fs::read_to_string(out.join("from_file/summary.csv")).unwrap();
    // 49 matrix cells plus fragments
    let dofs: usize = summary
        .lines()
        .nth(1)
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(dofs > 49 && dofs < 110, "dofs = {dofs}");
}

#[test]
fn lines_are_sampled_with_gaps_marked() {
    let out = tmp("lines");
    let lines = out.join("lines.json");
    std::fs::write(
        &lines,
        r#"[{"name": "mid", "a": [-0.2, 0.3], "b": [0.8, 0.3], "n": 101}]"#,
    )
    .unwrap();
    let status = bin()
        .args(["run", "--benchmark", "2a", "--method", "edfm", "--grid", "9x9", "--lines"])
        .arg(&lines)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("line_mid.csv")).unwrap();
    assert!(csv.starts_with("arc_length,value\n"));
    // points left of the domain are gaps: empty value field
    assert!(csv.lines().nth(1).unwrap().ends_with(','));
    assert!(!csv.lines().last().unwrap().ends_with(','));
}

#[test]
fn compare_merges_and_rejects_mixed_scenarios() {
    let out_a = tmp("cmp_a");
    let out_b = tmp("cmp_b");
    for (bench, out) in [("2a", &out_a), ("2a", &out_b)] {
        assert!(bin()
            .args(["run", "--benchmark", bench, "--method", "edfm", "--grid", "9x9", "--out"])
            .arg(out)
            .status()
            .unwrap()
            .success());
    }
    let merged = tmp("cmp_out").join("table.csv");
    let status = bin()
        .arg("compare")
        .arg(out_a.join("summary.csv"))
        .arg(out_b.join("summary.csv"))
        .arg("--out")
        .arg(&merged)
        .status()
        .unwrap();
    assert!(status.success());
    let table = std::fs::read_to_string(&merged).unwrap();
    assert_eq!(table.lines().count(), 3);

    // a run of a different scenario cannot be merged
    let out_c = tmp("cmp_c");
    assert!(bin()
        .args(["run", "--benchmark", "2b", "--method", "edfm", "--grid", "9x9", "--out"])
        .arg(&out_c)
        .status()
        .unwrap()
        .success());
    let output = bin()
        .arg("compare")
        .arg(out_a.join("summary.csv"))
        .arg(out_c.join("summary.csv"))
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).starts_with("error[E_POSTPROC]"));
}

#[test]
fn compare_of_nothing_prints_header() {
    let output = bin().arg("compare").output().unwrap();
    assert!(output.status.success());
    assert_eq!(
        String::from_utf8_lossy(&output.stdout).trim(),
        "scenario,method,err_m,err_f,nnz_density,cond2,dofs"
    );
}

#[test]
fn benchmark4_needs_external_geometry() {
    let empty = tmp("b4_empty");
    let output = bin()
        .args(["run", "--benchmark", "4", "--method", "edfm", "--grid", "10x10"])
        .arg("--out")
        .arg(tmp("b4_out"))
        .env("FRACKBENCH_DATA", &empty)
        .output()
        .unwrap();
    assert!(!output.status.success());
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.starts_with("error[E_SCENARIO]"), "{err}");
    assert!(err.contains("benchmark4_fractures.json"));
}

#[test]
fn benchmark4_runs_with_provided_geometry() {
    let data = tmp("b4_data");
    std::fs::write(
        data.join("benchmark4_fractures.json"),
        r#"[[[100.0, 100.0], [620.0, 480.0]], [[80.0, 450.0], [400.0, 90.0]], [[350.0, 520.0], [660.0, 300.0]]]"#,
    )
    .unwrap();
    let out = tmp("b4_run");
    let output = bin()
        .args(["run", "--benchmark", "4", "--method", "edfm", "--grid", "35x30"])
        .arg("--out")
        .arg(&out)
        .env("FRACKBENCH_DATA", &data)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    assert!(out.join("fractures.vtk").exists());
}

#[test]
fn reference_then_error_norms_end_to_end() {
    // small axis-aligned scenario so the reference grid stays desk-sized
    let out = tmp("refpipe");
    let scenario = out.join("scenario.json");
    std::fs::write(
        &scenario,
        r#"{
  "name": "single-vertical",
  "domain": [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
  "regions": [{"polygon": [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], "K": [[1.0, 0.0], [0.0, 1.0]]}],
  "fractures": [{"a": [0.4, 0.0], "b": [0.4, 1.0], "aperture": 1e-4, "k_n": 100.0, "k_t": 100.0}],
  "bcs": [
    {"tag": 0, "kind": "neumann", "value": 0.0},
    {"tag": 1, "kind": "dirichlet", "value": 0.0},
    {"tag": 2, "kind": "neumann", "value": 0.0},
    {"tag": 3, "kind": "dirichlet", "value": 1.0}
  ],
  "field": "pressure"
}"#,
    )
    .unwrap();
    let ref_out = out.join("ref");
    assert!(bin()
        .args(["run", "--method", "reference", "--cells-across", "4", "--scenario"])
        .arg(&scenario)
        .arg("--out")
        .arg(&ref_out)
        .status()
        .unwrap()
        .success());
    assert!(ref_out.join("reference.field").exists());

    let edfm_out = out.join("edfm");
    assert!(bin()
        .args(["run", "--method", "edfm", "--grid", "11x11", "--scenario"])
        .arg(&scenario)
        .arg("--reference")
        .arg(ref_out.join("reference.field"))
        .arg("--out")
        .arg(&edfm_out)
        .status()
        .unwrap()
        .success());
    let summary = std::fs::read_to_string(edfm_out.join("summary.csv")).unwrap();
    let row = summary.lines().nth(1).unwrap();
    let err_m: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!(err_m > 0.0 && err_m < 0.1, "err_m = {err_m}");
}

#[test]
fn gen_mesh_produces_a_conforming_grid() {
    let out = tmp("genmesh").join("b2.fvmesh");
    let status = bin()
        .args(["gen-mesh", "--benchmark", "2a", "--target-h", "0.15", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    // the generated mesh supports a conforming run directly
    let run_out = tmp("genmesh_run");
    assert!(bin()
        .args(["run", "--benchmark", "2a", "--method", "ccdfm", "--mesh"])
        .arg(&out)
        .arg("--out")
        .arg(&run_out)
        .status()
        .unwrap()
        .success());
}
