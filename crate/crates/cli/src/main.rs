//! Benchmark runner for single-phase Darcy flow in fractured porous media:
//! runs the conforming (CC-DFM), embedded (EDFM) and equi-dimensional
//! reference solvers on built-in or file-based scenarios, writes VTK/CSV
//! artifacts, compares methods against reference fields, and generates the
//! shipped benchmark data.

mod compare;
mod config;
mod gendata;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use frackbench_core::error::Error;

use config::RunConfig;

#[derive(Parser)]
#[command(name = "frackbench", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario with one method and write the artifacts.
    Run(RunArgs),
    /// Merge run summaries into one comparison table.
    Compare(CompareArgs),
    /// Generate a conforming triangulation for a scenario.
    GenMesh(GenMeshArgs),
    /// Regenerate the shipped benchmark data files.
    GenData(GenDataArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Built-in benchmark id: 1, 2a, 2b, 3a, 3b or 4.
    #[arg(long)]
    benchmark: Option<String>,
    /// Scenario JSON file (alternative to --benchmark).
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// ccdfm, ccdfm_star, edfm or reference.
    #[arg(long)]
    method: Option<String>,
    /// Mesh file (native fvmesh or Gmsh v2 ASCII).
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Structured grid, NXxNY (conforming snap lines are added for ccdfm).
    #[arg(long)]
    grid: Option<String>,
    /// Cells across each fracture aperture (reference method).
    #[arg(long)]
    cells_across: Option<usize>,
    /// Geometric grading ratio away from fracture walls (reference method).
    #[arg(long)]
    grading: Option<f64>,
    /// Reference field file to compute error norms against.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// JSON file with line-sample definitions.
    #[arg(long)]
    lines: Option<PathBuf>,
    /// Output directory (default: out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Export the assembled system in MatrixMarket format.
    #[arg(long)]
    export_matrix: bool,
    /// Compute and report matrix diagnostics (nnz density, condition number).
    #[arg(long)]
    report: bool,
    /// JSON run file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// summary.csv files produced by `run`.
    inputs: Vec<PathBuf>,
    /// Write the merged table here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenMeshArgs {
    #[arg(long)]
    benchmark: Option<String>,
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Target triangle size.
    #[arg(long)]
    target_h: f64,
    /// Output mesh file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenDataArgs {
    /// Data directory to (re)populate (default: data).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn error_code(e: &Error) -> &'static str {
    match e {
        Error::Geometry(_) => "E_GEOMETRY",
        Error::MeshFormat(_) => "E_MESH_FORMAT",
        Error::MeshInvalid(_) => "E_MESH_INVALID",
        Error::NonConforming(_) => "E_NONCONFORMING",
        Error::Scenario(_) => "E_SCENARIO",
        Error::BoundaryCondition(_) => "E_BOUNDARY_CONDITION",
        Error::Assembly(_) => "E_ASSEMBLY",
        Error::Solver(_) => "E_SOLVER",
        Error::Embedding(_) => "E_EMBEDDING",
        Error::Reference(_) => "E_REFERENCE",
        Error::PostProc(_) => "E_POSTPROC",
        Error::Io(_) => "E_IO",
        Error::Json(_) => "E_JSON",
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(args) => {
            let flags = RunConfig {
                benchmark: args.benchmark,
                scenario: args.scenario,
                method: args.method,
                mesh: args.mesh,
                grid: args.grid,
                cells_across: args.cells_across,
                grading: args.grading,
                reference: args.reference,
                lines: args.lines,
                out: args.out,
                export_matrix: args.export_matrix,
                report: args.report,
            };
            let config = match args.config {
                Some(path) => RunConfig::load(&path)?.merged_with(flags),
                None => flags,
            };
            run::run(&config)
        }
        Command::Compare(args) => compare::compare(&args.inputs, args.out.as_deref()),
        Command::GenMesh(args) => gendata::gen_mesh(
            args.benchmark.as_deref(),
            args.scenario.as_deref(),
            args.target_h,
            &args.out,
        ),
        Command::GenData(args) => {
            gendata::gen_data(&args.out.unwrap_or_else(|| PathBuf::from("data")))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", error_code(&e));
            ExitCode::FAILURE
        }
    }
}
