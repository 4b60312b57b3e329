//! Finite-volume toolkit for single-phase Darcy flow in 2D fractured porous
//! media.
//!
//! The crate provides two hybrid-dimensional discrete-fracture-matrix
//! solvers — a conforming cell-centered TPFA scheme with hybrid fracture
//! faces ([`ccdfm`]) and a non-conforming embedded scheme on background
//! grids ([`edfm`]) — together with an equi-dimensional fine-grid reference
//! solver ([`reference`]), the benchmark scenarios they are compared on
//! ([`scenario`]), and the error norms and linear-system diagnostics used
//! for the comparison ([`postproc`], [`linalg`]).

// `!(x > 0.0)` guards are NaN-aware by intent: a NaN transmissibility or
// pivot must take the error branch, which `x <= 0.0` would not. Index loops
// are the native shape of the factorization and matvec kernels.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod ccdfm;
pub mod discrete;
pub mod edfm;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod mesh;
pub mod postproc;
pub mod reference;
pub mod scenario;
pub mod triangulate;
pub mod util;
pub mod vtk;

pub use error::Error;
pub use geometry::{Point2, Segment2, Vec2};
pub use mesh::Mesh;
pub use scenario::{BenchmarkId, FractureNetwork, FractureSegment, Scenario};
