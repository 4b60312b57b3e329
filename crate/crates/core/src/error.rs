//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by meshing, scenario ingestion, assembly and solves.
#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("mesh format error: {0}")]
    MeshFormat(String),

    #[error("mesh is invalid: {0}")]
    MeshInvalid(String),

    #[error("mesh does not conform to the fracture network: {0}")]
    NonConforming(String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("boundary condition error: {0}")]
    BoundaryCondition(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("linear solver error: {0}")]
    Solver(String),

    #[error("embedding error: {0}")]
    Embedding(String),

    #[error("reference solver error: {0}")]
    Reference(String),

    #[error("post-processing error: {0}")]
    PostProc(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
