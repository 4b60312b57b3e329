//! Run configuration: JSON run files merged with command-line flags (flags
//! win), method/mesh compatibility checks.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use frackbench_core::error::Error;
use serde::{Deserialize, Serialize};

/// Discretization method of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Conforming cell-centered DFM with star-delta elimination.
    Ccdfm,
    /// Conforming cell-centered DFM keeping intersection cells.
    CcdfmStar,
    /// Embedded DFM on a background grid.
    Edfm,
    /// Equi-dimensional fine-grid reference.
    Reference,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ccdfm" => Ok(Method::Ccdfm),
            "ccdfm_star" => Ok(Method::CcdfmStar),
            "edfm" => Ok(Method::Edfm),
            "reference" => Ok(Method::Reference),
            other => Err(Error::Scenario(format!(
                "unknown method `{other}` (expected ccdfm, ccdfm_star, edfm or reference)"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Ccdfm => "ccdfm",
            Method::CcdfmStar => "ccdfm_star",
            Method::Edfm => "edfm",
            Method::Reference => "reference",
        };
        f.write_str(s)
    }
}

/// A line to sample, read from the `--lines` JSON file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LineSpec {
    #[serde(default)]
    pub name: String,
    pub a: [f64; 2],
    pub b: [f64; 2],
    #[serde(default = "default_samples")]
    pub n: usize,
}

fn default_samples() -> usize {
    1000
}

/// Full run configuration; every field can come from the JSON run file or
/// from flags, with flags overriding.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<PathBuf>,
    /// Structured grid request, `NXxNY`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells_across: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lines: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub export_matrix: bool,
    #[serde(default)]
    pub report: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Merges `flags` over `self` (flags win).
    pub fn merged_with(mut self, flags: RunConfig) -> Self {
        if flags.benchmark.is_some() {
            self.benchmark = flags.benchmark;
        }
        if flags.scenario.is_some() {
            self.scenario = flags.scenario;
        }
        if flags.method.is_some() {
            self.method = flags.method;
        }
        if flags.mesh.is_some() {
            self.mesh = flags.mesh;
        }
        if flags.grid.is_some() {
            self.grid = flags.grid;
        }
        if flags.cells_across.is_some() {
            self.cells_across = flags.cells_across;
        }
        if flags.grading.is_some() {
            self.grading = flags.grading;
        }
        if flags.reference.is_some() {
            self.reference = flags.reference;
        }
        if flags.lines.is_some() {
            self.lines = flags.lines;
        }
        if flags.out.is_some() {
            self.out = flags.out;
        }
        self.export_matrix |= flags.export_matrix;
        self.report |= flags.report;
        self
    }

    pub fn parse_grid(&self) -> Result<Option<(usize, usize)>, Error> {
        match &self.grid {
            None => Ok(None),
            Some(s) => {
                let parts: Vec<&str> = s.split(['x', 'X']).collect();
                if parts.len() != 2 {
                    return Err(Error::Scenario(format!(
                        "grid `{s}` must look like NXxNY (e.g. 37x37)"
                    )));
                }
                let nx = parts[0].parse().map_err(|_| {
                    Error::Scenario(format!("grid `{s}` has a malformed NX"))
                })?;
                let ny = parts[1].parse().map_err(|_| {
                    Error::Scenario(format!("grid `{s}` has a malformed NY"))
                })?;
                Ok(Some((nx, ny)))
            }
        }
    }
}
