//! Benchmark problem definitions: domain polygon, matrix permeability,
//! fracture networks, boundary conditions, the JSON scenario format, and
//! the built-in benchmark cases.
//!
//! Boundary conditions are keyed by *boundary tag*, which is the index of
//! the edge of the domain polygon a boundary face lies on. Meshes may carry
//! explicit tags; untagged boundary faces are located geometrically.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{
    distance_point_segment, point_in_simple_polygon, polygon_area, Aabb, Point2, Segment2,
    RELATIVE_TOLERANCE,
};

/// A single fracture: a line segment with aperture and normal/tangential
/// permeabilities. Serializes as `{a, b, aperture, k_n, k_t}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(from = "FractureSegmentRepr", into = "FractureSegmentRepr")]
pub struct FractureSegment {
    pub geometry: Segment2,
    pub aperture: f64,
    pub k_n: f64,
    pub k_t: f64,
}

#[derive(Serialize, Deserialize)]
struct FractureSegmentRepr {
    a: [f64; 2],
    b: [f64; 2],
    aperture: f64,
    k_n: f64,
    k_t: f64,
}

impl From<FractureSegmentRepr> for FractureSegment {
    fn from(r: FractureSegmentRepr) -> Self {
        FractureSegment {
            geometry: Segment2::new(r.a.into(), r.b.into()),
            aperture: r.aperture,
            k_n: r.k_n,
            k_t: r.k_t,
        }
    }
}

impl From<FractureSegment> for FractureSegmentRepr {
    fn from(f: FractureSegment) -> Self {
        FractureSegmentRepr {
            a: f.geometry.a.into(),
            b: f.geometry.b.into(),
            aperture: f.aperture,
            k_n: f.k_n,
            k_t: f.k_t,
        }
    }
}

/// The fracture network; fracture ids are the stable indices in this list.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FractureNetwork {
    pub fractures: Vec<FractureSegment>,
}

impl FractureNetwork {
    pub fn len(&self) -> usize {
        self.fractures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fractures.is_empty()
    }

    /// Total fracture length.
    pub fn total_length(&self) -> f64 {
        self.fractures.iter().map(|f| f.geometry.length()).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcKind {
    Dirichlet,
    Neumann,
}

/// Boundary value: a constant, or a linear function `a*x + b*y + c` of
/// position (Dirichlet only).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFunction {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl LinearFunction {
    pub fn eval(&self, p: Point2) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }
}

/// Condition on one boundary tag (domain-polygon edge).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pub tag: u32,
    pub kind: BcKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub linear: Option<LinearFunction>,
}

impl BoundaryCondition {
    pub fn dirichlet(tag: u32, value: f64) -> Self {
        BoundaryCondition {
            tag,
            kind: BcKind::Dirichlet,
            value: Some(value),
            linear: None,
        }
    }

    pub fn dirichlet_linear(tag: u32, a: f64, b: f64, c: f64) -> Self {
        BoundaryCondition {
            tag,
            kind: BcKind::Dirichlet,
            value: None,
            linear: Some(LinearFunction { a, b, c }),
        }
    }

    pub fn neumann(tag: u32, flux: f64) -> Self {
        BoundaryCondition {
            tag,
            kind: BcKind::Neumann,
            value: Some(flux),
            linear: None,
        }
    }

    /// Boundary value at a position.
    pub fn value_at(&self, p: Point2) -> f64 {
        match self.linear {
            Some(lin) => lin.eval(p),
            None => self.value.unwrap_or(0.0),
        }
    }
}

/// A sub-region of the domain with its (symmetric positive definite)
/// permeability tensor. Serializes as `{polygon, K}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Region {
    pub polygon: Vec<Point2>,
    #[serde(rename = "K")]
    pub k: [[f64; 2]; 2],
}

/// Solved scalar field: pressure, or piezometric head (with hydraulic
/// conductivities in place of permeabilities).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Pressure,
    Head,
}

/// A complete benchmark problem.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    /// Simple polygon, counter-clockwise.
    pub domain: Vec<Point2>,
    pub regions: Vec<Region>,
    pub fractures: FractureNetwork,
    pub bcs: Vec<BoundaryCondition>,
    pub field: FieldKind,
    /// Uniform volumetric source; all shipped benchmarks are boundary-driven.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub source: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl Scenario {
    pub fn bounding_box(&self) -> Aabb {
        Aabb::of_points(&self.domain)
    }

    /// Absolute geometric tolerance for this scenario.
    pub fn tolerance(&self) -> f64 {
        RELATIVE_TOLERANCE * self.bounding_box().diagonal()
    }

    pub fn domain_area(&self) -> f64 {
        polygon_area(&self.domain)
    }

    pub fn domain_edge(&self, tag: u32) -> Segment2 {
        let n = self.domain.len();
        let i = tag as usize;
        Segment2::new(self.domain[i], self.domain[(i + 1) % n])
    }

    pub fn n_domain_edges(&self) -> usize {
        self.domain.len()
    }

    /// Permeability tensor at a point (first region containing it).
    pub fn permeability_at(&self, p: Point2) -> [[f64; 2]; 2] {
        let tol = self.tolerance();
        for r in &self.regions {
            if point_in_simple_polygon(&r.polygon, p, tol) {
                return r.k;
            }
        }
        // regions partition the domain; round-off at internal region edges
        // falls back to the first region
        self.regions[0].k
    }

    pub fn bc_for_tag(&self, tag: u32) -> Result<&BoundaryCondition, Error> {
        self.bcs
            .iter()
            .find(|bc| bc.tag == tag)
            .ok_or_else(|| Error::BoundaryCondition(format!("no boundary condition for tag {tag}")))
    }

    /// Locates the domain-polygon edge a boundary face lies on.
    pub fn boundary_tag_of(&self, face: &Segment2) -> Result<u32, Error> {
        let tol = self.tolerance();
        let mid = face.midpoint();
        for tag in 0..self.domain.len() {
            let edge = self.domain_edge(tag as u32);
            if distance_point_segment(face.a, &edge) <= tol
                && distance_point_segment(face.b, &edge) <= tol
                && distance_point_segment(mid, &edge) <= tol
            {
                return Ok(tag as u32);
            }
        }
        Err(Error::BoundaryCondition(format!(
            "boundary face ({:.6},{:.6})-({:.6},{:.6}) lies on no domain edge",
            face.a.x, face.a.y, face.b.x, face.b.y
        )))
    }

    /// Boundary condition for a boundary face: explicit mesh tag when
    /// present, geometric lookup otherwise.
    pub fn bc_for_face(
        &self,
        face: &Segment2,
        mesh_tag: Option<u32>,
    ) -> Result<&BoundaryCondition, Error> {
        let tag = match mesh_tag {
            Some(t) => t,
            None => self.boundary_tag_of(face)?,
        };
        self.bc_for_tag(tag)
    }

    /// Schema and physics checks: positive-area CCW domain, SPD regions that
    /// cover the domain area, fractures inside the closed domain with
    /// positive aperture and permeabilities, and boundary conditions that
    /// cover every domain edge exactly once with at least one Dirichlet.
    pub fn validate(&self) -> Result<(), Error> {
        if self.domain.len() < 3 {
            return Err(Error::Scenario("domain polygon needs >= 3 vertices".into()));
        }
        let area = self.domain_area();
        if !(area > 0.0) {
            return Err(Error::Scenario(format!(
                "domain polygon area {area:.3e} must be positive (counter-clockwise)"
            )));
        }
        if self.regions.is_empty() {
            return Err(Error::Scenario("at least one permeability region required".into()));
        }
        let mut region_area = 0.0;
        for (i, r) in self.regions.iter().enumerate() {
            let k = r.k;
            let sym = (k[0][1] - k[1][0]).abs() <= 1e-12 * (k[0][1].abs() + k[1][0].abs()).max(1.0);
            let spd = k[0][0] > 0.0 && k[0][0] * k[1][1] - k[0][1] * k[1][0] > 0.0;
            if !sym || !spd {
                return Err(Error::Scenario(format!(
                    "region {i} permeability {k:?} is not symmetric positive definite"
                )));
            }
            region_area += polygon_area(&r.polygon);
        }
        if (region_area - area).abs() > 1e-6 * area {
            return Err(Error::Scenario(format!(
                "regions cover area {region_area:.6e}, domain area is {area:.6e}; regions must partition the domain"
            )));
        }
        let tol = self.tolerance();
        for (i, f) in self.fractures.fractures.iter().enumerate() {
            f.geometry
                .validate()
                .map_err(|e| Error::Scenario(format!("fracture {i}: {e}")))?;
            if !(f.aperture > 0.0) || !(f.k_n > 0.0) || !(f.k_t > 0.0) {
                return Err(Error::Scenario(format!(
                    "fracture {i} must have positive aperture and permeabilities"
                )));
            }
            for p in [f.geometry.a, f.geometry.b] {
                if !point_in_simple_polygon(&self.domain, p, tol) {
                    return Err(Error::Scenario(format!(
                        "fracture {i} endpoint ({}, {}) lies outside the domain",
                        p.x, p.y
                    )));
                }
            }
        }
        let n_edges = self.domain.len();
        let mut seen = vec![false; n_edges];
        let mut any_dirichlet = false;
        for bc in &self.bcs {
            let t = bc.tag as usize;
            if t >= n_edges {
                return Err(Error::BoundaryCondition(format!(
                    "tag {t} exceeds the domain polygon edge count {n_edges}"
                )));
            }
            if seen[t] {
                return Err(Error::BoundaryCondition(format!(
                    "tag {t} has more than one boundary condition"
                )));
            }
            seen[t] = true;
            match bc.kind {
                BcKind::Dirichlet => {
                    any_dirichlet = true;
                    if bc.value.is_none() && bc.linear.is_none() {
                        return Err(Error::BoundaryCondition(format!(
                            "Dirichlet condition on tag {t} has no value"
                        )));
                    }
                }
                BcKind::Neumann => {
                    if bc.linear.is_some() {
                        return Err(Error::BoundaryCondition(format!(
                            "Neumann condition on tag {t} cannot be a linear function"
                        )));
                    }
                    if bc.value.is_none() {
                        return Err(Error::BoundaryCondition(format!(
                            "Neumann condition on tag {t} has no value"
                        )));
                    }
                }
            }
        }
        if let Some(t) = seen.iter().position(|s| !s) {
            return Err(Error::BoundaryCondition(format!(
                "domain edge {t} has no boundary condition"
            )));
        }
        if !any_dirichlet {
            return Err(Error::BoundaryCondition(
                "at least one Dirichlet condition is required for well-posedness".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> Result<String, Error> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn save(&self, path: &Path) -> Result<(), Error> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }
}

/// Loads and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario, Error> {
    let text = std::fs::read_to_string(path)?;
    load_scenario_str(&text)
}

pub fn load_scenario_str(text: &str) -> Result<Scenario, Error> {
    let s: Scenario = serde_json::from_str(text)?;
    s.validate()?;
    Ok(s)
}

/// Built-in benchmark cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchmarkId {
    /// Hydrocoin groundwater case: two crossing conductive fracture zones
    /// under a non-straight top surface, piezometric-head formulation.
    B1,
    /// Regular fracture network, conductive fractures.
    B2a,
    /// Regular fracture network, blocking fractures.
    B2b,
    /// Complex ten-fracture network, flow from top to bottom.
    B3a,
    /// Complex ten-fracture network, flow from left to right.
    B3b,
    /// Realistic 64-fracture outcrop set (geometry from an external file).
    B4,
}

impl std::str::FromStr for BenchmarkId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "1" => Ok(BenchmarkId::B1),
            "2a" => Ok(BenchmarkId::B2a),
            "2b" => Ok(BenchmarkId::B2b),
            "3a" => Ok(BenchmarkId::B3a),
            "3b" => Ok(BenchmarkId::B3b),
            "4" => Ok(BenchmarkId::B4),
            other => Err(Error::Scenario(format!(
                "unknown benchmark id `{other}` (expected 1, 2a, 2b, 3a, 3b or 4)"
            ))),
        }
    }
}

impl std::fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BenchmarkId::B1 => "1",
            BenchmarkId::B2a => "2a",
            BenchmarkId::B2b => "2b",
            BenchmarkId::B3a => "3a",
            BenchmarkId::B3b => "3b",
            BenchmarkId::B4 => "4",
        };
        f.write_str(s)
    }
}

fn uniform_region(domain: &[Point2], k: f64) -> Region {
    Region {
        polygon: domain.to_vec(),
        k: [[k, 0.0], [0.0, k]],
    }
}

fn unit_square() -> Vec<Point2> {
    vec![
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(1.0, 1.0),
        Point2::new(0.0, 1.0),
    ]
}

// unit-square edge tags from the CCW vertex order above
const BOTTOM: u32 = 0;
const RIGHT: u32 = 1;
const TOP: u32 = 2;
const LEFT: u32 = 3;

fn frac(ax: f64, ay: f64, bx: f64, by: f64, aperture: f64, k: f64) -> FractureSegment {
    FractureSegment {
        geometry: Segment2::new(Point2::new(ax, ay), Point2::new(bx, by)),
        aperture,
        k_n: k,
        k_t: k,
    }
}

/// Hydrocoin node table (modified domain): coordinates of the points that
/// define the top surface and the two equi-dimensional fracture zones. The hybrid-dimensional reduction keeps the fracture centerlines
/// and derives equivalent apertures from the zone geometry at load time.
mod hydrocoin {
    pub const P1: [f64; 2] = [0.0, 150.0];
    pub const P3: [f64; 2] = [400.0, 100.0]; // 3'
    pub const P5: [f64; 2] = [800.0, 150.0];
    pub const P7: [f64; 2] = [1200.0, 100.0]; // 7'
    pub const P9: [f64; 2] = [1600.0, 150.0];
    pub const P10: [f64; 2] = [1600.0, -1000.0];
    pub const P11: [f64; 2] = [1505.0, -1000.0];
    pub const P12: [f64; 2] = [1495.0, -1000.0];
    pub const P13: [f64; 2] = [1007.5, -1000.0];
    pub const P14: [f64; 2] = [992.5, -1000.0];
    pub const P15: [f64; 2] = [0.0, -1000.0];
    /// Corner of the zone-intersection parallelogram; used to cross-check
    /// the derived centerlines and apertures.
    #[cfg(test)]
    pub const P16: [f64; 2] = [1071.34615385, -566.346153846];
}

fn benchmark1() -> Scenario {
    use hydrocoin::*;
    let domain = vec![
        Point2::from(P15),
        Point2::from(P10),
        Point2::from(P9),
        Point2::from(P7),
        Point2::from(P5),
        Point2::from(P3),
        Point2::from(P1),
    ];
    // zone A runs from point 3' to the midpoint of 11/12, zone B from point
    // 7' to the midpoint of 13/14; the equivalent aperture is the
    // perpendicular width of the zone, derived from the horizontal width of
    // the bottom node pair
    let a_top = Point2::from(P3);
    let a_bot = Point2::from(P11).midpoint(Point2::from(P12));
    let b_top = Point2::from(P7);
    let b_bot = Point2::from(P13).midpoint(Point2::from(P14));
    let aperture = |top: Point2, bot: Point2, width_h: f64| -> f64 {
        let d = top.to(bot);
        width_h * d.y.abs() / d.norm()
    };
    let eps_a = aperture(a_top, a_bot, (P11[0] - P12[0]).abs());
    let eps_b = aperture(b_top, b_bot, (P13[0] - P14[0]).abs());
    let k_f = 1e-6; // hydraulic conductivity in the fracture zones [m/s]
    let k_m = 1e-8; // rock matrix [m/s]
    Scenario {
        name: "benchmark1-hydrocoin".into(),
        regions: vec![uniform_region(&domain, k_m)],
        fractures: FractureNetwork {
            fractures: vec![
                FractureSegment {
                    geometry: Segment2::new(a_top, a_bot),
                    aperture: eps_a,
                    k_n: k_f,
                    k_t: k_f,
                },
                FractureSegment {
                    geometry: Segment2::new(b_top, b_bot),
                    aperture: eps_b,
                    k_n: k_f,
                    k_t: k_f,
                },
            ],
        },
        bcs: vec![
            BoundaryCondition::neumann(0, 0.0), // bottom
            BoundaryCondition::neumann(1, 0.0), // right
            // top surface: head equals the surface elevation
            BoundaryCondition::dirichlet_linear(2, 0.0, 1.0, 0.0),
            BoundaryCondition::dirichlet_linear(3, 0.0, 1.0, 0.0),
            BoundaryCondition::dirichlet_linear(4, 0.0, 1.0, 0.0),
            BoundaryCondition::dirichlet_linear(5, 0.0, 1.0, 0.0),
            BoundaryCondition::neumann(6, 0.0), // left
        ],
        field: FieldKind::Head,
        source: 0.0,
        domain,
    }
}

fn benchmark2(k_f: f64, name: &str) -> Scenario {
    let domain = unit_square();
    let eps = 1e-4;
    Scenario {
        name: name.into(),
        regions: vec![uniform_region(&domain, 1.0)],
        fractures: FractureNetwork {
            fractures: vec![
                frac(0.0, 0.5, 1.0, 0.5, eps, k_f),
                frac(0.5, 0.0, 0.5, 1.0, eps, k_f),
                frac(0.5, 0.75, 1.0, 0.75, eps, k_f),
                frac(0.75, 0.5, 0.75, 1.0, eps, k_f),
                frac(0.5, 0.625, 0.75, 0.625, eps, k_f),
                frac(0.625, 0.5, 0.625, 0.75, eps, k_f),
            ],
        },
        bcs: vec![
            BoundaryCondition::neumann(BOTTOM, 0.0),
            BoundaryCondition::dirichlet(RIGHT, 1.0),
            BoundaryCondition::neumann(TOP, 0.0),
            // unit inflow across the left boundary
            BoundaryCondition::neumann(LEFT, -1.0),
        ],
        field: FieldKind::Pressure,
        source: 0.0,
        domain,
    }
}

/// Fracture endpoint coordinates of the complex ten-fracture network.
const B3_COORDS: [[f64; 4]; 10] = [
    [0.0500, 0.4160, 0.2200, 0.0624],
    [0.0500, 0.2750, 0.2500, 0.1350],
    [0.1500, 0.6300, 0.4500, 0.0900],
    [0.1500, 0.9167, 0.4000, 0.5000],
    [0.6500, 0.8333, 0.8500, 0.1667],
    [0.7000, 0.2350, 0.8500, 0.1675],
    [0.6000, 0.3800, 0.8500, 0.2675],
    [0.3500, 0.9714, 0.8000, 0.7143],
    [0.7500, 0.9574, 0.9500, 0.8155],
    [0.1500, 0.8363, 0.4000, 0.9727],
];

fn benchmark3(horizontal_flow: bool, name: &str) -> Scenario {
    let domain = unit_square();
    let eps = 1e-4;
    let fractures = B3_COORDS
        .iter()
        .enumerate()
        .map(|(i, c)| {
            // fractures 4 and 5 (1-based) block the flow
            let k = if i == 3 || i == 4 { 1e-4 } else { 1e4 };
            frac(c[0], c[1], c[2], c[3], eps, k)
        })
        .collect();
    let bcs = if horizontal_flow {
        vec![
            BoundaryCondition::neumann(BOTTOM, 0.0),
            BoundaryCondition::dirichlet(RIGHT, 0.0),
            BoundaryCondition::neumann(TOP, 0.0),
            BoundaryCondition::dirichlet(LEFT, 1.0),
        ]
    } else {
        vec![
            BoundaryCondition::dirichlet(BOTTOM, 0.0),
            BoundaryCondition::neumann(RIGHT, 0.0),
            BoundaryCondition::dirichlet(TOP, 1.0),
            BoundaryCondition::neumann(LEFT, 0.0),
        ]
    };
    Scenario {
        name: name.into(),
        regions: vec![uniform_region(&domain, 1.0)],
        fractures: FractureNetwork { fractures },
        bcs,
        field: FieldKind::Pressure,
        source: 0.0,
        domain,
    }
}

/// File name of the externally provided fracture geometry for benchmark 4,
/// looked up in the benchmark-data directory.
pub const B4_GEOMETRY_FILE: &str = "benchmark4_fractures.json";

fn benchmark4(data_dir: Option<&Path>) -> Result<Scenario, Error> {
    let dir = data_dir.ok_or_else(|| {
        Error::Scenario(format!(
            "benchmark 4 needs its external fracture geometry ({B4_GEOMETRY_FILE}); pass a benchmark-data directory"
        ))
    })?;
    let path = dir.join(B4_GEOMETRY_FILE);
    if !path.exists() {
        return Err(Error::Scenario(format!(
            "benchmark 4 geometry file not found: {}",
            path.display()
        )));
    }
    let text = std::fs::read_to_string(&path)?;
    let endpoints: Vec<[[f64; 2]; 2]> = serde_json::from_str(&text)?;
    let domain = vec![
        Point2::new(0.0, 0.0),
        Point2::new(700.0, 0.0),
        Point2::new(700.0, 600.0),
        Point2::new(0.0, 600.0),
    ];
    let fractures = endpoints
        .into_iter()
        .map(|[a, b]| FractureSegment {
            geometry: Segment2::new(a.into(), b.into()),
            aperture: 1e-2,
            k_n: 1e-8,
            k_t: 1e-8,
        })
        .collect();
    Ok(Scenario {
        name: "benchmark4-realistic".into(),
        regions: vec![uniform_region(&domain, 1e-14)],
        fractures: FractureNetwork { fractures },
        bcs: vec![
            BoundaryCondition::neumann(BOTTOM, 0.0),
            BoundaryCondition::dirichlet(RIGHT, 0.0),
            BoundaryCondition::neumann(TOP, 0.0),
            BoundaryCondition::dirichlet(LEFT, 1_013_250.0),
        ],
        field: FieldKind::Pressure,
        source: 0.0,
        domain,
    })
}

/// Builds a built-in benchmark scenario. Benchmark 4 requires the directory
/// holding its external fracture geometry file.
pub fn builtin_benchmark(id: BenchmarkId, data_dir: Option<&Path>) -> Result<Scenario, Error> {
    let s = match id {
        BenchmarkId::B1 => benchmark1(),
        BenchmarkId::B2a => benchmark2(1e4, "benchmark2a-conductive"),
        BenchmarkId::B2b => benchmark2(1e-4, "benchmark2b-blocking"),
        BenchmarkId::B3a => benchmark3(false, "benchmark3a-top-bottom"),
        BenchmarkId::B3b => benchmark3(true, "benchmark3b-left-right"),
        BenchmarkId::B4 => benchmark4(data_dir)?,
    };
    s.validate()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn all_builtins_validate() {
        for id in [
            BenchmarkId::B1,
            BenchmarkId::B2a,
            BenchmarkId::B2b,
            BenchmarkId::B3a,
            BenchmarkId::B3b,
        ] {
            builtin_benchmark(id, None).unwrap();
        }
    }

    #[test]
    fn b3a_fracture_one_endpoints() {
        let s = builtin_benchmark(BenchmarkId::B3a, None).unwrap();
        assert_eq!(s.fractures.len(), 10);
        let f1 = &s.fractures.fractures[0];
        assert_eq!(f1.geometry.a, Point2::new(0.05, 0.416));
        assert_eq!(f1.geometry.b, Point2::new(0.22, 0.0624));
    }

    #[test]
    fn b3_blocking_fractures_four_and_five() {
        let s = builtin_benchmark(BenchmarkId::B3b, None).unwrap();
        for (i, f) in s.fractures.fractures.iter().enumerate() {
            let expected = if i == 3 || i == 4 { 1e-4 } else { 1e4 };
            assert_eq!(f.k_n, expected, "fracture {} permeability", i + 1);
        }
    }

    #[test]
    fn b2_cases_differ_only_in_permeability() {
        let a = builtin_benchmark(BenchmarkId::B2a, None).unwrap();
        let b = builtin_benchmark(BenchmarkId::B2b, None).unwrap();
        assert_eq!(a.fractures.len(), b.fractures.len());
        for (fa, fb) in a.fractures.fractures.iter().zip(&b.fractures.fractures) {
            assert_eq!(fa.geometry, fb.geometry);
            assert_eq!(fa.aperture, fb.aperture);
            assert_eq!(fa.k_n, 1e4);
            assert_eq!(fb.k_n, 1e-4);
        }
    }

    #[test]
    fn b1_zone_geometry_reproduces_intersection_node() {
        // the zone-corner node 16 must sit exactly half an aperture away
        // from both derived centerlines
        let s = builtin_benchmark(BenchmarkId::B1, None).unwrap();
        let p16 = Point2::from(hydrocoin::P16);
        for f in &s.fractures.fractures {
            let d = f.geometry.signed_distance(p16).abs();
            assert_relative_eq!(d, f.aperture / 2.0, max_relative = 1e-6);
        }
        // derived apertures
        assert_relative_eq!(s.fractures.fractures[0].aperture, 10.0 / 2.0_f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(
            s.fractures.fractures[1].aperture,
            15.0 * 1100.0 / (200.0_f64 * 200.0 + 1100.0 * 1100.0).sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn b1_fractures_intersect_inside_domain() {
        let s = builtin_benchmark(BenchmarkId::B1, None).unwrap();
        let f = &s.fractures.fractures;
        match crate::geometry::segment_intersection(&f[0].geometry, &f[1].geometry, s.tolerance()) {
            crate::geometry::SegmentIntersection::Point { point, .. } => {
                assert_relative_eq!(point.x, 1400.0 / 1.3, max_relative = 1e-9);
                assert_relative_eq!(point.y, 100.0 - 1100.0 * (8.0 / 13.0), max_relative = 1e-9);
            }
            other => panic!("expected crossing fractures, got {other:?}"),
        }
    }

    #[test]
    fn b1_top_head_equals_elevation() {
        let s = builtin_benchmark(BenchmarkId::B1, None).unwrap();
        let bc = s.bc_for_tag(4).unwrap();
        assert_eq!(bc.kind, BcKind::Dirichlet);
        assert_relative_eq!(bc.value_at(Point2::new(600.0, 125.0)), 125.0);
    }

    #[test]
    fn json_roundtrip_is_byte_identical() {
        for id in [BenchmarkId::B1, BenchmarkId::B2a, BenchmarkId::B3b] {
            let s = builtin_benchmark(id, None).unwrap();
            let first = s.to_json_string().unwrap();
            let re: Scenario = load_scenario_str(&first).unwrap();
            let second = re.to_json_string().unwrap();
            assert_eq!(first, second, "benchmark {id} did not round-trip");
        }
    }

    #[test]
    fn empty_network_is_valid() {
        let domain = unit_square();
        let s = Scenario {
            name: "plain-darcy".into(),
            regions: vec![uniform_region(&domain, 1.0)],
            fractures: FractureNetwork::default(),
            bcs: vec![
                BoundaryCondition::neumann(BOTTOM, 0.0),
                BoundaryCondition::dirichlet(RIGHT, 0.0),
                BoundaryCondition::neumann(TOP, 0.0),
                BoundaryCondition::dirichlet(LEFT, 1.0),
            ],
            field: FieldKind::Pressure,
            source: 0.0,
            domain,
        };
        s.validate().unwrap();
    }

    #[test]
    fn uncovered_boundary_rejected() {
        let mut s = builtin_benchmark(BenchmarkId::B2a, None).unwrap();
        s.bcs.pop();
        assert!(s.validate().is_err());
    }

    #[test]
    fn non_spd_region_rejected() {
        let mut s = builtin_benchmark(BenchmarkId::B2a, None).unwrap();
        s.regions[0].k = [[1.0, 2.0], [2.0, 1.0]];
        assert!(s.validate().is_err());
    }

    #[test]
    fn fracture_outside_domain_rejected() {
        let mut s = builtin_benchmark(BenchmarkId::B2a, None).unwrap();
        s.fractures.fractures[0].geometry.b = Point2::new(2.0, 0.5);
        assert!(s.validate().is_err());
    }

    #[test]
    fn benchmark4_requires_geometry_file() {
        assert!(builtin_benchmark(BenchmarkId::B4, None).is_err());
        let dir = std::env::temp_dir().join("frackbench-missing-b4");
        let _ = std::fs::create_dir_all(&dir);
        assert!(builtin_benchmark(BenchmarkId::B4, Some(&dir)).is_err());
    }

    #[test]
    fn benchmark4_loads_from_geometry_file() {
        let dir = std::env::temp_dir().join(format!("frackbench-b4-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let geom = "[[[100.0, 100.0], [600.0, 500.0]], [[50.0, 400.0], [300.0, 80.0]]]";
        std::fs::write(dir.join(B4_GEOMETRY_FILE), geom).unwrap();
        let s = builtin_benchmark(BenchmarkId::B4, Some(&dir)).unwrap();
        assert_eq!(s.fractures.len(), 2);
        assert_eq!(s.fractures.fractures[0].aperture, 1e-2);
        assert_eq!(s.fractures.fractures[0].k_n, 1e-8);
        let left = s.bc_for_tag(3).unwrap();
        assert_eq!(left.value, Some(1_013_250.0));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn boundary_tag_lookup() {
        let s = builtin_benchmark(BenchmarkId::B2a, None).unwrap();
        let face = Segment2::new(Point2::new(1.0, 0.25), Point2::new(1.0, 0.5));
        assert_eq!(s.boundary_tag_of(&face).unwrap(), RIGHT);
        let not_boundary = Segment2::new(Point2::new(0.5, 0.25), Point2::new(0.5, 0.5));
        assert!(s.boundary_tag_of(&not_boundary).is_err());
    }
}
