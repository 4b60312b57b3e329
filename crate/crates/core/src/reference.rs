//! Equi-dimensional fine-grid TPFA reference solver: axis-aligned fracture
//! networks are resolved by full-dimensional cells on a graded tensor grid
//! with snap lines at every fracture wall, a fixed number of cells across
//! each aperture, and geometric coarsening away from the fractures.
//!
//! Reference fields are written as a native mesh plus a `cell_pressures`
//! block; externally produced files in the same format (for geometries this
//! solver cannot mesh) are ingested the same way.

use std::fmt::Write as _;
use std::path::Path;

use crate::discrete::{DiscreteSolution, TwoPointSystem};
use crate::edfm::assemble_background_tpfa;
use crate::error::Error;
use crate::geometry::{Aabb, Point2};
use crate::linalg::DofEntity;
use crate::mesh::{build_tensor_mesh, parse_native_tokens, Mesh};
use crate::scenario::Scenario;

/// Default geometric grading ratio away from fracture walls.
pub const DEFAULT_GRADING: f64 = 1.3;
/// Largest cell extent as a fraction of the domain extent per axis. The
/// default puts the standard ten-cells-across reference above 1e5 cells.
pub const DEFAULT_MAX_CELL_FRACTION: f64 = 1.0 / 192.0;
/// Cap on the cell aspect ratio produced by the grading.
const MAX_ASPECT: f64 = 1e4;

/// An equi-dimensional reference solution: fine mesh, cell pressures and
/// construction metadata.
#[derive(Clone, Debug)]
pub struct ReferenceField {
    pub mesh: Mesh,
    pub pressures: Vec<f64>,
    pub metadata: ReferenceMeta,
}

/// How a reference field was built (not serialized into the data file).
#[derive(Clone, Debug, Default)]
pub struct ReferenceMeta {
    pub scenario: String,
    pub cells_across: usize,
    pub grading: f64,
    /// Cells inside each fracture strip.
    pub fracture_cells: Vec<usize>,
}

impl ReferenceField {
    pub fn write<W: std::io::Write>(&self, mut w: W) -> Result<(), Error> {
        self.mesh.write_native(&mut w)?;
        let mut s = String::new();
        let _ = writeln!(s, "cell_pressures {}", self.pressures.len());
        for p in &self.pressures {
            let _ = writeln!(s, "{p}");
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> Result<(), Error> {
        let f = std::fs::File::create(path)?;
        self.write(std::io::BufWriter::new(f))
    }

    pub fn read_file(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        Self::read_str(&text)
    }

    pub fn read_str(text: &str) -> Result<Self, Error> {
        let mut tokens = text.split_whitespace();
        let mesh = parse_native_tokens(&mut tokens)?;
        let kw: String = tokens
            .next()
            .ok_or_else(|| Error::MeshFormat("missing cell_pressures block".into()))?
            .to_string();
        if kw != "cell_pressures" {
            return Err(Error::MeshFormat(format!(
                "expected `cell_pressures`, found `{kw}`"
            )));
        }
        let n: usize = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::MeshFormat("malformed cell_pressures count".into()))?;
        if n != mesh.n_cells() {
            return Err(Error::MeshFormat(format!(
                "cell_pressures count {n} does not match cell count {}",
                mesh.n_cells()
            )));
        }
        let mut pressures = Vec::with_capacity(n);
        for _ in 0..n {
            let v: f64 = tokens
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::MeshFormat("malformed cell pressure".into()))?;
            pressures.push(v);
        }
        Ok(ReferenceField {
            mesh,
            pressures,
            metadata: ReferenceMeta::default(),
        })
    }

    pub fn pressure_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &p in &self.pressures {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        (lo, hi)
    }
}

/// Axis-aligned fracture strip: the full-dimensional footprint of a reduced
/// fracture (centerline swept by the aperture).
#[derive(Clone, Copy, Debug)]
struct Strip {
    /// true: vertical (constant x); false: horizontal (constant y)
    vertical: bool,
    center: f64,
    aperture: f64,
    span: (f64, f64),
    k: f64,
}

fn strips_of(scenario: &Scenario) -> Result<Vec<Strip>, Error> {
    let tol = scenario.tolerance();
    scenario
        .fractures
        .fractures
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let a = f.geometry.a;
            let b = f.geometry.b;
            if (a.x - b.x).abs() <= tol {
                Ok(Strip {
                    vertical: true,
                    center: 0.5 * (a.x + b.x),
                    aperture: f.aperture,
                    span: (a.y.min(b.y), a.y.max(b.y)),
                    k: f.k_t,
                })
            } else if (a.y - b.y).abs() <= tol {
                Ok(Strip {
                    vertical: false,
                    center: 0.5 * (a.y + b.y),
                    aperture: f.aperture,
                    span: (a.x.min(b.x), a.x.max(b.x)),
                    k: f.k_t,
                })
            } else {
                Err(Error::Reference(format!(
                    "fracture {i} is not axis-aligned; the equi-dimensional reference only handles axis-aligned networks (supply an external reference field instead)"
                )))
            }
        })
        .collect()
}

fn rectangle_domain(scenario: &Scenario) -> Result<Aabb, Error> {
    let bb = scenario.bounding_box();
    let tol = scenario.tolerance();
    if scenario.domain.len() != 4 {
        return Err(Error::Reference(
            "the reference solver needs an axis-aligned rectangular domain".into(),
        ));
    }
    for v in &scenario.domain {
        let on_x = (v.x - bb.min.x).abs() <= tol || (v.x - bb.max.x).abs() <= tol;
        let on_y = (v.y - bb.min.y).abs() <= tol || (v.y - bb.max.y).abs() <= tol;
        if !(on_x && on_y) {
            return Err(Error::Reference(
                "the reference solver needs an axis-aligned rectangular domain".into(),
            ));
        }
    }
    Ok(bb)
}

/// One axis of the graded tensor grid: anchors at fracture walls get
/// `cells_across` uniform cells across each strip and geometric growth away
/// from the walls; plain anchors (strip ends, domain boundary) are simple
/// snap lines.
fn graded_axis(
    lo: f64,
    hi: f64,
    walls: &[(f64, f64)], // (center, aperture) of strips crossing this axis
    plain: &[f64],
    cells_across: usize,
    grading: f64,
    h_max: f64,
) -> Vec<f64> {
    let tol = (hi - lo) * 1e-12;
    // anchor lines with their local start size
    let mut anchors: Vec<(f64, f64)> = vec![(lo, h_max), (hi, h_max)];
    for &p in plain {
        anchors.push((p, h_max));
    }
    let mut strip_lines: Vec<f64> = Vec::new();
    for &(c, eps) in walls {
        let h_strip = eps / cells_across as f64;
        anchors.push((c - eps / 2.0, h_strip.min(h_max)));
        anchors.push((c + eps / 2.0, h_strip.min(h_max)));
        for i in 1..cells_across {
            strip_lines.push(c - eps / 2.0 + eps * i as f64 / cells_across as f64);
        }
    }
    anchors.sort_by(|a, b| a.0.total_cmp(&b.0));
    anchors.dedup_by(|a, b| {
        if (a.0 - b.0).abs() <= tol {
            // keep the finer start size
            b.1 = b.1.min(a.1);
            true
        } else {
            false
        }
    });
    // strip interiors are covered by the uniform strip lines; anchors that
    // fall inside a strip (fracture endpoints at a crossing) are redundant
    // and graded fill must not reach in there
    let inside_strip = |x: f64| -> bool {
        walls
            .iter()
            .any(|&(c, eps)| x > c - eps / 2.0 + tol && x < c + eps / 2.0 - tol)
    };
    anchors.retain(|&(x, _)| !inside_strip(x));

    let mut lines: Vec<f64> = anchors.iter().map(|a| a.0).collect();
    lines.extend_from_slice(&strip_lines);

    // graded fill between consecutive anchors
    for w in anchors.windows(2) {
        if inside_strip(0.5 * (w[0].0 + w[1].0)) {
            continue;
        }
        let (a, sa) = w[0];
        let (b, sb) = w[1];
        let gap = b - a;
        if gap <= tol {
            continue;
        }
        // march from both ends until sizes reach h_max
        let mut left: Vec<f64> = Vec::new();
        let mut x = a;
        let mut s = sa.min(gap);
        while s < h_max && x + s < b - tol {
            x += s;
            left.push(x);
            s = (s * grading).min(s * MAX_ASPECT);
        }
        let mut right: Vec<f64> = Vec::new();
        let mut y = b;
        let mut t = sb.min(gap);
        while t < h_max && y - t > x + tol {
            y -= t;
            right.push(y);
            t = (t * grading).min(t * MAX_ASPECT);
        }
        // uniform middle with about h_max spacing
        let mid_gap = y - x;
        if mid_gap > h_max {
            let k = (mid_gap / h_max).ceil() as usize;
            for i in 1..k {
                lines.push(x + mid_gap * i as f64 / k as f64);
            }
        }
        lines.extend(left);
        lines.extend(right);
    }

    lines.sort_by(|a, b| a.total_cmp(b));
    lines.dedup_by(|a, b| (*a - *b).abs() <= tol);
    lines
}

/// Builds the graded equi-dimensional tensor grid for an axis-aligned
/// scenario: snap lines at every fracture wall, `cells_across` cells across
/// each aperture, geometric grading with the given ratio away from the
/// walls.
pub fn build_equidimensional_grid(
    scenario: &Scenario,
    cells_across: usize,
    grading: f64,
) -> Result<Mesh, Error> {
    build_equidimensional_grid_with(scenario, cells_across, grading, DEFAULT_MAX_CELL_FRACTION)
}

/// [`build_equidimensional_grid`] with an explicit far-field cell size (as a
/// fraction of the domain extent); refinement ladders shrink this fraction.
pub fn build_equidimensional_grid_with(
    scenario: &Scenario,
    cells_across: usize,
    grading: f64,
    max_cell_fraction: f64,
) -> Result<Mesh, Error> {
    if cells_across < 1 {
        return Err(Error::Reference("cells_across must be at least 1".into()));
    }
    if !(grading > 1.0) {
        return Err(Error::Reference(format!(
            "grading ratio {grading} must exceed 1"
        )));
    }
    if !(max_cell_fraction > 0.0 && max_cell_fraction < 0.5) {
        return Err(Error::Reference(format!(
            "max cell fraction {max_cell_fraction} out of range"
        )));
    }
    let bb = rectangle_domain(scenario)?;
    let strips = strips_of(scenario)?;

    let mut x_walls = Vec::new();
    let mut y_walls = Vec::new();
    let mut x_plain = Vec::new();
    let mut y_plain = Vec::new();
    for s in &strips {
        if s.vertical {
            x_walls.push((s.center, s.aperture));
            y_plain.push(s.span.0);
            y_plain.push(s.span.1);
        } else {
            y_walls.push((s.center, s.aperture));
            x_plain.push(s.span.0);
            x_plain.push(s.span.1);
        }
    }
    let h_max_x = (bb.max.x - bb.min.x) * max_cell_fraction;
    let h_max_y = (bb.max.y - bb.min.y) * max_cell_fraction;
    let xs = graded_axis(bb.min.x, bb.max.x, &x_walls, &x_plain, cells_across, grading, h_max_x);
    let ys = graded_axis(bb.min.y, bb.max.y, &y_walls, &y_plain, cells_across, grading, h_max_y);
    build_tensor_mesh(&xs, &ys)
}

/// Per-cell permeability of the equi-dimensional model: harmonic mean of the
/// strips containing the cell centroid, matrix permeability outside.
fn cell_permeability(
    scenario: &Scenario,
    strips: &[Strip],
    centroid: Point2,
) -> [[f64; 2]; 2] {
    let mut inv_sum = 0.0;
    let mut count = 0usize;
    for s in strips {
        let (along, across) = if s.vertical {
            (centroid.y, centroid.x)
        } else {
            (centroid.x, centroid.y)
        };
        if (across - s.center).abs() < s.aperture / 2.0 && (s.span.0..=s.span.1).contains(&along)
        {
            inv_sum += 1.0 / s.k;
            count += 1;
        }
    }
    if count == 0 {
        scenario.permeability_at(centroid)
    } else {
        let k = count as f64 / inv_sum;
        [[k, 0.0], [0.0, k]]
    }
}

/// Solves the equi-dimensional reference problem on a grid built by
/// [`build_equidimensional_grid`].
pub fn solve_reference(
    scenario: &Scenario,
    mesh: &Mesh,
    cells_across: usize,
    grading: f64,
) -> Result<(ReferenceField, DiscreteSolution), Error> {
    scenario.validate()?;
    let strips = strips_of(scenario)?;
    let n = mesh.n_cells();
    let k_cells: Vec<[[f64; 2]; 2]> = (0..n)
        .map(|c| cell_permeability(scenario, &strips, mesh.cell_centroid(c)))
        .collect();

    let mut system = TwoPointSystem::new((0..n).map(DofEntity::MatrixCell).collect());
    for c in 0..n {
        system.volumes[c] = mesh.cell_area(c);
        system.loads[c] += scenario.source * mesh.cell_area(c);
    }
    assemble_background_tpfa(scenario, mesh, &mut system, |c| k_cells[c])?;
    let solution = DiscreteSolution::solve(system, n, vec![])?;

    let mut fracture_cells = vec![0usize; strips.len()];
    for c in 0..n {
        let p = mesh.cell_centroid(c);
        for (si, s) in strips.iter().enumerate() {
            let (along, across) = if s.vertical { (p.y, p.x) } else { (p.x, p.y) };
            if (across - s.center).abs() < s.aperture / 2.0
                && (s.span.0..=s.span.1).contains(&along)
            {
                fracture_cells[si] += 1;
            }
        }
    }

    let field = ReferenceField {
        mesh: mesh.clone(),
        pressures: solution.matrix_pressure.clone(),
        metadata: ReferenceMeta {
            scenario: scenario.name.clone(),
            cells_across,
            grading,
            fracture_cells,
        },
    };
    Ok((field, solution))
}

/// Exact area of each fracture strip on the grid (for the snapping check).
pub fn strip_volumes(scenario: &Scenario, mesh: &Mesh) -> Result<Vec<f64>, Error> {
    let strips = strips_of(scenario)?;
    let mut vols = vec![0.0; strips.len()];
    for c in 0..mesh.n_cells() {
        let p = mesh.cell_centroid(c);
        for (si, s) in strips.iter().enumerate() {
            let (along, across) = if s.vertical { (p.y, p.x) } else { (p.x, p.y) };
            if (across - s.center).abs() < s.aperture / 2.0
                && (s.span.0..=s.span.1).contains(&along)
            {
                vols[si] += mesh.cell_area(c);
            }
        }
    }
    Ok(vols)
}
