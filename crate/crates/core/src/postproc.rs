//! Post-processing: normalized L2 error norms of a hybrid solution against
//! an equi-dimensional reference (matrix part by polygon-polygon overlaps,
//! fracture part by projections onto the centerlines), line sampling for
//! profile plots, and CSV emission.
//!
//! The error norms follow
//! `err_m^2 = 1/(|Omega| dp^2) * sum |K_ref ∩ K_m| (p_m - p_ref)^2` over the
//! porous matrix (reference cells inside a fracture's aperture band are the
//! fracture domain and contribute to `err_f` instead), and
//! `err_f^2 = 1/(|gamma| dp^2) * sum |e| (p_f - p_ref)^2` with `|e|` the
//! projection of the reference cell onto the fracture centerline, where
//! `dp` is the reference pressure range.

use std::fmt::Write as _;

use crate::discrete::FractureElement;
use crate::error::Error;
use crate::geometry::{convex_overlap, Aabb, Point2, Segment2};
use crate::mesh::Mesh;
use crate::reference::ReferenceField;
use crate::scenario::FractureNetwork;

/// Normalized matrix and fracture errors with their ingredients.
#[derive(Clone, Debug)]
pub struct ErrorReport {
    pub err_m: f64,
    pub err_f: f64,
    /// Reference pressure range used for normalization.
    pub dp_ref: f64,
    /// Measure of the matrix domain (domain minus fracture bands).
    pub omega: f64,
    /// Measure of the fracture network.
    pub gamma: f64,
    pub per_fracture: Vec<f64>,
}

/// Uniform spatial bucketing of cells by bounding box.
pub struct CellLocator {
    bbox: Aabb,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl CellLocator {
    pub fn new(mesh: &Mesh) -> Self {
        let bbox = mesh.bounding_box();
        let n = mesh.n_cells();
        let nx = ((n as f64).sqrt().ceil() as usize).clamp(1, 512);
        let ny = nx;
        let mut buckets = vec![Vec::new(); nx * ny];
        for c in 0..n {
            let mut bb = Aabb::empty();
            for &v in mesh.cell_vertices(c) {
                bb.expand(mesh.vertex(v));
            }
            let (i0, j0) = Self::bin(&bbox, nx, ny, bb.min);
            let (i1, j1) = Self::bin(&bbox, nx, ny, bb.max);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(c);
                }
            }
        }
        CellLocator { bbox, nx, ny, buckets }
    }

    fn bin(bbox: &Aabb, nx: usize, ny: usize, p: Point2) -> (usize, usize) {
        let fx = (p.x - bbox.min.x) / (bbox.max.x - bbox.min.x).max(1e-300);
        let fy = (p.y - bbox.min.y) / (bbox.max.y - bbox.min.y).max(1e-300);
        let i = ((fx * nx as f64) as isize).clamp(0, nx as isize - 1) as usize;
        let j = ((fy * ny as f64) as isize).clamp(0, ny as isize - 1) as usize;
        (i, j)
    }

    /// Candidate cells whose buckets intersect `bb`.
    pub fn candidates(&self, bb: &Aabb, out: &mut Vec<usize>) {
        out.clear();
        let (i0, j0) = Self::bin(&self.bbox, self.nx, self.ny, bb.min);
        let (i1, j1) = Self::bin(&self.bbox, self.nx, self.ny, bb.max);
        for j in j0..=j1 {
            for i in i0..=i1 {
                out.extend_from_slice(&self.buckets[j * self.nx + i]);
            }
        }
        out.sort_unstable();
        out.dedup();
    }

    /// Containing cell of a point, if any.
    pub fn locate(&self, mesh: &Mesh, p: Point2) -> Option<usize> {
        if !self.bbox.contains(p) {
            return None;
        }
        let tol = mesh.tolerance();
        let (i, j) = Self::bin(&self.bbox, self.nx, self.ny, p);
        self.buckets[j * self.nx + i]
            .iter()
            .copied()
            .find(|&c| mesh.cell_polygon(c).contains(p, tol))
    }
}

/// Which fracture band (if any) a point falls into: perpendicular distance
/// within half an aperture and parameter inside the segment span.
fn band_of(network: &FractureNetwork, p: Point2, tol: f64) -> Option<(usize, f64)> {
    for (fi, f) in network.fractures.iter().enumerate() {
        let seg = &f.geometry;
        let t = seg.param_of(p);
        let tol_t = tol / seg.length();
        if t >= -tol_t && t <= 1.0 + tol_t && seg.signed_distance(p).abs() < f.aperture / 2.0 {
            return Some((fi, t.clamp(0.0, 1.0)));
        }
    }
    None
}

/// Computes the error norms of a hybrid solution (matrix pressures on
/// `mesh`, fracture elements along `network`) against a reference field.
pub fn compute_errors(
    mesh: &Mesh,
    matrix_pressure: &[f64],
    fracture_elements: &[FractureElement],
    network: &FractureNetwork,
    reference: &ReferenceField,
) -> Result<ErrorReport, Error> {
    let (lo, hi) = reference.pressure_range();
    let dp = hi - lo;
    if !(dp > 0.0) {
        return Err(Error::PostProc(format!(
            "reference pressure range {dp:.3e} must be positive"
        )));
    }
    let tol = mesh.tolerance().max(reference.mesh.tolerance());

    // group solution fracture elements by fracture
    let mut elements_by_fracture: Vec<Vec<&FractureElement>> = vec![Vec::new(); network.len()];
    for fe in fracture_elements {
        elements_by_fracture[fe.fracture].push(fe);
    }

    let locator = CellLocator::new(mesh);
    let mut candidates = Vec::new();

    let mut sum_m = 0.0;
    let mut omega = 0.0;
    let mut sum_f = vec![0.0; network.len()];
    let mut overlap_count = 0usize;

    for rc in 0..reference.mesh.n_cells() {
        let centroid = reference.mesh.cell_centroid(rc);
        let p_ref = reference.pressures[rc];
        if let Some((fi, _)) = band_of(network, centroid, tol) {
            // fracture-domain reference cell: project onto the centerline
            let seg = &network.fractures[fi].geometry;
            let len = seg.length();
            let mut t_lo = f64::INFINITY;
            let mut t_hi = f64::NEG_INFINITY;
            for &v in reference.mesh.cell_vertices(rc) {
                let t = seg.param_of(reference.mesh.vertex(v)).clamp(0.0, 1.0);
                t_lo = t_lo.min(t);
                t_hi = t_hi.max(t);
            }
            for fe in &elements_by_fracture[fi] {
                let a = t_lo.max(fe.t0);
                let b = t_hi.min(fe.t1);
                if b > a {
                    let e = (b - a) * len;
                    sum_f[fi] += e * (fe.pressure - p_ref) * (fe.pressure - p_ref);
                }
            }
            continue;
        }

        // matrix-domain reference cell: overlap with the method cells
        let rpoly = reference.mesh.cell_polygon(rc);
        let rbb = rpoly.bounding_box();
        locator.candidates(&rbb, &mut candidates);
        for &mc in &candidates {
            let mpoly = mesh.cell_polygon(mc);
            if !mpoly.bounding_box().intersects(&rbb) {
                continue;
            }
            if let Some(ov) = convex_overlap(&rpoly, &mpoly, tol * 1e-3) {
                let area = ov.area();
                let diff = matrix_pressure[mc] - p_ref;
                sum_m += area * diff * diff;
                omega += area;
                overlap_count += 1;
            }
        }
    }
    if overlap_count == 0 {
        return Err(Error::PostProc(
            "no overlaps between solution and reference meshes; do they share a domain?".into(),
        ));
    }

    let gamma = network.total_length();
    let err_m = (sum_m / (omega * dp * dp)).sqrt();
    let per_fracture: Vec<f64> = network
        .fractures
        .iter()
        .enumerate()
        .map(|(fi, f)| (sum_f[fi] / (f.geometry.length() * dp * dp)).sqrt())
        .collect();
    let err_f = if gamma > 0.0 {
        (sum_f.iter().sum::<f64>() / (gamma * dp * dp)).sqrt()
    } else {
        0.0
    };

    Ok(ErrorReport {
        err_m,
        err_f,
        dp_ref: dp,
        omega,
        gamma,
        per_fracture,
    })
}

/// L2 norm of the cell-wise difference between two fields on different
/// meshes of the same domain (used for reference self-convergence).
pub fn l2_field_difference(a: &ReferenceField, b: &ReferenceField) -> Result<f64, Error> {
    let tol = a.mesh.tolerance().max(b.mesh.tolerance());
    let locator = CellLocator::new(&a.mesh);
    let mut candidates = Vec::new();
    let mut sum = 0.0;
    for rc in 0..b.mesh.n_cells() {
        let rpoly = b.mesh.cell_polygon(rc);
        let rbb = rpoly.bounding_box();
        locator.candidates(&rbb, &mut candidates);
        for &mc in &candidates {
            let mpoly = a.mesh.cell_polygon(mc);
            if !mpoly.bounding_box().intersects(&rbb) {
                continue;
            }
            if let Some(ov) = convex_overlap(&rpoly, &mpoly, tol * 1e-3) {
                let d = a.pressures[mc] - b.pressures[rc];
                sum += ov.area() * d * d;
            }
        }
    }
    Ok(sum.sqrt())
}

/// Piecewise-constant samples along a line; points outside the domain (or
/// in uncovered spots) carry no value.
#[derive(Clone, Debug)]
pub struct LineSample {
    pub line: Segment2,
    /// (arc length, value) pairs; `None` marks a gap.
    pub samples: Vec<(f64, Option<f64>)>,
}

impl LineSample {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("arc_length,value\n");
        for (x, v) in &self.samples {
            match v {
                Some(v) => {
                    let _ = writeln!(s, "{x},{v}");
                }
                None => {
                    let _ = writeln!(s, "{x},");
                }
            }
        }
        s
    }

    /// Values only, aligned with sample positions.
    pub fn values(&self) -> impl Iterator<Item = Option<f64>> + '_ {
        self.samples.iter().map(|(_, v)| *v)
    }
}

/// Samples the piecewise-constant solution at `n` equally spaced points of
/// a line. Points inside a fracture's aperture band report the fracture-cell
/// value; other points the containing cell's value.
pub fn sample_line(
    mesh: &Mesh,
    matrix_pressure: &[f64],
    fracture_elements: &[FractureElement],
    network: &FractureNetwork,
    line: &Segment2,
    n: usize,
) -> LineSample {
    let locator = CellLocator::new(mesh);
    let tol = mesh.tolerance();
    let len = line.length();
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let t = if n == 1 { 0.5 } else { i as f64 / (n - 1) as f64 };
        let p = line.point_at(t);
        let value = match band_of(network, p, tol) {
            Some((fi, tf)) => fracture_elements
                .iter()
                .find(|fe| fe.fracture == fi && tf >= fe.t0 - 1e-12 && tf <= fe.t1 + 1e-12)
                .map(|fe| fe.pressure),
            None => locator.locate(mesh, p).map(|c| matrix_pressure[c]),
        };
        samples.push((t * len, value));
    }
    LineSample {
        line: *line,
        samples,
    }
}

/// One row of the comparison table (columns of the benchmark result tables).
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub scenario: String,
    pub method: String,
    pub err_m: Option<f64>,
    pub err_f: Option<f64>,
    pub nnz_density: Option<f64>,
    pub cond2: Option<f64>,
    pub dofs: usize,
}

pub const SUMMARY_HEADER: &str = "scenario,method,err_m,err_f,nnz_density,cond2,dofs";

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from(SUMMARY_HEADER);
    s.push('\n');
    for r in rows {
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.scenario,
            r.method,
            fmt(r.err_m),
            fmt(r.err_f),
            fmt(r.nnz_density),
            fmt(r.cond2),
            r.dofs
        );
    }
    s
}

/// Parses rows written by [`summary_csv`].
pub fn parse_summary_csv(text: &str) -> Result<Vec<SummaryRow>, Error> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == SUMMARY_HEADER => {}
        other => {
            return Err(Error::PostProc(format!(
                "not a summary file (header {other:?})"
            )))
        }
    }
    let mut rows = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(Error::PostProc(format!(
                "summary line {} has {} columns, expected 7",
                ln + 2,
                cols.len()
            )));
        }
        let num = |s: &str| -> Result<Option<f64>, Error> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse()
                    .map(Some)
                    .map_err(|_| Error::PostProc(format!("malformed number `{s}`")))
            }
        };
        rows.push(SummaryRow {
            scenario: cols[0].to_string(),
            method: cols[1].to_string(),
            err_m: num(cols[2])?,
            err_f: num(cols[3])?,
            nnz_density: num(cols[4])?,
            cond2: num(cols[5])?,
            dofs: cols[6]
                .parse()
                .map_err(|_| Error::PostProc(format!("malformed dof count `{}`", cols[6])))?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_structured_quads;
    use crate::reference::{ReferenceField, ReferenceMeta};
    use crate::scenario::FractureSegment;
    use approx::assert_relative_eq;

    fn uniform_reference(nx: usize, f: impl Fn(Point2) -> f64) -> ReferenceField {
        let mesh = build_structured_quads(0.0, 0.0, 1.0, 1.0, nx, nx, &[], &[]).unwrap();
        let pressures = (0..mesh.n_cells()).map(|c| f(mesh.cell_centroid(c))).collect();
        ReferenceField {
            mesh,
            pressures,
            metadata: ReferenceMeta::default(),
        }
    }

    #[test]
    fn identical_fields_have_zero_error() {
        let reference = uniform_reference(8, |p| p.x);
        let network = FractureNetwork::default();
        let rep = compute_errors(
            &reference.mesh,
            &reference.pressures,
            &[],
            &network,
            &reference,
        )
        .unwrap();
        assert!(rep.err_m <= 1e-14, "err_m = {}", rep.err_m);
        assert_eq!(rep.err_f, 0.0);
        assert_relative_eq!(rep.omega, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn constant_offset_gives_c_over_dp() {
        // reference and solution on the same mesh so the only difference is
        // the constant offset c = 0.1 * dp_ref
        let mesh = build_structured_quads(0.0, 0.0, 1.0, 1.0, 9, 9, &[], &[]).unwrap();
        let reference = ReferenceField {
            mesh: mesh.clone(),
            pressures: (0..mesh.n_cells())
                .map(|cell| {
                    let p = mesh.cell_centroid(cell);
                    p.x + 2.0 * p.y
                })
                .collect(),
            metadata: ReferenceMeta::default(),
        };
        let (lo, hi) = reference.pressure_range();
        let c = 0.1 * (hi - lo);
        let shifted: Vec<f64> = reference.pressures.iter().map(|p| p + c).collect();
        let rep = compute_errors(
            &mesh,
            &shifted,
            &[],
            &FractureNetwork::default(),
            &reference,
        )
        .unwrap();
        assert_relative_eq!(rep.err_m, c / rep.dp_ref, max_relative = 1e-10);
        assert_relative_eq!(rep.err_m, 0.1, max_relative = 1e-10);
    }

    #[test]
    fn affine_rescaling_invariance() {
        let reference = uniform_reference(5, |p| p.x * p.x + 0.3 * p.y);
        let mesh = build_structured_quads(0.0, 0.0, 1.0, 1.0, 7, 7, &[], &[]).unwrap();
        let sol: Vec<f64> = (0..mesh.n_cells())
            .map(|c| {
                let p = mesh.cell_centroid(c);
                p.x * p.x + 0.35 * p.y
            })
            .collect();
        let net = FractureNetwork::default();
        let r0 = compute_errors(&mesh, &sol, &[], &net, &reference).unwrap();

        let a = 3.7;
        let b = -11.0;
        let sol2: Vec<f64> = sol.iter().map(|p| a * p + b).collect();
        let ref2 = ReferenceField {
            mesh: reference.mesh.clone(),
            pressures: reference.pressures.iter().map(|p| a * p + b).collect(),
            metadata: ReferenceMeta::default(),
        };
        let r1 = compute_errors(&mesh, &sol2, &[], &net, &ref2).unwrap();
        assert_relative_eq!(r0.err_m, r1.err_m, max_relative = 1e-12);
    }

    #[test]
    fn overlap_areas_tile_the_domain() {
        let reference = uniform_reference(11, |p| p.x);
        let mesh = build_structured_quads(0.0, 0.0, 1.0, 1.0, 4, 7, &[0.37], &[]).unwrap();
        let sol = vec![0.0; mesh.n_cells()];
        let rep =
            compute_errors(&mesh, &sol, &[], &FractureNetwork::default(), &reference).unwrap();
        assert_relative_eq!(rep.omega, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn fracture_band_cells_feed_err_f() {
        // one horizontal fracture with a fat aperture so band cells exist;
        // 0.15 keeps the band walls strictly inside reference cells
        let eps = 0.15;
        let network = FractureNetwork {
            fractures: vec![FractureSegment {
                geometry: Segment2::new(Point2::new(0.0, 0.5), Point2::new(1.0, 0.5)),
                aperture: eps,
                k_n: 1.0,
                k_t: 1.0,
            }],
        };
        let reference = uniform_reference(10, |p| if (p.y - 0.5).abs() < eps / 2.0 { 2.0 } else { 0.0 });
        let mesh = build_structured_quads(0.0, 0.0, 1.0, 1.0, 2, 2, &[], &[]).unwrap();
        let sol = vec![0.0; mesh.n_cells()];
        // one fracture element spanning the whole fracture with value 2: no
        // fracture error; matrix error zero as band cells are excluded
        let fe = FractureElement {
            fracture: 0,
            segment: network.fractures[0].geometry,
            t0: 0.0,
            t1: 1.0,
            aperture: eps,
            pressure: 2.0,
            dof: 0,
        };
        let rep = compute_errors(&mesh, &sol, &[fe], &network, &reference).unwrap();
        assert!(rep.err_m <= 1e-12, "err_m = {}", rep.err_m);
        assert!(rep.err_f <= 1e-12, "err_f = {}", rep.err_f);
        // two rows of reference cells (centroids 0.45 and 0.55) are fracture
        // domain, each 0.1 deep
        assert_relative_eq!(rep.omega, 0.8, max_relative = 1e-9);

        // wrong fracture value by 1: both band rows project onto the full
        // centerline, so err_f = sqrt(2 * 1^2 / (1 * dp^2)) with dp = 2
        let fe_bad = FractureElement {
            pressure: 1.0,
            ..fe
        };
        let rep = compute_errors(&mesh, &sol, &[fe_bad], &network, &reference).unwrap();
        assert_relative_eq!(rep.err_f, 0.5_f64.sqrt(), max_relative = 1e-9);
    }

    #[test]
    fn zero_reference_range_is_an_error() {
        let reference = uniform_reference(3, |_| 1.0);
        let mesh = build_structured_quads(0.0, 0.0, 1.0, 1.0, 2, 2, &[], &[]).unwrap();
        let sol = vec![1.0; mesh.n_cells()];
        assert!(
            compute_errors(&mesh, &sol, &[], &FractureNetwork::default(), &reference).is_err()
        );
    }

    #[test]
    fn line_sampling_constant_and_staircase() {
        let mesh = build_structured_quads(0.0, 0.0, 1.0, 1.0, 4, 4, &[], &[]).unwrap();
        let constant = vec![7.5; mesh.n_cells()];
        let line = Segment2::new(Point2::new(0.0, 0.3), Point2::new(1.0, 0.3));
        let s = sample_line(&mesh, &constant, &[], &FractureNetwork::default(), &line, 50);
        assert!(s.values().all(|v| v == Some(7.5)));

        // staircase of p = x stays within one cell width of the line
        let linear: Vec<f64> = (0..mesh.n_cells())
            .map(|c| mesh.cell_centroid(c).x)
            .collect();
        let s = sample_line(&mesh, &linear, &[], &FractureNetwork::default(), &line, 101);
        for (x, v) in &s.samples {
            let v = v.unwrap();
            assert!(
                (v - x / 1.0).abs() <= 0.25 / 2.0 + 1e-12,
                "staircase deviates at {x}: {v}"
            );
        }
    }

    #[test]
    fn outside_points_are_gaps() {
        let mesh = build_structured_quads(0.0, 0.0, 1.0, 1.0, 2, 2, &[], &[]).unwrap();
        let sol = vec![1.0; mesh.n_cells()];
        let line = Segment2::new(Point2::new(-0.5, 0.5), Point2::new(0.5, 0.5));
        let s = sample_line(&mesh, &sol, &[], &FractureNetwork::default(), &line, 11);
        assert!(s.samples[0].1.is_none());
        assert!(s.samples[10].1.is_some());
        let csv = s.to_csv();
        assert!(csv.starts_with("arc_length,value\n"));
    }
}
