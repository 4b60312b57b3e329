//! 2D cell complexes of triangles and quads: structured-grid construction,
//! a plain-text native format, Gmsh v2 ASCII ingestion, derived face
//! connectivity and the per-face geometric quantities consumed by TPFA
//! assembly, plus fracture-face tagging on conforming meshes.
//!
//! Native format (`fvmesh 1`):
//! ```text
//! fvmesh 1
//! vertices N
//! x y                  (N lines)
//! cells M
//! k v0 ... v_{k-1}     (M lines, k in {3,4}, CCW)
//! fracture_faces F
//! fracture_id vA vB    (F lines)
//! boundary_tags B
//! tag vA vB            (B lines)
//! ```
//! Boundary tags refer to edges of the scenario's domain polygon.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::Error;
use crate::geometry::{
    polygon_area, polygon_centroid, Aabb, ConvexPolygon, Point2, Segment2, Vec2,
    RELATIVE_TOLERANCE,
};
use crate::scenario::FractureNetwork;

/// A unique edge of the mesh with its adjacency.
#[derive(Clone, Copy, Debug)]
pub struct Face {
    /// Endpoints ordered so the left cell traverses v[0] -> v[1] CCW.
    pub v: [usize; 2],
    pub left: usize,
    pub right: Option<usize>,
    /// Domain-polygon edge index for boundary faces, when known.
    pub boundary_tag: Option<u32>,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }

    pub fn other_cell(&self, cell: usize) -> Option<usize> {
        if self.left == cell {
            self.right
        } else {
            Some(self.left)
        }
    }
}

/// Face area (edge length times unit depth), unit normal oriented from the
/// left to the right cell, centroid, and the distance vectors from each
/// adjacent cell center to the face centroid.
#[derive(Clone, Copy, Debug)]
pub struct FaceGeometry {
    pub area: f64,
    pub normal: Vec2,
    pub centroid: Point2,
    pub d_left: Vec2,
    pub d_right: Option<Vec2>,
}

/// Immutable 2D mesh.
#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point2>,
    cells: Vec<Vec<usize>>,
    faces: Vec<Face>,
    cell_faces: Vec<Vec<usize>>,
    /// (fracture id, face id) pairs carried by the mesh file, if any.
    fracture_faces: Vec<(usize, usize)>,
    cell_areas: Vec<f64>,
    cell_centroids: Vec<Point2>,
    bbox: Aabb,
}

impl Mesh {
    /// Builds a mesh from vertices and CCW cells, deriving unique faces.
    /// `fracture_edges` and `tagged_edges` reference faces by vertex pair.
    pub fn new(
        vertices: Vec<Point2>,
        cells: Vec<Vec<usize>>,
        fracture_edges: Vec<(usize, [usize; 2])>,
        tagged_edges: Vec<(u32, [usize; 2])>,
    ) -> Result<Self, Error> {
        let nv = vertices.len();
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::MeshInvalid("non-finite vertex coordinates".into()));
        }
        let bbox = Aabb::of_points(&vertices);

        let mut faces: Vec<Face> = Vec::new();
        let mut face_of: HashMap<(usize, usize), usize> = HashMap::new();
        let mut cell_faces: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
        let mut cell_areas = Vec::with_capacity(cells.len());
        let mut cell_centroids = Vec::with_capacity(cells.len());

        for (c, cell) in cells.iter().enumerate() {
            if cell.len() < 3 || cell.len() > 4 {
                return Err(Error::MeshInvalid(format!(
                    "cell {c} has {} vertices; only triangles and quads are supported",
                    cell.len()
                )));
            }
            if cell.iter().any(|&v| v >= nv) {
                return Err(Error::MeshInvalid(format!(
                    "cell {c} references a vertex out of range"
                )));
            }
            let pts: Vec<Point2> = cell.iter().map(|&v| vertices[v]).collect();
            let area = polygon_area(&pts);
            // degeneracy is relative to the cell's own extent: graded
            // reference grids legitimately contain aperture-scale cells
            let scale = Aabb::of_points(&pts).diagonal();
            if area <= RELATIVE_TOLERANCE * scale * scale {
                return Err(Error::MeshInvalid(format!(
                    "cell {c} has non-positive or degenerate signed area {area:.3e}"
                )));
            }
            // assembly requires convex cells
            ConvexPolygon::new(pts.clone())
                .map_err(|e| Error::MeshInvalid(format!("cell {c}: {e}")))?;
            cell_areas.push(area);
            cell_centroids.push(polygon_centroid(&pts));

            let k = cell.len();
            for e in 0..k {
                let a = cell[e];
                let b = cell[(e + 1) % k];
                let key = (a.min(b), a.max(b));
                match face_of.get(&key) {
                    None => {
                        let id = faces.len();
                        faces.push(Face {
                            v: [a, b],
                            left: c,
                            right: None,
                            boundary_tag: None,
                        });
                        face_of.insert(key, id);
                        cell_faces[c].push(id);
                    }
                    Some(&id) => {
                        if faces[id].right.is_some() {
                            return Err(Error::MeshInvalid(format!(
                                "non-manifold connectivity: edge ({a}, {b}) borders more than two cells"
                            )));
                        }
                        if faces[id].left == c {
                            return Err(Error::MeshInvalid(format!(
                                "cell {c} repeats edge ({a}, {b})"
                            )));
                        }
                        faces[id].right = Some(c);
                        cell_faces[c].push(id);
                    }
                }
            }
        }

        for (frac, [a, b]) in &fracture_edges {
            let key = (*a.min(b), *a.max(b));
            let id = *face_of.get(&key).ok_or_else(|| {
                Error::MeshFormat(format!(
                    "fracture {frac} references edge ({a}, {b}) which is not a mesh face"
                ))
            })?;
            if faces[id].is_boundary() {
                return Err(Error::MeshFormat(format!(
                    "fracture {frac} lies on boundary edge ({a}, {b}); fracture faces must be interior"
                )));
            }
        }
        let fracture_faces = fracture_edges
            .into_iter()
            .map(|(frac, [a, b])| (frac, face_of[&(a.min(b), a.max(b))]))
            .collect();

        for (tag, [a, b]) in tagged_edges {
            let key = (a.min(b), a.max(b));
            let id = *face_of.get(&key).ok_or_else(|| {
                Error::MeshFormat(format!(
                    "boundary tag {tag} references edge ({a}, {b}) which is not a mesh face"
                ))
            })?;
            if !faces[id].is_boundary() {
                return Err(Error::MeshFormat(format!(
                    "boundary tag {tag} set on interior edge ({a}, {b})"
                )));
            }
            faces[id].boundary_tag = Some(tag);
        }

        Ok(Mesh {
            vertices,
            cells,
            faces,
            cell_faces,
            fracture_faces,
            cell_areas,
            cell_centroids,
            bbox,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex(&self, v: usize) -> Point2 {
        self.vertices[v]
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn cell_vertices(&self, c: usize) -> &[usize] {
        &self.cells[c]
    }

    pub fn cell_polygon(&self, c: usize) -> ConvexPolygon {
        ConvexPolygon::new(self.cells[c].iter().map(|&v| self.vertices[v]).collect())
            .expect("cells are validated convex at construction")
    }

    pub fn cell_area(&self, c: usize) -> f64 {
        self.cell_areas[c]
    }

    pub fn cell_centroid(&self, c: usize) -> Point2 {
        self.cell_centroids[c]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &Face {
        &self.faces[f]
    }

    pub fn cell_face_ids(&self, c: usize) -> &[usize] {
        &self.cell_faces[c]
    }

    pub fn face_segment(&self, f: usize) -> Segment2 {
        let face = &self.faces[f];
        Segment2::new(self.vertices[face.v[0]], self.vertices[face.v[1]])
    }

    pub fn face_length(&self, f: usize) -> f64 {
        self.face_segment(f).length()
    }

    pub fn face_centroid(&self, f: usize) -> Point2 {
        self.face_segment(f).midpoint()
    }

    /// Unit normal oriented from the left cell to the right cell (outward on
    /// the boundary).
    pub fn face_normal(&self, f: usize) -> Vec2 {
        self.face_segment(f).unit_direction().perp_right()
    }

    pub fn face_geometry(&self, f: usize) -> FaceGeometry {
        let face = &self.faces[f];
        let centroid = self.face_centroid(f);
        FaceGeometry {
            area: self.face_length(f),
            normal: self.face_normal(f),
            centroid,
            d_left: self.cell_centroids[face.left].to(centroid),
            d_right: face.right.map(|r| self.cell_centroids[r].to(centroid)),
        }
    }

    /// Fracture-face pairs carried by the mesh file (may be empty even on a
    /// conforming mesh; see [`tag_fracture_faces`]).
    pub fn fracture_face_pairs(&self) -> &[(usize, usize)] {
        &self.fracture_faces
    }

    /// Linear-scan point location (post-processing uses a bucketed locator).
    pub fn cell_containing(&self, p: Point2) -> Option<usize> {
        let tol = self.tolerance();
        (0..self.n_cells()).find(|&c| self.cell_polygon(c).contains(p, tol))
    }

    pub fn bounding_box(&self) -> Aabb {
        self.bbox
    }

    /// Absolute geometric tolerance for this mesh.
    pub fn tolerance(&self) -> f64 {
        RELATIVE_TOLERANCE * self.bbox.diagonal()
    }

    pub fn total_area(&self) -> f64 {
        self.cell_areas.iter().sum()
    }

    pub fn write_native<W: std::io::Write>(&self, mut w: W) -> Result<(), Error> {
        let mut s = String::new();
        s.push_str("fvmesh 1\n");
        let _ = writeln!(s, "vertices {}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{} {}", v.x, v.y);
        }
        let _ = writeln!(s, "cells {}", self.cells.len());
        for c in &self.cells {
            let _ = write!(s, "{}", c.len());
            for v in c {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "fracture_faces {}", self.fracture_faces.len());
        for (frac, f) in &self.fracture_faces {
            let face = &self.faces[*f];
            let _ = writeln!(s, "{frac} {} {}", face.v[0], face.v[1]);
        }
        let tagged: Vec<(u32, [usize; 2])> = self
            .faces
            .iter()
            .filter_map(|f| f.boundary_tag.map(|t| (t, f.v)))
            .collect();
        let _ = writeln!(s, "boundary_tags {}", tagged.len());
        for (tag, [a, b]) in tagged {
            let _ = writeln!(s, "{tag} {a} {b}");
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn write_native_file(&self, path: &Path) -> Result<(), Error> {
        let f = std::fs::File::create(path)?;
        self.write_native(std::io::BufWriter::new(f))
    }
}

/// Reads a mesh, dispatching on the header: `fvmesh` native or Gmsh v2 ASCII.
pub fn read_mesh(path: &Path) -> Result<Mesh, Error> {
    let text = std::fs::read_to_string(path)?;
    read_mesh_str(&text)
}

pub fn read_mesh_str(text: &str) -> Result<Mesh, Error> {
    let head = text.trim_start();
    if head.starts_with("fvmesh") {
        read_native_str(text)
    } else if head.starts_with("$MeshFormat") {
        read_gmsh_str(text)
    } else {
        Err(Error::MeshFormat(
            "unrecognized mesh header (expected `fvmesh 1` or Gmsh `$MeshFormat`)".into(),
        ))
    }
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T, Error> {
    tok.ok_or_else(|| Error::MeshFormat(format!("missing {what}")))?
        .parse::<T>()
        .map_err(|_| Error::MeshFormat(format!("malformed {what}")))
}

pub fn read_native_str(text: &str) -> Result<Mesh, Error> {
    let mut tokens = text.split_whitespace();
    parse_native_tokens(&mut tokens)
}

/// Parses a native mesh from a token stream, leaving the stream positioned
/// after the mesh blocks (the reference-field format appends to it).
pub(crate) fn parse_native_tokens(tokens: &mut std::str::SplitWhitespace<'_>) -> Result<Mesh, Error> {
    let magic: String = parse(tokens.next(), "header")?;
    let version: u32 = parse(tokens.next(), "format version")?;
    if magic != "fvmesh" || version != 1 {
        return Err(Error::MeshFormat(format!(
            "unsupported mesh format `{magic} {version}`"
        )));
    }

    fn expect_block(
        tokens: &mut std::str::SplitWhitespace<'_>,
        kw: &str,
    ) -> Result<usize, Error> {
        let word: String = parse(tokens.next(), kw)?;
        if word != kw {
            return Err(Error::MeshFormat(format!("expected `{kw}`, found `{word}`")));
        }
        parse(tokens.next(), &format!("{kw} count"))
    }

    let nv = expect_block(tokens, "vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let x: f64 = parse(tokens.next(), "vertex x")?;
        let y: f64 = parse(tokens.next(), "vertex y")?;
        vertices.push(Point2::new(x, y));
    }

    let nc = expect_block(tokens, "cells")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let k: usize = parse(tokens.next(), "cell vertex count")?;
        let mut cell = Vec::with_capacity(k);
        for _ in 0..k {
            cell.push(parse(tokens.next(), "cell vertex")?);
        }
        cells.push(cell);
    }

    let nf = expect_block(tokens, "fracture_faces")?;
    let mut fracture_edges = Vec::with_capacity(nf);
    for _ in 0..nf {
        let frac: usize = parse(tokens.next(), "fracture id")?;
        let a: usize = parse(tokens.next(), "fracture edge vertex")?;
        let b: usize = parse(tokens.next(), "fracture edge vertex")?;
        fracture_edges.push((frac, [a, b]));
    }

    let nb = expect_block(tokens, "boundary_tags")?;
    let mut tagged = Vec::with_capacity(nb);
    for _ in 0..nb {
        let tag: u32 = parse(tokens.next(), "boundary tag")?;
        let a: usize = parse(tokens.next(), "boundary edge vertex")?;
        let b: usize = parse(tokens.next(), "boundary edge vertex")?;
        tagged.push((tag, [a, b]));
    }

    Mesh::new(vertices, cells, fracture_edges, tagged)
}

/// Gmsh v2 ASCII reader (element types 1/2/3). Line elements carry fracture
/// or boundary tags through their first physical tag: values below 1000 mark
/// fracture faces of fracture `tag - 1`, values from 1000 up mark boundary
/// faces of domain-polygon edge `tag - 1000`.
pub fn read_gmsh_str(text: &str) -> Result<Mesh, Error> {
    let mut lines = text.lines();
    let mut vertices = Vec::new();
    let mut id_map: HashMap<usize, usize> = HashMap::new();
    let mut cells = Vec::new();
    let mut fracture_edges = Vec::new();
    let mut tagged_edges = Vec::new();

    while let Some(line) = lines.next() {
        match line.trim() {
            "$MeshFormat" => {
                let fmt = lines
                    .next()
                    .ok_or_else(|| Error::MeshFormat("truncated $MeshFormat".into()))?;
                let ver: f64 = parse(fmt.split_whitespace().next(), "gmsh version")?;
                if !(2.0..3.0).contains(&ver) {
                    return Err(Error::MeshFormat(format!(
                        "unsupported Gmsh format version {ver}; only v2 ASCII is supported"
                    )));
                }
            }
            "$Nodes" => {
                let n: usize = parse(
                    lines.next().and_then(|l| l.split_whitespace().next()),
                    "node count",
                )?;
                for _ in 0..n {
                    let l = lines
                        .next()
                        .ok_or_else(|| Error::MeshFormat("truncated $Nodes".into()))?;
                    let mut t = l.split_whitespace();
                    let id: usize = parse(t.next(), "node id")?;
                    let x: f64 = parse(t.next(), "node x")?;
                    let y: f64 = parse(t.next(), "node y")?;
                    id_map.insert(id, vertices.len());
                    vertices.push(Point2::new(x, y));
                }
            }
            "$Elements" => {
                let n: usize = parse(
                    lines.next().and_then(|l| l.split_whitespace().next()),
                    "element count",
                )?;
                for _ in 0..n {
                    let l = lines
                        .next()
                        .ok_or_else(|| Error::MeshFormat("truncated $Elements".into()))?;
                    let mut t = l.split_whitespace();
                    let _id: usize = parse(t.next(), "element id")?;
                    let ty: usize = parse(t.next(), "element type")?;
                    let ntags: usize = parse(t.next(), "tag count")?;
                    let mut tags = Vec::with_capacity(ntags);
                    for _ in 0..ntags {
                        tags.push(parse::<i64>(t.next(), "element tag")?);
                    }
                    let nverts = match ty {
                        1 => 2,
                        2 => 3,
                        3 => 4,
                        15 => 1, // point elements are skipped
                        other => {
                            return Err(Error::MeshFormat(format!(
                                "unsupported Gmsh element type {other}"
                            )))
                        }
                    };
                    let mut vs = Vec::with_capacity(nverts);
                    for _ in 0..nverts {
                        let id: usize = parse(t.next(), "element node")?;
                        let v = *id_map.get(&id).ok_or_else(|| {
                            Error::MeshFormat(format!("element references unknown node {id}"))
                        })?;
                        vs.push(v);
                    }
                    match ty {
                        1 => {
                            let physical = *tags.first().unwrap_or(&0);
                            if physical >= 1000 {
                                tagged_edges.push(((physical - 1000) as u32, [vs[0], vs[1]]));
                            } else if physical >= 1 {
                                fracture_edges.push(((physical - 1) as usize, [vs[0], vs[1]]));
                            }
                        }
                        2 | 3 => {
                            // enforce CCW orientation
                            let pts: Vec<Point2> = vs.iter().map(|&v| vertices[v]).collect();
                            if polygon_area(&pts) < 0.0 {
                                vs.reverse();
                            }
                            cells.push(vs);
                        }
                        _ => {}
                    }
                }
            }
            _ => {}
        }
    }
    if vertices.is_empty() || cells.is_empty() {
        return Err(Error::MeshFormat("Gmsh file has no nodes or no cells".into()));
    }
    Mesh::new(vertices, cells, fracture_edges, tagged_edges)
}

/// Merges uniform grid lines with snap coordinates, deduplicating within a
/// relative tolerance of the axis extent.
fn axis_lines(lo: f64, hi: f64, n: usize, snaps: &[f64]) -> Result<Vec<f64>, Error> {
    let tol = (hi - lo) * 1e-12;
    let mut lines: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    for &s in snaps {
        if s < lo - tol || s > hi + tol {
            return Err(Error::MeshInvalid(format!(
                "snap line {s} lies outside [{lo}, {hi}]"
            )));
        }
        lines.push(s.clamp(lo, hi));
    }
    lines.sort_by(|a, b| a.total_cmp(b));
    lines.dedup_by(|a, b| (*a - *b).abs() <= tol);
    Ok(lines)
}

/// Tensor-product quad mesh of an axis-aligned rectangle. Snap coordinates
/// insert extra grid lines (used to conform to axis-aligned fractures and by
/// the graded reference grids).
#[allow(clippy::too_many_arguments)]
pub fn build_structured_quads(
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    nx: usize,
    ny: usize,
    snap_x: &[f64],
    snap_y: &[f64],
) -> Result<Mesh, Error> {
    if nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0) {
        return Err(Error::MeshInvalid(format!(
            "invalid structured grid request {nx}x{ny} on [{x0},{x1}]x[{y0},{y1}]"
        )));
    }
    let xs = axis_lines(x0, x1, nx, snap_x)?;
    let ys = axis_lines(y0, y1, ny, snap_y)?;
    build_tensor_mesh(&xs, &ys)
}

/// Quad mesh from explicit grid lines (both slices sorted, deduplicated).
pub fn build_tensor_mesh(xs: &[f64], ys: &[f64]) -> Result<Mesh, Error> {
    let nx = xs.len() - 1;
    let ny = ys.len() - 1;
    let mut vertices = Vec::with_capacity(xs.len() * ys.len());
    for y in ys {
        for x in xs {
            vertices.push(Point2::new(*x, *y));
        }
    }
    let vid = |i: usize, j: usize| j * xs.len() + i;
    let mut cells = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            cells.push(vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]);
        }
    }
    Mesh::new(vertices, cells, Vec::new(), Vec::new())
}

/// Quad mesh fitted to a domain with vertical left/right sides and
/// piecewise-linear top and bottom profiles (the groundwater benchmark's
/// non-straight surface). Columns are uniform in x with snap columns at
/// every domain-vertex x; each column spans bottom(x) to top(x) with `ny`
/// linearly mapped rows.
pub fn build_boundary_fitted_quads(
    domain: &[Point2],
    nx: usize,
    ny: usize,
) -> Result<Mesh, Error> {
    if nx < 1 || ny < 1 || domain.len() < 3 {
        return Err(Error::MeshInvalid(format!(
            "invalid boundary-fitted grid request {nx}x{ny}"
        )));
    }
    let bb = Aabb::of_points(domain);
    let snap: Vec<f64> = domain
        .iter()
        .map(|p| p.x)
        .filter(|&x| x > bb.min.x && x < bb.max.x)
        .collect();
    let xs = axis_lines(bb.min.x, bb.max.x, nx, &snap)?;

    let profile = |x: f64| -> Result<(f64, f64), Error> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let n = domain.len();
        for i in 0..n {
            let a = domain[i];
            let b = domain[(i + 1) % n];
            if (a.x - b.x).abs() < (bb.max.x - bb.min.x) * 1e-14 {
                if (x - a.x).abs() < (bb.max.x - bb.min.x) * 1e-12 {
                    lo = lo.min(a.y.min(b.y));
                    hi = hi.max(a.y.max(b.y));
                }
                continue;
            }
            let t = (x - a.x) / (b.x - a.x);
            if (-1e-12..=1.0 + 1e-12).contains(&t) {
                let y = a.y + t * (b.y - a.y);
                lo = lo.min(y);
                hi = hi.max(y);
            }
        }
        if !(hi > lo) {
            return Err(Error::MeshInvalid(format!(
                "domain profile degenerate at x = {x}"
            )));
        }
        Ok((lo, hi))
    };

    let cols = xs.len();
    let mut vertices = Vec::with_capacity(cols * (ny + 1));
    for &x in &xs {
        let (lo, hi) = profile(x)?;
        for j in 0..=ny {
            vertices.push(Point2::new(x, lo + (hi - lo) * j as f64 / ny as f64));
        }
    }
    let vid = |i: usize, j: usize| i * (ny + 1) + j;
    let mut cells = Vec::with_capacity((cols - 1) * ny);
    for i in 0..cols - 1 {
        for j in 0..ny {
            cells.push(vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]);
        }
    }
    Mesh::new(vertices, cells, Vec::new(), Vec::new())
}

/// One tagged face on a fracture with its parameter interval along the
/// fracture segment.
#[derive(Clone, Copy, Debug)]
pub struct TaggedFace {
    pub face: usize,
    pub t0: f64,
    pub t1: f64,
}

/// Complete per-fracture tagging of a conforming mesh.
#[derive(Clone, Debug, Default)]
pub struct FractureFaceTagging {
    /// Per fracture, faces ordered by position along the fracture.
    pub by_fracture: Vec<Vec<TaggedFace>>,
}

impl FractureFaceTagging {
    pub fn covered_length(&self, fracture: usize, network: &FractureNetwork) -> f64 {
        let len = network.fractures[fracture].geometry.length();
        self.by_fracture[fracture]
            .iter()
            .map(|t| (t.t1 - t.t0) * len)
            .sum()
    }

    pub fn total_faces(&self) -> usize {
        self.by_fracture.iter().map(|v| v.len()).sum()
    }
}

/// Identifies the mesh faces lying on each fracture segment of a conforming
/// mesh. Fails listing the uncovered portions when the mesh does not conform.
pub fn tag_fracture_faces(mesh: &Mesh, network: &FractureNetwork) -> Result<FractureFaceTagging, Error> {
    let tol = mesh.tolerance();
    let mut by_fracture = Vec::with_capacity(network.fractures.len());
    for (fi, frac) in network.fractures.iter().enumerate() {
        let seg = frac.geometry;
        let len = seg.length();
        let tol_t = tol / len;
        let mut tagged: Vec<TaggedFace> = Vec::new();
        for (f, _face) in mesh.faces().iter().enumerate() {
            let fs = mesh.face_segment(f);
            let on = |p: Point2| -> Option<f64> {
                if seg.signed_distance(p).abs() > tol {
                    return None;
                }
                let t = seg.param_of(p);
                if t < -tol_t || t > 1.0 + tol_t {
                    return None;
                }
                Some(t.clamp(0.0, 1.0))
            };
            if let (Some(ta), Some(tb)) = (on(fs.a), on(fs.b)) {
                tagged.push(TaggedFace {
                    face: f,
                    t0: ta.min(tb),
                    t1: ta.max(tb),
                });
            }
        }
        tagged.sort_by(|a, b| a.t0.total_cmp(&b.t0));
        // coverage check
        let mut cursor = 0.0_f64;
        let mut gaps: Vec<(f64, f64)> = Vec::new();
        for t in &tagged {
            if t.t0 > cursor + tol_t {
                gaps.push((cursor, t.t0));
            }
            cursor = cursor.max(t.t1);
        }
        if cursor < 1.0 - tol_t {
            gaps.push((cursor, 1.0));
        }
        if !gaps.is_empty() {
            let desc: Vec<String> = gaps
                .iter()
                .map(|(a, b)| {
                    let pa = seg.point_at(*a);
                    let pb = seg.point_at(*b);
                    format!("({:.6},{:.6})-({:.6},{:.6})", pa.x, pa.y, pb.x, pb.y)
                })
                .collect();
            return Err(Error::NonConforming(format!(
                "fracture {fi} is not covered by mesh faces on {} portion(s): {}",
                gaps.len(),
                desc.join(", ")
            )));
        }
        by_fracture.push(tagged);
    }
    Ok(FractureFaceTagging { by_fracture })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::FractureSegment;
    use approx::assert_relative_eq;

    #[test]
    fn structured_2x2_counts() {
        let m = build_structured_quads(0.0, 0.0, 1.0, 1.0, 2, 2, &[], &[]).unwrap();
        assert_eq!(m.n_cells(), 4);
        assert_eq!(m.n_faces(), 12);
        assert_eq!(m.n_vertices(), 9);
    }

    #[test]
    fn structured_1x1_boundary() {
        let m = build_structured_quads(0.0, 0.0, 1.0, 1.0, 1, 1, &[], &[]).unwrap();
        assert_eq!(m.n_cells(), 1);
        assert_eq!(m.faces().iter().filter(|f| f.is_boundary()).count(), 4);
    }

    #[test]
    fn snap_lines_are_honored() {
        let m = build_structured_quads(
            0.0,
            0.0,
            1.0,
            1.0,
            10,
            10,
            &[0.5 - 5e-5, 0.5 + 5e-5],
            &[],
        )
        .unwrap();
        for target in [0.5 - 5e-5, 0.5 + 5e-5] {
            assert!(
                m.vertices().iter().any(|v| v.x == target),
                "missing snapped grid line at x={target}"
            );
        }
        // 13 x-lines (11 uniform + 2 snapped), 11 y-lines
        assert_eq!(m.n_cells(), 12 * 10);
    }

    #[test]
    fn snap_outside_domain_fails() {
        assert!(build_structured_quads(0.0, 0.0, 1.0, 1.0, 2, 2, &[1.5], &[]).is_err());
    }

    #[test]
    fn areas_sum_to_domain() {
        let m = build_structured_quads(0.0, 0.0, 3.0, 2.0, 7, 5, &[0.123456], &[1.9]).unwrap();
        assert_relative_eq!(m.total_area(), 6.0, max_relative = 1e-12);
    }

    #[test]
    fn face_normals_close_per_cell() {
        let m = build_structured_quads(0.0, 0.0, 1.0, 1.0, 3, 3, &[], &[]).unwrap();
        for c in 0..m.n_cells() {
            let mut sum = Vec2::new(0.0, 0.0);
            for &f in m.cell_face_ids(c) {
                let g = m.face_geometry(f);
                let sign = if m.face(f).left == c { 1.0 } else { -1.0 };
                sum = Vec2::new(sum.x + sign * g.area * g.normal.x, sum.y + sign * g.area * g.normal.y);
            }
            assert!(sum.norm() < 1e-13, "faces of cell {c} do not close: {sum:?}");
        }
    }

    #[test]
    fn normal_points_left_to_right() {
        let m = build_structured_quads(0.0, 0.0, 1.0, 1.0, 2, 1, &[], &[]).unwrap();
        let f = (0..m.n_faces())
            .find(|&f| !m.face(f).is_boundary())
            .unwrap();
        let face = m.face(f);
        let g = m.face_geometry(f);
        let lc = m.cell_centroid(face.left);
        let rc = m.cell_centroid(face.right.unwrap());
        let lr = lc.to(rc);
        assert!(g.normal.dot(lr) > 0.0);
        assert_relative_eq!(g.normal.norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn native_roundtrip_identical_connectivity() {
        let m = build_structured_quads(0.0, 0.0, 1.0, 1.0, 3, 2, &[0.41], &[]).unwrap();
        let mut buf = Vec::new();
        m.write_native(&mut buf).unwrap();
        let m2 = read_native_str(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(m.n_vertices(), m2.n_vertices());
        assert_eq!(m.n_cells(), m2.n_cells());
        assert_eq!(m.n_faces(), m2.n_faces());
        for c in 0..m.n_cells() {
            assert_eq!(m.cell_vertices(c), m2.cell_vertices(c));
        }
        // byte-identical reserialization
        let mut buf2 = Vec::new();
        m2.write_native(&mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn gmsh_single_triangle() {
        let text = "\
$MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
3
1 0 0 0
2 1 0 0
3 0 1 0
$EndNodes
$Elements
1
1 2 2 0 1 1 2 3
$EndElements
";
        let m = read_mesh_str(text).unwrap();
        assert_eq!(m.n_cells(), 1);
        assert_eq!(m.faces().iter().filter(|f| f.is_boundary()).count(), 3);
    }

    #[test]
    fn gmsh_interior_fracture_edge() {
        // two triangles sharing the diagonal, tagged as fracture 0 (physical 1)
        let text = "\
$MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
4
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
$EndNodes
$Elements
3
1 2 2 0 1 1 2 3
2 2 2 0 1 1 3 4
3 1 2 1 1 1 3
$EndElements
";
        let m = read_mesh_str(text).unwrap();
        assert_eq!(m.n_cells(), 2);
        assert_eq!(m.fracture_face_pairs().len(), 1);
        let (frac, face) = m.fracture_face_pairs()[0];
        assert_eq!(frac, 0);
        assert!(!m.face(face).is_boundary());
    }

    #[test]
    fn zero_area_cell_rejected() {
        let verts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
        ];
        assert!(Mesh::new(verts, vec![vec![0, 1, 2]], Vec::new(), Vec::new()).is_err());
    }

    #[test]
    fn mixed_triangle_quad_meshes_are_supported() {
        // one quad and two triangles sharing its right edge
        let verts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
            Point2::new(2.0, 0.5),
        ];
        let cells = vec![vec![0, 1, 2, 3], vec![1, 4, 2]];
        let m = Mesh::new(verts, cells, Vec::new(), Vec::new()).unwrap();
        assert_eq!(m.n_cells(), 2);
        assert_relative_eq!(m.total_area(), 1.5, max_relative = 1e-12);
    }

    #[test]
    fn boundary_fitted_quads_follow_the_profile() {
        // vertically-sided pentagon with a peaked top
        let domain = vec![
            Point2::new(0.0, 0.0),
            Point2::new(4.0, 0.0),
            Point2::new(4.0, 1.0),
            Point2::new(2.0, 2.0),
            Point2::new(0.0, 1.0),
        ];
        let m = build_boundary_fitted_quads(&domain, 4, 3).unwrap();
        assert_eq!(m.n_cells(), 4 * 3);
        let area = 4.0 * 1.0 + 0.5 * 4.0 * 1.0;
        assert_relative_eq!(m.total_area(), area, max_relative = 1e-12);
        // the peak vertex is a grid column
        assert!(m.vertices().iter().any(|v| v.x == 2.0 && v.y == 2.0));
    }

    fn horizontal_fracture(y: f64) -> FractureNetwork {
        FractureNetwork {
            fractures: vec![FractureSegment {
                geometry: Segment2::new(Point2::new(0.0, y), Point2::new(1.0, y)),
                aperture: 1e-4,
                k_n: 1e4,
                k_t: 1e4,
            }],
        }
    }

    #[test]
    fn tagging_on_conforming_mesh() {
        let m = build_structured_quads(0.0, 0.0, 1.0, 1.0, 2, 2, &[], &[]).unwrap();
        let net = horizontal_fracture(0.5);
        let tags = tag_fracture_faces(&m, &net).unwrap();
        assert_eq!(tags.by_fracture[0].len(), 2);
        assert_relative_eq!(tags.covered_length(0, &net), 1.0, max_relative = 1e-12);
        // faces ordered along the fracture
        assert!(tags.by_fracture[0][0].t0 < tags.by_fracture[0][1].t0);
    }

    #[test]
    fn tagging_empty_network() {
        let m = build_structured_quads(0.0, 0.0, 1.0, 1.0, 2, 2, &[], &[]).unwrap();
        let tags = tag_fracture_faces(&m, &FractureNetwork { fractures: vec![] }).unwrap();
        assert_eq!(tags.total_faces(), 0);
    }

    #[test]
    fn tagging_nonconforming_fails_with_gap() {
        let m = build_structured_quads(0.0, 0.0, 1.0, 1.0, 2, 2, &[], &[]).unwrap();
        let err = tag_fracture_faces(&m, &horizontal_fracture(0.3)).unwrap_err();
        match err {
            Error::NonConforming(msg) => assert!(msg.contains("fracture 0")),
            other => panic!("expected NonConforming, got {other}"),
        }
    }
}
