//! Conforming triangulations of a polygonal domain with embedded segment
//! constraints: Bowyer-Watson Delaunay insertion over boundary/constraint
//! samples and interior grid points, constraint recovery by edge flipping,
//! and exterior-triangle removal. This is the generator behind the shipped
//! benchmark grids; solvers only consume its `Mesh` output.

use std::collections::{HashMap, HashSet};

use crate::error::Error;
use crate::geometry::{
    distance_point_segment, point_in_simple_polygon, segment_intersection, Aabb, Point2, Segment2,
    SegmentIntersection,
};
use crate::mesh::Mesh;
use crate::scenario::FractureNetwork;

fn orient2d(a: Point2, b: Point2, c: Point2) -> f64 {
    a.to(b).cross(a.to(c))
}

fn incircle(a: Point2, b: Point2, c: Point2, p: Point2) -> f64 {
    let adx = a.x - p.x;
    let ady = a.y - p.y;
    let bdx = b.x - p.x;
    let bdy = b.y - p.y;
    let cdx = c.x - p.x;
    let cdy = c.y - p.y;
    let al = adx * adx + ady * ady;
    let bl = bdx * bdx + bdy * bdy;
    let cl = cdx * cdx + cdy * cdy;
    adx * (bdy * cl - cdy * bl) - ady * (bdx * cl - cdx * bl) + al * (bdx * cdy - cdx * bdy)
}

/// Tolerance-deduplicating point pool on a quantized hash grid.
struct PointPool {
    pts: Vec<Point2>,
    grid: HashMap<(i64, i64), Vec<u32>>,
    tol: f64,
}

impl PointPool {
    fn new(tol: f64) -> Self {
        PointPool {
            pts: Vec::new(),
            grid: HashMap::new(),
            tol,
        }
    }

    fn key(&self, p: Point2) -> (i64, i64) {
        ((p.x / self.tol / 4.0).floor() as i64, (p.y / self.tol / 4.0).floor() as i64)
    }

    fn insert(&mut self, p: Point2) -> u32 {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.grid.get(&(kx + dx, ky + dy)) {
                    for &id in ids {
                        if self.pts[id as usize].distance(p) <= self.tol {
                            return id;
                        }
                    }
                }
            }
        }
        let id = self.pts.len() as u32;
        self.pts.push(p);
        self.grid.entry((kx, ky)).or_default().push(id);
        id
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ConstraintKind {
    Boundary(u32),
    Fracture(usize),
}

struct Delaunay {
    pts: Vec<Point2>,
    tris: Vec<[u32; 3]>,
    alive: Vec<bool>,
    edge_map: HashMap<(u32, u32), u32>,
    last_tri: u32,
    eps: f64,
}

impl Delaunay {
    fn new(pts: Vec<Point2>, eps: f64) -> Self {
        // points 0, 1, 2 are the enclosing super-triangle
        let mut d = Delaunay {
            pts,
            tris: Vec::new(),
            alive: Vec::new(),
            edge_map: HashMap::new(),
            last_tri: 0,
            eps,
        };
        d.push_tri([0, 1, 2]);
        d
    }

    fn push_tri(&mut self, v: [u32; 3]) -> u32 {
        let id = self.tris.len() as u32;
        self.tris.push(v);
        self.alive.push(true);
        for e in 0..3 {
            self.edge_map.insert((v[e], v[(e + 1) % 3]), id);
        }
        id
    }

    fn kill_tri(&mut self, id: u32) {
        let v = self.tris[id as usize];
        self.alive[id as usize] = false;
        for e in 0..3 {
            if self.edge_map.get(&(v[e], v[(e + 1) % 3])) == Some(&id) {
                self.edge_map.remove(&(v[e], v[(e + 1) % 3]));
            }
        }
    }

    fn p(&self, i: u32) -> Point2 {
        self.pts[i as usize]
    }

    /// Walks from `last_tri` to a triangle containing (or touching) `p`.
    fn locate(&self, p: Point2) -> Result<u32, Error> {
        let mut cur = self.last_tri;
        if !self.alive[cur as usize] {
            cur = (0..self.tris.len() as u32)
                .rev()
                .find(|&t| self.alive[t as usize])
                .ok_or_else(|| Error::Geometry("triangulation has no triangles".into()))?;
        }
        let max_steps = 4 * self.tris.len() + 16;
        'walk: for _ in 0..max_steps {
            let v = self.tris[cur as usize];
            for e in 0..3 {
                let a = v[e];
                let b = v[(e + 1) % 3];
                if orient2d(self.p(a), self.p(b), p) < -self.eps {
                    match self.edge_map.get(&(b, a)) {
                        Some(&next) => {
                            cur = next;
                            continue 'walk;
                        }
                        None => break,
                    }
                }
            }
            return Ok(cur);
        }
        // fallback: linear scan
        for t in 0..self.tris.len() as u32 {
            if !self.alive[t as usize] {
                continue;
            }
            let v = self.tris[t as usize];
            if (0..3).all(|e| {
                orient2d(self.p(v[e]), self.p(v[(e + 1) % 3]), p) >= -self.eps
            }) {
                return Ok(t);
            }
        }
        Err(Error::Geometry(format!(
            "point ({}, {}) not located in the triangulation",
            p.x, p.y
        )))
    }

    /// Bowyer-Watson insertion of point index `pi`.
    fn insert(&mut self, pi: u32) -> Result<(), Error> {
        let p = self.p(pi);
        let seed = self.locate(p)?;

        // cavity: triangles whose circumcircle contains p
        let mut cavity: Vec<u32> = vec![seed];
        let mut in_cavity: HashSet<u32> = HashSet::from([seed]);
        let mut stack = vec![seed];
        while let Some(t) = stack.pop() {
            let v = self.tris[t as usize];
            for e in 0..3 {
                let a = v[e];
                let b = v[(e + 1) % 3];
                if let Some(&n) = self.edge_map.get(&(b, a)) {
                    if in_cavity.contains(&n) {
                        continue;
                    }
                    let w = self.tris[n as usize];
                    if incircle(self.p(w[0]), self.p(w[1]), self.p(w[2]), p) > self.eps * self.eps
                    {
                        in_cavity.insert(n);
                        cavity.push(n);
                        stack.push(n);
                    }
                }
            }
        }

        // boundary of the cavity: directed edges whose twin is outside
        let mut boundary: Vec<(u32, u32)> = Vec::new();
        for &t in &cavity {
            let v = self.tris[t as usize];
            for e in 0..3 {
                let a = v[e];
                let b = v[(e + 1) % 3];
                let twin = self.edge_map.get(&(b, a)).copied();
                if twin.is_none_or(|n| !in_cavity.contains(&n)) {
                    boundary.push((a, b));
                }
            }
        }
        for &t in &cavity {
            self.kill_tri(t);
        }
        let mut last = self.last_tri;
        for (a, b) in boundary {
            last = self.push_tri([a, b, pi]);
        }
        self.last_tri = last;
        Ok(())
    }

    fn has_edge(&self, a: u32, b: u32) -> bool {
        self.edge_map.contains_key(&(a, b)) || self.edge_map.contains_key(&(b, a))
    }

    fn third(&self, t: u32, a: u32, b: u32) -> u32 {
        let v = self.tris[t as usize];
        *v.iter().find(|&&x| x != a && x != b).unwrap()
    }

    /// Flips the edge (x, y); returns the new cross edge (c, d).
    fn flip(&mut self, x: u32, y: u32) -> Result<(u32, u32), Error> {
        let t1 = *self
            .edge_map
            .get(&(x, y))
            .ok_or_else(|| Error::Geometry("flip of a missing edge".into()))?;
        let t2 = *self
            .edge_map
            .get(&(y, x))
            .ok_or_else(|| Error::Geometry("flip of a hull edge".into()))?;
        let c = self.third(t1, x, y);
        let d = self.third(t2, x, y);
        self.kill_tri(t1);
        self.kill_tri(t2);
        // quad x -> d -> y -> c (CCW); new diagonal d-c
        self.push_tri([x, d, c]);
        let last = self.push_tri([d, y, c]);
        self.last_tri = last;
        Ok((c, d))
    }

    fn flippable(&self, x: u32, y: u32) -> bool {
        let (Some(&t1), Some(&t2)) = (self.edge_map.get(&(x, y)), self.edge_map.get(&(y, x)))
        else {
            return false;
        };
        let c = self.third(t1, x, y);
        let d = self.third(t2, x, y);
        orient2d(self.p(x), self.p(d), self.p(c)) > self.eps
            && orient2d(self.p(d), self.p(y), self.p(c)) > self.eps
    }

    /// Restores the constrained edge (a, b) by flipping crossing edges.
    fn recover_edge(&mut self, a: u32, b: u32, locked: &HashSet<(u32, u32)>) -> Result<(), Error> {
        if self.has_edge(a, b) {
            return Ok(());
        }
        let pa = self.p(a);
        let pb = self.p(b);
        let max_rounds = 64 * self.tris.len() + 1024;
        for _ in 0..max_rounds {
            if self.has_edge(a, b) {
                return Ok(());
            }
            let (x, y) = self.first_crossing(a, b)?;
            let norm = (x.min(y), x.max(y));
            if locked.contains(&norm) {
                return Err(Error::Geometry(format!(
                    "constraint ({}, {}) crosses an already-locked edge; the input segments intersect away from their recorded intersection points",
                    pa.x, pa.y
                )));
            }
            if self.flippable(x, y) {
                self.flip(x, y)?;
            } else {
                // walk one edge further along the segment and try there
                let mut flipped = false;
                let mut crossings = self.crossings(a, b)?;
                // try from the far end; some flip always exists for a valid PSLG
                while let Some((u, w)) = crossings.pop() {
                    let n = (u.min(w), u.max(w));
                    if !locked.contains(&n) && self.flippable(u, w) {
                        self.flip(u, w)?;
                        flipped = true;
                        break;
                    }
                }
                if !flipped {
                    return Err(Error::Geometry(format!(
                        "cannot recover constraint edge from ({}, {}) to ({}, {})",
                        pa.x, pa.y, pb.x, pb.y
                    )));
                }
            }
        }
        Err(Error::Geometry(format!(
            "constraint recovery did not terminate for edge ({}, {})-({}, {})",
            pa.x, pa.y, pb.x, pb.y
        )))
    }

    /// First edge crossed by the open segment a->b.
    fn first_crossing(&self, a: u32, b: u32) -> Result<(u32, u32), Error> {
        let pa = self.p(a);
        let pb = self.p(b);
        // circulate the triangles around a
        let mut seen = HashSet::new();
        let start = self
            .edge_map
            .iter()
            .find(|((u, _), _)| *u == a)
            .map(|((_, v), _)| *v)
            .ok_or_else(|| Error::Geometry("vertex has no incident edges".into()))?;
        let mut x = start;
        loop {
            if !seen.insert(x) {
                break;
            }
            if let Some(&t) = self.edge_map.get(&(a, x)) {
                let y = self.third(t, a, x);
                // triangle (a, x, y): opposite edge is (x, y)
                let ox = orient2d(pa, pb, self.p(x));
                let oy = orient2d(pa, pb, self.p(y));
                if ox > self.eps && oy < -self.eps {
                    // b strictly on the far side of (x, y)?
                    let cross_side = orient2d(self.p(x), self.p(y), pb)
                        * orient2d(self.p(x), self.p(y), pa);
                    if cross_side < 0.0 {
                        return Ok((x, y));
                    }
                }
                x = y;
            } else {
                break;
            }
        }
        Err(Error::Geometry(format!(
            "no crossing edge found from ({}, {}) towards ({}, {})",
            pa.x, pa.y, pb.x, pb.y
        )))
    }

    /// All edges crossed by the segment a->b, in order.
    fn crossings(&self, a: u32, b: u32) -> Result<Vec<(u32, u32)>, Error> {
        let pa = self.p(a);
        let pb = self.p(b);
        let mut out = Vec::new();
        let (mut x, mut y) = self.first_crossing(a, b)?;
        out.push((x, y));
        let cap = self.tris.len() + 16;
        for _ in 0..cap {
            let t = *self
                .edge_map
                .get(&(y, x))
                .ok_or_else(|| Error::Geometry("crossing walk left the triangulation".into()))?;
            let z = self.third(t, y, x);
            if z == b {
                return Ok(out);
            }
            let oz = orient2d(pa, pb, self.p(z));
            if oz > self.eps {
                x = z; // segment passes right of z: next edge (z, y)
                out.push((x, y));
            } else {
                y = z;
                out.push((x, y));
            }
        }
        Err(Error::Geometry("crossing walk did not reach the endpoint".into()))
    }
}

/// Builds a triangulation of `domain` whose edges conform to every fracture
/// segment, with triangle size about `target_h`. Fracture intersections,
/// junctions and endpoints become mesh vertices; fracture faces carry their
/// fracture ids, boundary faces their domain-edge tags.
pub fn conforming_triangulation(
    domain: &[Point2],
    network: &FractureNetwork,
    target_h: f64,
) -> Result<Mesh, Error> {
    if domain.len() < 3 {
        return Err(Error::Geometry("domain polygon needs >= 3 vertices".into()));
    }
    let bb = Aabb::of_points(domain);
    let diag = bb.diagonal();
    if !(target_h > 0.0) || target_h > diag {
        return Err(Error::Geometry(format!(
            "target size {target_h} is not in (0, domain diagonal]"
        )));
    }

    // scale to the unit box for uniform tolerances
    let scale = 1.0 / diag;
    let to_unit = |p: Point2| Point2::new((p.x - bb.min.x) * scale, (p.y - bb.min.y) * scale);
    let from_unit = |p: Point2| Point2::new(p.x / scale + bb.min.x, p.y / scale + bb.min.y);
    let h = target_h * scale;
    let tol = 1e-9;

    // constraint chains: domain edges then fractures, all in unit space
    let mut chains: Vec<(ConstraintKind, Segment2)> = Vec::new();
    for (i, w) in domain.windows(2).enumerate() {
        chains.push((
            ConstraintKind::Boundary(i as u32),
            Segment2::new(to_unit(w[0]), to_unit(w[1])),
        ));
    }
    chains.push((
        ConstraintKind::Boundary(domain.len() as u32 - 1),
        Segment2::new(to_unit(domain[domain.len() - 1]), to_unit(domain[0])),
    ));
    for f in &network.fractures {
        chains.push((
            ConstraintKind::Fracture(chains.len() - domain.len()),
            Segment2::new(to_unit(f.geometry.a), to_unit(f.geometry.b)),
        ));
    }
    // re-number fracture kinds by fracture index
    let n_boundary = domain.len();
    for (i, c) in chains.iter_mut().enumerate().skip(n_boundary) {
        c.0 = ConstraintKind::Fracture(i - n_boundary);
    }

    // split parameters: chain endpoints, mutual intersections, endpoint touches
    let mut splits: Vec<Vec<f64>> = vec![vec![0.0, 1.0]; chains.len()];
    for i in 0..chains.len() {
        for j in i + 1..chains.len() {
            let si = chains[i].1;
            let sj = chains[j].1;
            match segment_intersection(&si, &sj, tol) {
                SegmentIntersection::Point { t1, t2, .. } => {
                    splits[i].push(t1);
                    splits[j].push(t2);
                }
                SegmentIntersection::CollinearOverlap => {
                    let both_boundary = i < n_boundary && j < n_boundary;
                    if !both_boundary {
                        return Err(Error::Geometry(format!(
                            "constraints {i} and {j} overlap collinearly; cannot mesh"
                        )));
                    }
                }
                SegmentIntersection::None => {}
            }
        }
    }

    // sample points along the split chains
    let mut pool = PointPool::new(tol);
    // super-triangle vertices occupy indices 0..3
    pool.insert(Point2::new(-12.0, -12.0));
    pool.insert(Point2::new(24.0, -12.0));
    pool.insert(Point2::new(0.5, 24.0));

    let mut constraint_edges: Vec<(ConstraintKind, u32, u32, f64, f64)> = Vec::new();
    let mut all_sub_segments: Vec<Segment2> = Vec::new();
    for (ci, (kind, seg)) in chains.iter().enumerate() {
        let mut ts = splits[ci].clone();
        ts.sort_by(|a, b| a.total_cmp(b));
        ts.dedup_by(|a, b| (*a - *b).abs() * seg.length() <= tol);
        for w in ts.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            let sub_len = (t1 - t0) * seg.length();
            if sub_len <= tol {
                continue;
            }
            let k = (sub_len / h).round().max(1.0) as usize;
            let mut prev: Option<(u32, f64)> = None;
            for s in 0..=k {
                let t = t0 + (t1 - t0) * s as f64 / k as f64;
                let id = pool.insert(seg.point_at(t));
                if let Some((pid, pt)) = prev {
                    if pid != id {
                        constraint_edges.push((*kind, pid, id, pt, t));
                        all_sub_segments
                            .push(Segment2::new(pool.pts[pid as usize], pool.pts[id as usize]));
                    }
                }
                prev = Some((id, t));
            }
        }
    }

    // interior grid points, hex-staggered, away from constraints
    let unit_domain: Vec<Point2> = domain.iter().map(|p| to_unit(*p)).collect();
    let ub = Aabb::of_points(&unit_domain);
    let clearance = 0.5 * h;
    let mut y = ub.min.y + 0.5 * h;
    let mut row = 0usize;
    let mut interior: Vec<Point2> = Vec::new();
    while y < ub.max.y {
        let x0 = ub.min.x + if row.is_multiple_of(2) { 0.5 * h } else { h };
        let mut x = x0;
        while x < ub.max.x {
            let p = Point2::new(x, y);
            if point_in_simple_polygon(&unit_domain, p, 0.0)
                && all_sub_segments
                    .iter()
                    .all(|s| distance_point_segment(p, s) > clearance)
            {
                interior.push(p);
            }
            x += h;
        }
        y += 0.5 * 3.0_f64.sqrt() * h;
        row += 1;
    }
    for p in interior {
        pool.insert(p);
    }

    // Delaunay insertion in row-major order for walk locality
    let pts = pool.pts.clone();
    let mut order: Vec<u32> = (3..pts.len() as u32).collect();
    order.sort_by(|&a, &b| {
        let pa = pts[a as usize];
        let pb = pts[b as usize];
        let ka = ((pa.y / h) as i64, pa.x);
        let kb = ((pb.y / h) as i64, pb.x);
        ka.partial_cmp(&kb).unwrap()
    });
    let mut dt = Delaunay::new(pts, 1e-13);
    for pi in order {
        dt.insert(pi)?;
    }

    // constraint recovery
    let mut locked: HashSet<(u32, u32)> = HashSet::new();
    for &(_, a, b, _, _) in &constraint_edges {
        dt.recover_edge(a, b, &locked)?;
        locked.insert((a.min(b), a.max(b)));
    }

    // extract interior triangles
    let mut keep: Vec<[u32; 3]> = Vec::new();
    for t in 0..dt.tris.len() {
        if !dt.alive[t] {
            continue;
        }
        let v = dt.tris[t];
        if v.iter().any(|&i| i < 3) {
            continue;
        }
        let c = Point2::new(
            (dt.p(v[0]).x + dt.p(v[1]).x + dt.p(v[2]).x) / 3.0,
            (dt.p(v[0]).y + dt.p(v[1]).y + dt.p(v[2]).y) / 3.0,
        );
        if point_in_simple_polygon(&unit_domain, c, 0.0) {
            keep.push(v);
        }
    }

    // compact vertices and build the mesh
    let mut remap: HashMap<u32, usize> = HashMap::new();
    let mut vertices: Vec<Point2> = Vec::new();
    let mut cells: Vec<Vec<usize>> = Vec::with_capacity(keep.len());
    for v in &keep {
        let mut cell = Vec::with_capacity(3);
        for &i in v {
            let idx = *remap.entry(i).or_insert_with(|| {
                vertices.push(from_unit(dt.p(i)));
                vertices.len() - 1
            });
            cell.push(idx);
        }
        cells.push(cell);
    }
    let mut fracture_edges: Vec<(usize, [usize; 2])> = Vec::new();
    let mut tagged_edges: Vec<(u32, [usize; 2])> = Vec::new();
    for &(kind, a, b, _, _) in &constraint_edges {
        let (Some(&ia), Some(&ib)) = (remap.get(&a), remap.get(&b)) else {
            continue;
        };
        match kind {
            ConstraintKind::Fracture(f) => fracture_edges.push((f, [ia, ib])),
            ConstraintKind::Boundary(tag) => tagged_edges.push((tag, [ia, ib])),
        }
    }

    Mesh::new(vertices, cells, fracture_edges, tagged_edges)
}
