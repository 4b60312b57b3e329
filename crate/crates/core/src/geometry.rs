//! 2D computational-geometry kernels: segment/segment intersection, segment
//! clipping against convex polygons, convex overlaps and mean cell-to-line
//! distances.
//!
//! All predicates are tolerance-based. Callers derive the absolute tolerance
//! from the problem scale, typically `RELATIVE_TOLERANCE * bounding-box
//! diagonal`; benchmark coordinates carry at most 12 significant digits, so
//! this sits well below the data resolution.

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Relative geometric tolerance, to be scaled by the scenario bounding-box
/// diagonal for coincidence and degeneracy tests.
pub const RELATIVE_TOLERANCE: f64 = 1e-9;

/// A point in the plane. Serializes as `[x, y]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Point2 { x: v[0], y: v[1] }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

/// A displacement in the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn to(self, other: Point2) -> Vec2 {
        Vec2::new(other.x - self.x, other.y - self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        self.to(other).norm()
    }

    pub fn translate(self, v: Vec2) -> Point2 {
        Point2::new(self.x + v.x, self.y + v.y)
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }
}

impl Vec2 {
    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product (perp product).
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    /// Counter-clockwise perpendicular (left normal).
    pub fn perp_left(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    /// Clockwise perpendicular (right normal).
    pub fn perp_right(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }
}

/// A non-degenerate line segment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment2 {
    pub a: Point2,
    pub b: Point2,
}

impl Segment2 {
    pub fn new(a: Point2, b: Point2) -> Self {
        Segment2 { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn direction(&self) -> Vec2 {
        self.a.to(self.b)
    }

    pub fn unit_direction(&self) -> Vec2 {
        self.direction().normalized()
    }

    /// Unit normal, left of the a→b direction.
    pub fn unit_normal(&self) -> Vec2 {
        self.unit_direction().perp_left()
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        self.a.translate(self.direction().scale(t))
    }

    pub fn midpoint(&self) -> Point2 {
        self.a.midpoint(self.b)
    }

    /// Parameter of the orthogonal projection of `p` onto the supporting line.
    pub fn param_of(&self, p: Point2) -> f64 {
        let d = self.direction();
        self.a.to(p).dot(d) / d.dot(d)
    }

    /// Signed distance of `p` to the supporting line (positive on the left).
    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.unit_normal().dot(self.a.to(p))
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::Geometry("segment has non-finite coordinates".into()));
        }
        if self.length() <= 0.0 {
            return Err(Error::Geometry(format!(
                "degenerate segment at ({}, {})",
                self.a.x, self.a.y
            )));
        }
        Ok(())
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Point2,
    pub max: Point2,
}

impl Aabb {
    pub fn empty() -> Self {
        Aabb {
            min: Point2::new(f64::INFINITY, f64::INFINITY),
            max: Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn of_points<'a>(points: impl IntoIterator<Item = &'a Point2>) -> Self {
        let mut bb = Aabb::empty();
        for p in points {
            bb.expand(*p);
        }
        bb
    }

    pub fn expand(&mut self, p: Point2) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn merge(&mut self, other: &Aabb) {
        self.expand(other.min);
        self.expand(other.max);
    }

    pub fn diagonal(&self) -> f64 {
        self.min.distance(self.max)
    }

    pub fn intersects(&self, other: &Aabb) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// Convex polygon with counter-clockwise vertices and positive area.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl TryFrom<Vec<Point2>> for ConvexPolygon {
    type Error = Error;

    fn try_from(vertices: Vec<Point2>) -> Result<Self, Error> {
        ConvexPolygon::new(vertices)
    }
}

impl From<ConvexPolygon> for Vec<Point2> {
    fn from(p: ConvexPolygon) -> Self {
        p.vertices
    }
}

impl ConvexPolygon {
    /// Builds a polygon, checking vertex count, orientation and convexity.
    /// Convexity is tolerance-based: reflex corners beyond the numerical
    /// noise floor of the coordinates are rejected, collinear corners pass.
    pub fn new(vertices: Vec<Point2>) -> Result<Self, Error> {
        if vertices.len() < 3 {
            return Err(Error::Geometry(format!(
                "polygon needs >= 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::Geometry("polygon has non-finite vertex".into()));
        }
        let poly = ConvexPolygon { vertices };
        let area = poly.area();
        let scale = poly.bounding_box().diagonal();
        if area <= RELATIVE_TOLERANCE * scale * scale {
            return Err(Error::Geometry(format!(
                "polygon area {area:.3e} is non-positive or degenerate"
            )));
        }
        let tol = RELATIVE_TOLERANCE * scale * scale;
        let n = poly.vertices.len();
        for i in 0..n {
            let p0 = poly.vertices[i];
            let p1 = poly.vertices[(i + 1) % n];
            let p2 = poly.vertices[(i + 2) % n];
            if p0.to(p1).cross(p1.to(p2)) < -tol {
                return Err(Error::Geometry(format!(
                    "polygon is not convex/CCW at vertex ({}, {})",
                    p1.x, p1.y
                )));
            }
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }

    pub fn centroid(&self) -> Point2 {
        polygon_centroid(&self.vertices)
    }

    pub fn bounding_box(&self) -> Aabb {
        Aabb::of_points(&self.vertices)
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment2> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment2::new(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Point containment in the closed polygon, with `tol` slack outward.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let edge = a.to(b);
            // interior is left of each CCW edge
            if edge.cross(a.to(p)) < -tol * edge.norm() {
                return false;
            }
        }
        true
    }
}

/// Shoelace area of a simple polygon (positive for CCW).
pub fn polygon_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    let mut twice = 0.0;
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        twice += p.x * q.y - q.x * p.y;
    }
    0.5 * twice
}

/// Area centroid of a simple polygon.
pub fn polygon_centroid(vertices: &[Point2]) -> Point2 {
    let n = vertices.len();
    let mut a2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        let w = p.x * q.y - q.x * p.y;
        a2 += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    Point2::new(cx / (3.0 * a2), cy / (3.0 * a2))
}

/// Outcome of intersecting two segments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SegmentIntersection {
    /// Disjoint, or parallel without collinear overlap.
    None,
    /// Unique transversal intersection with parameters on each segment.
    Point { point: Point2, t1: f64, t2: f64 },
    /// Segments are collinear and overlap over a positive length; flagged,
    /// never silently resolved.
    CollinearOverlap,
}

/// Intersects two segments. `tol` is an absolute length tolerance: endpoints
/// within `tol` of the other segment still count as intersections, and
/// collinearity is decided by perpendicular distance below `tol`.
pub fn segment_intersection(s1: &Segment2, s2: &Segment2, tol: f64) -> SegmentIntersection {
    let r = s1.direction();
    let s = s2.direction();
    let qp = s1.a.to(s2.a);
    let denom = r.cross(s);
    let len1 = r.norm();
    let len2 = s.norm();

    if denom.abs() <= tol * (len1 + len2) {
        // parallel; collinear iff s2.a sits on line(s1) within tol
        if qp.cross(r).abs() <= tol * len1 {
            let t0 = qp.dot(r) / r.dot(r);
            let t1 = t0 + s.dot(r) / r.dot(r);
            let (lo, hi) = (t0.min(t1), t0.max(t1));
            let tol_t = tol / len1;
            if hi > tol_t && lo < 1.0 - tol_t && (hi.min(1.0) - lo.max(0.0)) * len1 > tol {
                return SegmentIntersection::CollinearOverlap;
            }
        }
        return SegmentIntersection::None;
    }

    let t1 = qp.cross(s) / denom;
    let t2 = qp.cross(r) / denom;
    let tol1 = tol / len1;
    let tol2 = tol / len2;
    if t1 < -tol1 || t1 > 1.0 + tol1 || t2 < -tol2 || t2 > 1.0 + tol2 {
        return SegmentIntersection::None;
    }
    let t1 = t1.clamp(0.0, 1.0);
    let t2 = t2.clamp(0.0, 1.0);
    SegmentIntersection::Point {
        point: s1.point_at(t1),
        t1,
        t2,
    }
}

/// Clips a segment to a closed convex polygon, returning the parameter range
/// `[t0, t1]` of the retained part, or `None` when the intersection is empty
/// or degenerate (shorter than `tol`).
pub fn clip_segment_params(seg: &Segment2, poly: &ConvexPolygon, tol: f64) -> Option<(f64, f64)> {
    let d = seg.direction();
    let seg_len = d.norm();
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    let verts = poly.vertices();
    let n = verts.len();
    for i in 0..n {
        let p = verts[i];
        let q = verts[(i + 1) % n];
        let inward = p.to(q).perp_left();
        let nn = inward.norm();
        let num = inward.dot(p.to(seg.a));
        let den = inward.dot(d);
        if den.abs() <= tol * nn {
            // segment parallel to this edge: must not lie outside
            if num < -tol * nn {
                return None;
            }
            continue;
        }
        let t = -num / den;
        if den > 0.0 {
            lo = lo.max(t);
        } else {
            hi = hi.min(t);
        }
        if lo > hi {
            return None;
        }
    }
    if (hi - lo) * seg_len <= tol {
        return None;
    }
    Some((lo, hi))
}

/// Clips a segment to a closed convex polygon.
pub fn clip_segment_to_polygon(seg: &Segment2, poly: &ConvexPolygon, tol: f64) -> Option<Segment2> {
    clip_segment_params(seg, poly, tol)
        .map(|(lo, hi)| Segment2::new(seg.point_at(lo), seg.point_at(hi)))
}

/// Clips a convex polygon against the half-plane `n·x <= c` (Sutherland-
/// Hodgman against a single plane). Returns `None` when the result is empty
/// or its area degenerate. `n` need not be normalized.
pub fn clip_polygon_halfplane(
    poly: &ConvexPolygon,
    n: Vec2,
    c: f64,
    tol: f64,
) -> Option<ConvexPolygon> {
    let nn = n.norm();
    let verts = poly.vertices();
    let m = verts.len();
    let mut out: Vec<Point2> = Vec::with_capacity(m + 2);
    for i in 0..m {
        let p = verts[i];
        let q = verts[(i + 1) % m];
        let dp = n.dot(Vec2::new(p.x, p.y)) - c;
        let dq = n.dot(Vec2::new(q.x, q.y)) - c;
        let p_in = dp <= tol * nn;
        let q_in = dq <= tol * nn;
        if p_in {
            out.push(p);
        }
        if p_in != q_in {
            let t = dp / (dp - dq);
            out.push(p.translate(p.to(q).scale(t)));
        }
    }
    // drop near-duplicate consecutive vertices introduced by edge crossings
    let mut dedup: Vec<Point2> = Vec::with_capacity(out.len());
    for p in out {
        if dedup.last().is_none_or(|last| last.distance(p) > tol) {
            dedup.push(p);
        }
    }
    if dedup.len() >= 2 && dedup[0].distance(dedup[dedup.len() - 1]) <= tol {
        dedup.pop();
    }
    if dedup.len() < 3 {
        return None;
    }
    if polygon_area(&dedup) <= tol * tol {
        return None;
    }
    Some(ConvexPolygon { vertices: dedup })
}

/// Intersection of two convex polygons, or `None` when empty/degenerate.
pub fn convex_overlap(a: &ConvexPolygon, b: &ConvexPolygon, tol: f64) -> Option<ConvexPolygon> {
    let mut cur = a.clone();
    let verts = b.vertices();
    let m = verts.len();
    for i in 0..m {
        let p = verts[i];
        let q = verts[(i + 1) % m];
        // keep the left of edge p→q: outward normal is perp_right
        let n = p.to(q).perp_right();
        let c = n.dot(Vec2::new(p.x, p.y));
        cur = clip_polygon_halfplane(&cur, n, c, tol)?;
    }
    Some(cur)
}

/// Distance from a point to a segment (not its supporting line).
pub fn distance_point_segment(p: Point2, seg: &Segment2) -> f64 {
    let d = seg.direction();
    let t = (seg.a.to(p).dot(d) / d.dot(d)).clamp(0.0, 1.0);
    p.distance(seg.point_at(t))
}

/// Point containment in a closed simple (possibly non-convex) polygon.
/// Points within `tol` of the boundary count as inside.
pub fn point_in_simple_polygon(verts: &[Point2], p: Point2, tol: f64) -> bool {
    let n = verts.len();
    for i in 0..n {
        let seg = Segment2::new(verts[i], verts[(i + 1) % n]);
        if distance_point_segment(p, &seg) <= tol {
            return true;
        }
    }
    // even-odd crossing test against a horizontal ray to +x
    let mut inside = false;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if x_cross > p.x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Mean distance from a convex cell to the supporting line of a segment:
/// `(1/|poly|) ∫_poly dist(x, line) dA`.
///
/// The distance function is linear on each side of the line, so splitting the
/// polygon by the line and evaluating `area * |signed distance at centroid|`
/// per piece integrates it exactly.
pub fn mean_distance_cell_to_segment(poly: &ConvexPolygon, seg: &Segment2) -> Result<f64, Error> {
    let area = poly.area();
    if !(area > 0.0) {
        return Err(Error::Geometry(format!(
            "degenerate polygon area {area:.3e} in mean-distance computation"
        )));
    }
    let n = seg.unit_normal();
    let c = n.dot(Vec2::new(seg.a.x, seg.a.y));
    // split tolerance only guards duplicate-vertex cleanup; keep it tiny
    let tol = RELATIVE_TOLERANCE * poly.bounding_box().diagonal();
    let mut integral = 0.0;
    if let Some(neg) = clip_polygon_halfplane(poly, n, c, tol) {
        let d = n.dot(Vec2::new(neg.centroid().x, neg.centroid().y)) - c;
        integral += neg.area() * d.abs();
    }
    if let Some(pos) = clip_polygon_halfplane(poly, Vec2::new(-n.x, -n.y), -c, tol) {
        let d = n.dot(Vec2::new(pos.centroid().x, pos.centroid().y)) - c;
        integral += pos.area() * d.abs();
    }
    Ok(integral / area)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TOL: f64 = 1e-12;

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn polygon_rejects_cw_and_degenerate() {
        let cw = ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0),
        ]);
        assert!(cw.is_err());
        let line = ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
        ]);
        assert!(line.is_err());
    }

    #[test]
    fn clip_spanning_segment() {
        let seg = Segment2::new(Point2::new(0.0, 0.5), Point2::new(1.0, 0.5));
        let clipped = clip_segment_to_polygon(&seg, &unit_square(), TOL).unwrap();
        assert_relative_eq!(clipped.length(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn clip_disjoint_segment() {
        let seg = Segment2::new(Point2::new(2.0, 2.0), Point2::new(3.0, 3.0));
        assert!(clip_segment_to_polygon(&seg, &unit_square(), TOL).is_none());
    }

    #[test]
    fn clip_half_overlapping_segment() {
        // brute-force parametric oracle: sample the segment finely and keep
        // the sub-range of points inside the polygon
        let seg = Segment2::new(Point2::new(-0.5, 0.5), Point2::new(0.5, 0.5));
        let poly = unit_square();
        let n = 200_001;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            if poly.contains(seg.point_at(t), 0.0) {
                lo = lo.min(t);
                hi = hi.max(t);
            }
        }
        let expect_len = (hi - lo) * seg.length();

        let clipped = clip_segment_to_polygon(&seg, &poly, TOL).unwrap();
        assert_relative_eq!(clipped.length(), expect_len, epsilon = 1e-5);
        assert_relative_eq!(clipped.length(), 0.5, max_relative = 1e-12);
        assert_relative_eq!(clipped.a.x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(clipped.b.x, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn clip_is_idempotent() {
        let seg = Segment2::new(Point2::new(-0.3, 0.1), Point2::new(1.4, 0.9));
        let poly = unit_square();
        let once = clip_segment_to_polygon(&seg, &poly, TOL).unwrap();
        let twice = clip_segment_to_polygon(&once, &poly, TOL).unwrap();
        assert!(once.a.distance(twice.a) <= 1e-12);
        assert!(once.b.distance(twice.b) <= 1e-12);
    }

    #[test]
    fn intersection_of_diagonals() {
        let s1 = Segment2::new(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0));
        let s2 = Segment2::new(Point2::new(0.0, 1.0), Point2::new(1.0, 0.0));
        match segment_intersection(&s1, &s2, TOL) {
            SegmentIntersection::Point { point, t1, t2 } => {
                assert_relative_eq!(point.x, 0.5, epsilon = 1e-14);
                assert_relative_eq!(point.y, 0.5, epsilon = 1e-14);
                assert_relative_eq!(t1, 0.5, epsilon = 1e-14);
                assert_relative_eq!(t2, 0.5, epsilon = 1e-14);
            }
            other => panic!("expected point intersection, got {other:?}"),
        }
    }

    #[test]
    fn intersection_parallel_disjoint() {
        let s1 = Segment2::new(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0));
        let s2 = Segment2::new(Point2::new(0.0, 1.0), Point2::new(1.0, 1.0));
        assert_eq!(segment_intersection(&s1, &s2, TOL), SegmentIntersection::None);
    }

    #[test]
    fn intersection_collinear_overlap_flagged() {
        let s1 = Segment2::new(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0));
        let s2 = Segment2::new(Point2::new(0.5, 0.0), Point2::new(2.0, 0.0));
        assert_eq!(
            segment_intersection(&s1, &s2, TOL),
            SegmentIntersection::CollinearOverlap
        );
        // collinear but disjoint stays None
        let s3 = Segment2::new(Point2::new(1.5, 0.0), Point2::new(2.0, 0.0));
        assert_eq!(segment_intersection(&s1, &s3, TOL), SegmentIntersection::None);
    }

    #[test]
    fn intersection_network_segments_match_sampling_oracle() {
        // fractures 1 and 2 of the complex ten-fracture network
        let f1 = Segment2::new(Point2::new(0.05, 0.4160), Point2::new(0.22, 0.0624));
        let f2 = Segment2::new(Point2::new(0.05, 0.2750), Point2::new(0.25, 0.1350));

        // dense parametric sampling oracle: closest approach between the two
        let n = 4001;
        let mut best = f64::INFINITY;
        for i in 0..n {
            let p = f1.point_at(i as f64 / (n - 1) as f64);
            for j in 0..n / 16 {
                let q = f2.point_at(j as f64 / (n / 16 - 1) as f64);
                best = best.min(p.distance(q));
            }
        }
        let oracle_says_intersecting = best < 1e-3;
        assert!(oracle_says_intersecting);

        match segment_intersection(&f1, &f2, TOL) {
            SegmentIntersection::Point { t1, t2, .. } => {
                assert!((0.0..=1.0).contains(&t1));
                assert!((0.0..=1.0).contains(&t2));
            }
            other => panic!("expected intersection, got {other:?}"),
        }
    }

    #[test]
    fn intersection_is_symmetric() {
        let s1 = Segment2::new(Point2::new(0.1, 0.2), Point2::new(0.9, 0.8));
        let s2 = Segment2::new(Point2::new(0.2, 0.9), Point2::new(0.8, 0.1));
        let a = segment_intersection(&s1, &s2, TOL);
        let b = segment_intersection(&s2, &s1, TOL);
        match (a, b) {
            (
                SegmentIntersection::Point { t1: a1, t2: a2, .. },
                SegmentIntersection::Point { t1: b1, t2: b2, .. },
            ) => {
                assert_relative_eq!(a1, b2, epsilon = 1e-14);
                assert_relative_eq!(a2, b1, epsilon = 1e-14);
            }
            other => panic!("expected symmetric points, got {other:?}"),
        }
    }

    #[test]
    fn mean_distance_vertical_bisector() {
        // analytic: ∫ |x-0.5| dA over the unit square = 0.25
        let seg = Segment2::new(Point2::new(0.5, 0.0), Point2::new(0.5, 1.0));
        let d = mean_distance_cell_to_segment(&unit_square(), &seg).unwrap();
        assert_relative_eq!(d, 0.25, max_relative = 1e-12);
    }

    #[test]
    fn mean_distance_edge_segment() {
        // analytic: ∫ x dA over the unit square = 0.5
        let seg = Segment2::new(Point2::new(0.0, 0.0), Point2::new(0.0, 1.0));
        let d = mean_distance_cell_to_segment(&unit_square(), &seg).unwrap();
        assert_relative_eq!(d, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn mean_distance_reflection_invariant() {
        // segment through the centroid: reflecting the cell across the line
        // must leave the mean distance unchanged
        let poly = ConvexPolygon::new(vec![
            Point2::new(0.1, 0.0),
            Point2::new(1.3, 0.2),
            Point2::new(1.1, 1.0),
            Point2::new(0.0, 0.8),
        ])
        .unwrap();
        let c = poly.centroid();
        let seg = Segment2::new(
            Point2::new(c.x - 0.5, c.y - 0.125),
            Point2::new(c.x + 0.5, c.y + 0.125),
        );
        let d0 = mean_distance_cell_to_segment(&poly, &seg).unwrap();

        // reflect the polygon across the segment's supporting line
        let n = seg.unit_normal();
        let reflected: Vec<Point2> = poly
            .vertices()
            .iter()
            .rev()
            .map(|p| {
                let s = seg.signed_distance(*p);
                p.translate(n.scale(-2.0 * s))
            })
            .collect();
        let rpoly = ConvexPolygon::new(reflected).unwrap();
        let d1 = mean_distance_cell_to_segment(&rpoly, &seg).unwrap();
        assert_relative_eq!(d0, d1, max_relative = 1e-10);
    }

    #[test]
    fn mean_distance_one_sided_cell_equals_centroid_distance() {
        let poly = ConvexPolygon::new(vec![
            Point2::new(2.0, 0.0),
            Point2::new(3.0, 0.0),
            Point2::new(3.0, 1.0),
            Point2::new(2.0, 1.0),
        ])
        .unwrap();
        let seg = Segment2::new(Point2::new(0.0, 0.0), Point2::new(0.0, 1.0));
        let d = mean_distance_cell_to_segment(&poly, &seg).unwrap();
        assert_relative_eq!(d, 2.5, max_relative = 1e-12);
    }

    #[test]
    fn mean_distance_similarity_transforms() {
        let poly = unit_square();
        let seg = Segment2::new(Point2::new(0.2, -1.0), Point2::new(0.7, 2.0));
        let d0 = mean_distance_cell_to_segment(&poly, &seg).unwrap();

        // translation
        let t = Vec2::new(3.5, -2.0);
        let tp = ConvexPolygon::new(poly.vertices().iter().map(|p| p.translate(t)).collect())
            .unwrap();
        let ts = Segment2::new(seg.a.translate(t), seg.b.translate(t));
        assert_relative_eq!(
            mean_distance_cell_to_segment(&tp, &ts).unwrap(),
            d0,
            max_relative = 1e-12
        );

        // rotation by 30 degrees
        let (s, c) = (30.0_f64.to_radians()).sin_cos();
        let rot = |p: Point2| Point2::new(c * p.x - s * p.y, s * p.x + c * p.y);
        let rp = ConvexPolygon::new(poly.vertices().iter().map(|p| rot(*p)).collect()).unwrap();
        let rs = Segment2::new(rot(seg.a), rot(seg.b));
        assert_relative_eq!(
            mean_distance_cell_to_segment(&rp, &rs).unwrap(),
            d0,
            max_relative = 1e-12
        );

        // uniform scaling scales linearly
        let k = 4.0;
        let sp = ConvexPolygon::new(
            poly.vertices()
                .iter()
                .map(|p| Point2::new(k * p.x, k * p.y))
                .collect(),
        )
        .unwrap();
        let ss = Segment2::new(
            Point2::new(k * seg.a.x, k * seg.a.y),
            Point2::new(k * seg.b.x, k * seg.b.y),
        );
        assert_relative_eq!(
            mean_distance_cell_to_segment(&sp, &ss).unwrap(),
            k * d0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn convex_overlap_of_shifted_squares() {
        let a = unit_square();
        let b = ConvexPolygon::new(vec![
            Point2::new(0.5, 0.5),
            Point2::new(1.5, 0.5),
            Point2::new(1.5, 1.5),
            Point2::new(0.5, 1.5),
        ])
        .unwrap();
        let o = convex_overlap(&a, &b, TOL).unwrap();
        assert_relative_eq!(o.area(), 0.25, max_relative = 1e-12);
        let c = ConvexPolygon::new(vec![
            Point2::new(2.0, 2.0),
            Point2::new(3.0, 2.0),
            Point2::new(3.0, 3.0),
        ])
        .unwrap();
        assert!(convex_overlap(&a, &c, TOL).is_none());
    }
}
