//! Non-conforming embedded DFM: fracture meshes are generated on top of an
//! independent background grid, with exactly one fracture cell per cut rock
//! cell per fracture. Matrix-fracture exchange uses
//! `T_fm = A (n_f^T K n_f) / d_fm` with the volume-averaged cell-to-line
//! distance, fracture-fracture crossings use half transmissibilities
//! `T_i = s k_i eps_i / d_is` combined harmonically, and along-fracture
//! couplings are plain TPFA between fragment centroids.
//!
//! Pressure stays continuous across fractures: the scheme has no mechanism
//! to decouple the two sides of a cut cell, which is its documented failure
//! mode for blocking fractures.

use crate::discrete::{harmonic, DiscreteSolution, FractureElement, TwoPointSystem};
use crate::error::Error;
use crate::geometry::{
    clip_segment_params, distance_point_segment, mean_distance_cell_to_segment,
    segment_intersection, Point2, SegmentIntersection,
};
use crate::linalg::DofEntity;
use crate::mesh::Mesh;
use crate::scenario::{BcKind, FractureNetwork, Scenario};

/// Fragments shorter than this fraction of the domain diagonal are merged
/// into their along-fracture neighbor to avoid near-singular couplings.
pub const FRAGMENT_MERGE_RELATIVE: f64 = 1e-6;

/// One fracture cell: the piece of a fracture inside one background cell.
#[derive(Clone, Copy, Debug)]
pub struct EmbeddedFractureCell {
    pub fracture: usize,
    pub host_cell: usize,
    /// Parameter interval along the owning fracture.
    pub t0: f64,
    pub t1: f64,
    pub length: f64,
}

/// A located fracture-fracture intersection and its incident fragments.
#[derive(Clone, Copy, Debug)]
pub struct IntersectionRecord {
    pub point: Point2,
    pub fractures: [usize; 2],
    /// Indices into the fragment list, one per fracture.
    pub fragments: [usize; 2],
    /// Parameter of the intersection along each fracture.
    pub params: [f64; 2],
}

/// Result of meshing the fracture network on top of a background grid.
#[derive(Clone, Debug, Default)]
pub struct Embedding {
    pub fragments: Vec<EmbeddedFractureCell>,
    /// Fragment indices per fracture, ordered along the fracture.
    pub by_fracture: Vec<Vec<usize>>,
    pub intersections: Vec<IntersectionRecord>,
    /// Sub-tolerance fragments merged into neighbors.
    pub merged: usize,
}

/// Meshes every fracture on top of the background grid and locates all
/// pairwise fracture intersections. Fractures running along cell edges are
/// rejected: the exchange formulas assume transversal cuts.
pub fn embed_network(mesh: &Mesh, network: &FractureNetwork) -> Result<Embedding, Error> {
    let tol = mesh.tolerance();
    let merge_len = FRAGMENT_MERGE_RELATIVE * mesh.bounding_box().diagonal();
    let mut embedding = Embedding::default();

    for (fi, frac) in network.fractures.iter().enumerate() {
        let seg = frac.geometry;
        let len = seg.length();
        let tol_t = tol / len;
        let seg_bb = crate::geometry::Aabb::of_points(&[seg.a, seg.b]);

        let mut pieces: Vec<(f64, f64, usize)> = Vec::new();
        for c in 0..mesh.n_cells() {
            let poly = mesh.cell_polygon(c);
            let mut bb = poly.bounding_box();
            bb.min = Point2::new(bb.min.x - tol, bb.min.y - tol);
            bb.max = Point2::new(bb.max.x + tol, bb.max.y + tol);
            if !bb.intersects(&seg_bb) {
                continue;
            }
            if let Some((t0, t1)) = clip_segment_params(&seg, &poly, tol) {
                pieces.push((t0, t1, c));
            }
        }
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));

        // a fracture collinear with cell edges is claimed by the cells on
        // both sides, which shows up as overlapping parameter intervals
        let mut covered = 0.0;
        for w in pieces.windows(2) {
            if w[1].0 < w[0].1 - 10.0 * tol_t {
                return Err(Error::Embedding(format!(
                    "fracture {fi} runs along background-cell edges (overlapping fragments over t in [{:.6}, {:.6}]); EDFM needs transversal cuts",
                    w[1].0, w[0].1
                )));
            }
        }
        for &(t0, t1, _) in &pieces {
            covered += t1 - t0;
        }
        if (covered - 1.0).abs() > 1e-9 {
            return Err(Error::Embedding(format!(
                "fracture {fi} fragments cover parameter length {covered:.12}, expected 1; background mesh does not cover the fracture"
            )));
        }

        // merge sub-tolerance fragments into their neighbor
        let mut merged: Vec<(f64, f64, usize)> = Vec::new();
        for piece in pieces {
            let plen = (piece.1 - piece.0) * len;
            match merged.last_mut() {
                Some(last) if plen <= merge_len => {
                    last.1 = piece.1;
                    embedding.merged += 1;
                }
                _ => merged.push(piece),
            }
        }
        // a leading short fragment merges forward
        if merged.len() >= 2 && (merged[0].1 - merged[0].0) * len <= merge_len {
            let first = merged.remove(0);
            merged[0].0 = first.0;
            embedding.merged += 1;
        }

        let mut order = Vec::with_capacity(merged.len());
        for (t0, t1, c) in merged {
            order.push(embedding.fragments.len());
            embedding.fragments.push(EmbeddedFractureCell {
                fracture: fi,
                host_cell: c,
                t0,
                t1,
                length: (t1 - t0) * len,
            });
        }
        embedding.by_fracture.push(order);
    }

    // pairwise intersections (green dots of the embedded grid picture)
    for i in 0..network.fractures.len() {
        for j in i + 1..network.fractures.len() {
            let si = network.fractures[i].geometry;
            let sj = network.fractures[j].geometry;
            match segment_intersection(&si, &sj, tol) {
                SegmentIntersection::None => {}
                SegmentIntersection::CollinearOverlap => {
                    return Err(Error::Embedding(format!(
                        "fractures {i} and {j} overlap collinearly; not representable by point intersections"
                    )));
                }
                SegmentIntersection::Point { point, t1, t2 } => {
                    let fa = fragment_containing(&embedding, i, t1).ok_or_else(|| {
                        Error::Embedding(format!(
                            "no fragment of fracture {i} contains intersection parameter {t1}"
                        ))
                    })?;
                    let fb = fragment_containing(&embedding, j, t2).ok_or_else(|| {
                        Error::Embedding(format!(
                            "no fragment of fracture {j} contains intersection parameter {t2}"
                        ))
                    })?;
                    embedding.intersections.push(IntersectionRecord {
                        point,
                        fractures: [i, j],
                        fragments: [fa, fb],
                        params: [t1, t2],
                    });
                }
            }
        }
    }
    Ok(embedding)
}

fn fragment_containing(embedding: &Embedding, fracture: usize, t: f64) -> Option<usize> {
    embedding.by_fracture[fracture]
        .iter()
        .copied()
        .find(|&k| {
            let f = &embedding.fragments[k];
            t >= f.t0 - 1e-12 && t <= f.t1 + 1e-12
        })
        .or_else(|| {
            // clamp to the nearest fragment end for endpoint touches
            embedding.by_fracture[fracture].iter().copied().min_by(|&a, &b| {
                let fa = &embedding.fragments[a];
                let fb = &embedding.fragments[b];
                let da = (t - fa.t0).abs().min((t - fa.t1).abs());
                let db = (t - fb.t0).abs().min((t - fb.t1).abs());
                da.total_cmp(&db)
            })
        })
}

/// Matrix-fracture transmissibility `T_fm = A (n_f^T K n_f) / d_fm` with
/// `A` the fragment length (unit depth) and `d_fm` the mean distance between
/// the host cell and the fragment's supporting line.
pub fn matrix_fracture_transmissibility(
    mesh: &Mesh,
    scenario: &Scenario,
    frag: &EmbeddedFractureCell,
) -> Result<f64, Error> {
    let poly = mesh.cell_polygon(frag.host_cell);
    let frac = &scenario.fractures.fractures[frag.fracture];
    let seg = frac.geometry;
    let piece = crate::geometry::Segment2::new(seg.point_at(frag.t0), seg.point_at(frag.t1));
    let d_fm = mean_distance_cell_to_segment(&poly, &piece)?;
    let tol = mesh.tolerance();
    if d_fm <= tol {
        return Err(Error::Embedding(format!(
            "mean cell-fragment distance {d_fm:.3e} below tolerance for fracture {} in cell {}",
            frag.fracture, frag.host_cell
        )));
    }
    let k = scenario.permeability_at(mesh.cell_centroid(frag.host_cell));
    let n = seg.unit_normal();
    let nkn = n.x * (k[0][0] * n.x + k[0][1] * n.y) + n.y * (k[1][0] * n.x + k[1][1] * n.y);
    Ok(frag.length * nkn / d_fm)
}

/// Half transmissibility of a fragment towards an intersection at parameter
/// `t_int` of its fracture: `T_i = s k_i eps_i / d_is` with `s = 1` (the
/// point intersection extruded through the unit depth) and `d_is` the mean
/// arc distance from the fragment to the intersection.
pub fn intersection_half_transmissibility(
    frag: &EmbeddedFractureCell,
    fracture_length: f64,
    k_t: f64,
    aperture: f64,
    t_int: f64,
) -> Result<f64, Error> {
    let l = frag.length;
    let u = ((t_int - frag.t0).max(0.0) * fracture_length).min(l);
    // mean of |x - u| over [0, l]
    let d_is = (u * u + (l - u) * (l - u)) / (2.0 * l);
    if !(d_is > 0.0) {
        return Err(Error::Embedding(format!(
            "zero mean distance to intersection on fracture {}",
            frag.fracture
        )));
    }
    Ok(k_t * aperture / d_is)
}

/// Assembles and solves the EDFM system on a background grid.
pub fn solve(scenario: &Scenario, mesh: &Mesh) -> Result<DiscreteSolution, Error> {
    scenario.validate()?;
    let embedding = embed_network(mesh, &scenario.fractures)?;
    solve_embedded(scenario, mesh, &embedding)
}

pub fn solve_embedded(
    scenario: &Scenario,
    mesh: &Mesh,
    embedding: &Embedding,
) -> Result<DiscreteSolution, Error> {
    let n_cells = mesh.n_cells();
    let mut entities: Vec<DofEntity> = (0..n_cells).map(DofEntity::MatrixCell).collect();
    for (fi, frags) in embedding.by_fracture.iter().enumerate() {
        for (ei, _)  in frags.iter().enumerate() {
            entities.push(DofEntity::FractureCell {
                fracture: fi,
                element: ei,
            });
        }
    }
    // dof of fragment k
    let mut frag_dof = vec![0usize; embedding.fragments.len()];
    {
        let mut next = n_cells;
        for frags in &embedding.by_fracture {
            for &k in frags {
                frag_dof[k] = next;
                next += 1;
            }
        }
    }

    let mut system = TwoPointSystem::new(entities);
    for c in 0..n_cells {
        system.volumes[c] = mesh.cell_area(c);
        system.loads[c] += scenario.source * mesh.cell_area(c);
    }

    // background matrix-matrix TPFA and outer boundary conditions
    assemble_background_tpfa(scenario, mesh, &mut system, |c| {
        scenario.permeability_at(mesh.cell_centroid(c))
    })?;

    let mut fracture_elements = Vec::with_capacity(embedding.fragments.len());
    let tol = mesh.tolerance();

    for (fi, frags) in embedding.by_fracture.iter().enumerate() {
        let frac = &scenario.fractures.fractures[fi];
        let seg = frac.geometry;
        let len = seg.length();
        for (ei, &k) in frags.iter().enumerate() {
            let frag = &embedding.fragments[k];
            let dof = frag_dof[k];
            system.volumes[dof] = frag.length * frac.aperture;
            system.loads[dof] += scenario.source * frag.length * frac.aperture;

            // matrix-fracture exchange
            let t_fm = matrix_fracture_transmissibility(mesh, scenario, frag)?;
            system.add_connection(frag.host_cell, dof, t_fm);

            // along-fracture TPFA to the previous fragment
            if ei > 0 {
                let prev = &embedding.fragments[frags[ei - 1]];
                let t_shared = 0.5 * (prev.t1 + frag.t0);
                let d_prev = (t_shared - 0.5 * (prev.t0 + prev.t1)).abs() * len;
                let d_next = (0.5 * (frag.t0 + frag.t1) - t_shared).abs() * len;
                let a_prev =
                    crate::ccdfm::fracture_tangential_half_transmissibility(frac.aperture, frac.k_t, d_prev);
                let a_next =
                    crate::ccdfm::fracture_tangential_half_transmissibility(frac.aperture, frac.k_t, d_next);
                system.add_connection(frag_dof[frags[ei - 1]], dof, harmonic(a_prev, a_next));
            }

            fracture_elements.push(FractureElement {
                fracture: fi,
                segment: crate::geometry::Segment2::new(seg.point_at(frag.t0), seg.point_at(frag.t1)),
                t0: frag.t0,
                t1: frag.t1,
                aperture: frac.aperture,
                pressure: f64::NAN,
                dof,
            });
        }

        // fracture ends touching the domain boundary feel the condition
        // directly through a half-cell connection
        for (end_t, &k) in [(0.0, &frags[0]), (1.0, frags.last().unwrap())] {
            let frag = &embedding.fragments[k];
            let p = seg.point_at(end_t);
            if let Some(tag) = (0..scenario.n_domain_edges() as u32)
                .find(|&tag| distance_point_segment(p, &scenario.domain_edge(tag)) <= tol)
            {
                let bc = scenario.bc_for_tag(tag)?;
                match bc.kind {
                    BcKind::Dirichlet => {
                        let alpha = crate::ccdfm::fracture_tangential_half_transmissibility(
                            frac.aperture, frac.k_t, frag.length / 2.0,
                        );
                        system.add_dirichlet(frag_dof[k], alpha, bc.value_at(p), p);
                    }
                    BcKind::Neumann => {
                        system.loads[frag_dof[k]] -= bc.value_at(p) * frac.aperture;
                    }
                }
            }
        }
    }

    // fracture-fracture crossings: harmonic average of the two halves
    for rec in &embedding.intersections {
        let mut halves = [0.0; 2];
        for (s, half) in halves.iter_mut().enumerate() {
            let frac = &scenario.fractures.fractures[rec.fractures[s]];
            let frag = &embedding.fragments[rec.fragments[s]];
            *half = intersection_half_transmissibility(
                frag,
                frac.geometry.length(),
                frac.k_t,
                frac.aperture,
                rec.params[s],
            )?;
        }
        system.add_connection(
            frag_dof[rec.fragments[0]],
            frag_dof[rec.fragments[1]],
            harmonic(halves[0], halves[1]),
        );
    }

    DiscreteSolution::solve(system, n_cells, fracture_elements)
}

/// Plain matrix-matrix TPFA over all interior faces plus outer boundary
/// conditions, with a per-cell permeability lookup. Shared by the embedded
/// and the equi-dimensional reference solvers.
pub(crate) fn assemble_background_tpfa(
    scenario: &Scenario,
    mesh: &Mesh,
    system: &mut TwoPointSystem,
    k_of_cell: impl Fn(usize) -> [[f64; 2]; 2],
) -> Result<(), Error> {
    use crate::ccdfm::{half_transmissibility, matrix_matrix_transmissibility};
    for f in 0..mesh.n_faces() {
        let face = mesh.face(f);
        let geom = mesh.face_geometry(f);
        let k_left = k_of_cell(face.left);
        if let Some(right) = face.right {
            let alpha_l = half_transmissibility(geom.area, geom.normal, geom.d_left, k_left);
            let alpha_r = half_transmissibility(
                geom.area,
                geom.normal.scale(-1.0),
                geom.d_right.unwrap(),
                k_of_cell(right),
            );
            if !(alpha_l > 0.0) || !(alpha_r > 0.0) {
                return Err(Error::Assembly(format!(
                    "non-positive half-transmissibility at face {f} (left {alpha_l:.3e}, right {alpha_r:.3e})"
                )));
            }
            system.add_connection(face.left, right, matrix_matrix_transmissibility(alpha_l, alpha_r));
        } else {
            let seg = mesh.face_segment(f);
            let bc = scenario.bc_for_face(&seg, face.boundary_tag)?;
            match bc.kind {
                BcKind::Dirichlet => {
                    let alpha = half_transmissibility(geom.area, geom.normal, geom.d_left, k_left);
                    if !(alpha > 0.0) {
                        return Err(Error::Assembly(format!(
                            "non-positive boundary half-transmissibility at face {f}"
                        )));
                    }
                    system.add_dirichlet(face.left, alpha, bc.value_at(geom.centroid), geom.centroid);
                }
                BcKind::Neumann => {
                    system.loads[face.left] -= bc.value_at(geom.centroid) * geom.area;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Segment2;
    use crate::mesh::build_structured_quads;
    use crate::scenario::{
        BoundaryCondition, FieldKind, FractureSegment, Region, Scenario,
    };
    use approx::assert_relative_eq;

    fn scenario_with(fractures: Vec<FractureSegment>) -> Scenario {
        let domain = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        Scenario {
            name: "edfm-test".into(),
            regions: vec![Region {
                polygon: domain.clone(),
                k: [[1.0, 0.0], [0.0, 1.0]],
            }],
            fractures: FractureNetwork { fractures },
            bcs: vec![
                BoundaryCondition::dirichlet(0, 0.0),
                BoundaryCondition::neumann(1, 0.0),
                BoundaryCondition::dirichlet(2, 1.0),
                BoundaryCondition::neumann(3, 0.0),
            ],
            field: FieldKind::Pressure,
            source: 0.0,
            domain,
        }
    }

    fn frac(ax: f64, ay: f64, bx: f64, by: f64, k: f64) -> FractureSegment {
        FractureSegment {
            geometry: Segment2::new(Point2::new(ax, ay), Point2::new(bx, by)),
            aperture: 1e-4,
            k_n: k,
            k_t: k,
        }
    }

    #[test]
    fn fracture_on_grid_line_rejected() {
        let mesh = build_structured_quads(0.0, 0.0, 1.0, 1.0, 2, 2, &[], &[]).unwrap();
        let net = FractureNetwork {
            fractures: vec![frac(0.0, 0.5, 1.0, 0.5, 1e4)],
        };
        let err = embed_network(&mesh, &net).unwrap_err();
        assert!(matches!(err, Error::Embedding(_)), "{err}");
    }

    #[test]
    fn two_fragments_of_half_length() {
        let mesh = build_structured_quads(0.0, 0.0, 1.0, 1.0, 2, 2, &[], &[]).unwrap();
        let net = FractureNetwork {
            fractures: vec![frac(0.0, 0.3, 1.0, 0.3, 1e4)],
        };
        let emb = embed_network(&mesh, &net).unwrap();
        assert_eq!(emb.fragments.len(), 2);
        for f in &emb.fragments {
            assert_relative_eq!(f.length, 0.5, max_relative = 1e-12);
        }
        // completeness
        let total: f64 = emb.fragments.iter().map(|f| f.length).sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn sliver_fragments_are_merged() {
        // the fracture barely pokes into the left cells: the 1e-8-long
        // fragment merges into its neighbor
        let mesh = build_structured_quads(0.0, 0.0, 1.0, 1.0, 2, 2, &[], &[]).unwrap();
        let net = FractureNetwork {
            fractures: vec![frac(0.5 - 1e-8, 0.3, 0.9, 0.3, 1e4)],
        };
        let emb = embed_network(&mesh, &net).unwrap();
        assert_eq!(emb.fragments.len(), 1);
        assert_eq!(emb.merged, 1);
        assert_relative_eq!(emb.fragments[0].length, 0.4 + 1e-8, max_relative = 1e-9);
    }

    #[test]
    fn matrix_fracture_transmissibility_vertical_bisector() {
        // full vertical bisector fragment in a unit cell: A = 1, d = 0.25
        let mesh = build_structured_quads(0.0, 0.0, 1.0, 1.0, 1, 1, &[], &[]).unwrap();
        let scenario = scenario_with(vec![frac(0.5, 0.0, 0.5, 1.0, 1e4)]);
        let frag = EmbeddedFractureCell {
            fracture: 0,
            host_cell: 0,
            t0: 0.0,
            t1: 1.0,
            length: 1.0,
        };
        let t = matrix_fracture_transmissibility(&mesh, &scenario, &frag).unwrap();
        assert_relative_eq!(t, 4.0, max_relative = 1e-12);

        // linearity in K: scale the region permeability
        let mut s2 = scenario.clone();
        s2.regions[0].k = [[3.0, 0.0], [0.0, 3.0]];
        let t2 = matrix_fracture_transmissibility(&mesh, &s2, &frag).unwrap();
        assert_relative_eq!(t2, 3.0 * t, max_relative = 1e-12);

        // half the fragment length halves T
        let half = EmbeddedFractureCell {
            t1: 0.5,
            length: 0.5,
            ..frag
        };
        let th = matrix_fracture_transmissibility(&mesh, &scenario, &half).unwrap();
        assert_relative_eq!(th, 0.5 * t, max_relative = 1e-2);
    }

    #[test]
    fn intersection_half_transmissibility_midpoint() {
        let frag = EmbeddedFractureCell {
            fracture: 0,
            host_cell: 0,
            t0: 0.0,
            t1: 1.0,
            length: 1.0,
        };
        // intersection at the midpoint of a unit fragment: d_is = 1/4
        let t = intersection_half_transmissibility(&frag, 1.0, 1e4, 1e-4, 0.5).unwrap();
        assert_relative_eq!(t, 4.0, max_relative = 1e-12);
        // two identical incident fragments couple with T_i / 2
        assert_relative_eq!(harmonic(t, t), t / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn complex_network_fragment_count_on_37x37() {
        // ten-fracture network (total length ~3.9) on the 37x37 background
        // cuts about two hundred cells
        let scenario = crate::scenario::builtin_benchmark(
            crate::scenario::BenchmarkId::B3a,
            None,
        )
        .unwrap();
        let mesh = build_structured_quads(0.0, 0.0, 1.0, 1.0, 37, 37, &[], &[]).unwrap();
        let emb = embed_network(&mesh, &scenario.fractures).unwrap();
        let count = emb.fragments.len();
        assert!(
            (180..=230).contains(&count),
            "fragment count {count} far from the expected ~200"
        );
        // f1xf2, f4xf10, f5xf6, f5xf7, f5xf8, f8xf10
        assert_eq!(emb.intersections.len(), 6);
    }

    #[test]
    fn patch_test_linear_field() {
        let mesh = build_structured_quads(0.0, 0.0, 1.0, 1.0, 5, 5, &[], &[]).unwrap();
        let mut scenario = scenario_with(vec![]);
        scenario.bcs = (0..4)
            .map(|tag| BoundaryCondition::dirichlet_linear(tag, 2.0, -1.0, 0.25))
            .collect();
        let sol = solve(&scenario, &mesh).unwrap();
        for c in 0..mesh.n_cells() {
            let p = mesh.cell_centroid(c);
            assert_relative_eq!(
                sol.matrix_pressure[c],
                2.0 * p.x - 1.0 * p.y + 0.25,
                max_relative = 1e-12,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn crossing_fractures_solve_and_conserve() {
        let mesh = build_structured_quads(0.0, 0.0, 1.0, 1.0, 7, 7, &[], &[]).unwrap();
        let scenario = scenario_with(vec![
            frac(0.1, 0.52, 0.9, 0.48, 1e4),
            frac(0.48, 0.1, 0.55, 0.9, 1e4),
        ]);
        let emb = embed_network(&mesh, &scenario.fractures).unwrap();
        assert_eq!(emb.intersections.len(), 1);
        let sol = solve_embedded(&scenario, &mesh, &emb).unwrap();
        let rep = sol.conservation();
        assert!(rep.relative_residual <= 1e-10, "{rep:?}");
        assert!(rep.global_imbalance <= 1e-10, "{rep:?}");
        // conductive nearly-vertical fracture still leaves the field monotone
        let (lo, hi) = sol.pressure_range();
        assert!(lo >= -1e-10 && hi <= 1.0 + 1e-10);
    }

    #[test]
    fn blocking_fracture_cannot_block() {
        // the documented failure mode: a continuous-pressure scheme cannot
        // produce a jump across a blocking fracture
        let mesh = build_structured_quads(0.0, 0.0, 1.0, 1.0, 9, 9, &[], &[]).unwrap();
        let blocked = scenario_with(vec![frac(0.0, 0.52, 1.0, 0.52, 1e-4)]);
        let sol = solve(&blocked, &mesh).unwrap();
        let below = mesh.cell_containing(Point2::new(0.5, 0.52 - 0.1)).unwrap();
        let above = mesh.cell_containing(Point2::new(0.5, 0.52 + 0.1)).unwrap();
        let jump = (sol.matrix_pressure[above] - sol.matrix_pressure[below]).abs();
        // the vertical gradient is ~1; the jump across the fracture stays a
        // fraction of the local cell-to-cell difference
        assert!(jump < 0.5, "EDFM should not capture the discontinuity, jump = {jump}");
    }
}
