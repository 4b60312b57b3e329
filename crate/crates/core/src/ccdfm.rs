//! Conforming cell-centered TPFA solver with hybrid fracture faces:
//! unknowns live on matrix cells and on fracture cells (tagged conforming
//! faces with volume `length * aperture`), matrix-fracture exchange goes
//! through hybrid faces displaced half an aperture to either side, and
//! fracture intersections are either eliminated exactly by the star-delta
//! transformation or kept as explicit intersection cells.
//!
//! Pressure is discontinuous across fractures by construction: the two
//! matrix neighbors of a fracture face couple only through the fracture
//! cell between them.

use std::collections::{BTreeMap, HashMap};

use crate::discrete::{harmonic, DiscreteSolution, FractureElement, TwoPointSystem};
use crate::error::Error;
use crate::geometry::{distance_point_segment, Point2, Vec2};
use crate::linalg::DofEntity;
use crate::mesh::{tag_fracture_faces, Mesh};
use crate::scenario::{BcKind, Scenario};

/// Treatment of fracture-intersection cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntersectionMode {
    /// Star-delta elimination of the intersection unknowns (the default
    /// scheme).
    Eliminate,
    /// Keep explicit intersection cells (the `*` variant); retains the
    /// intersection permeability at the cost of conditioning.
    Keep,
}

/// Half transmissibility of a cell-face pair:
/// `alpha = A * n^T K d / (d^T d)`,
/// with face area `A`, outward unit normal `n`, permeability `K` of the cell
/// and distance vector `d` from the cell center to the face centroid.
pub fn half_transmissibility(area: f64, n_out: Vec2, d: Vec2, k: [[f64; 2]; 2]) -> f64 {
    let kd = Vec2::new(k[0][0] * d.x + k[0][1] * d.y, k[1][0] * d.x + k[1][1] * d.y);
    area * n_out.dot(kd) / d.dot(d)
}

/// Face transmissibility as the harmonic average of the two half
/// transmissibilities.
pub fn matrix_matrix_transmissibility(alpha_left: f64, alpha_right: f64) -> f64 {
    harmonic(alpha_left, alpha_right)
}

/// Fracture-side half transmissibility of a hybrid face: flow crosses half
/// the aperture normal to the fracture, `alpha = A k_n / (eps / 2)`.
pub fn fracture_normal_half_transmissibility(area: f64, k_n: f64, aperture: f64) -> f64 {
    area * k_n / (aperture / 2.0)
}

/// Half transmissibility of a fracture cell towards a shared vertex:
/// tangential flow through the cross-section `aperture x unit depth` over
/// the centroid-to-vertex distance.
pub fn fracture_tangential_half_transmissibility(aperture: f64, k_t: f64, distance: f64) -> f64 {
    aperture * k_t / distance
}

/// Star-delta transformation: eliminates an intersection cell with incident
/// half-transmissibilities `alpha`, producing the pairwise transmissibilities
/// `T_ij = alpha_i * alpha_j / sum_k alpha_k` for all `i < j`.
pub fn star_delta_eliminate(alpha: &[f64]) -> Vec<(usize, usize, f64)> {
    let total: f64 = alpha.iter().sum();
    let mut out = Vec::with_capacity(alpha.len() * (alpha.len() - 1) / 2);
    for i in 0..alpha.len() {
        for j in i + 1..alpha.len() {
            out.push((i, j, alpha[i] * alpha[j] / total));
        }
    }
    out
}

/// A fracture cell on a tagged conforming face.
#[derive(Clone, Copy, Debug)]
struct FractureCell {
    fracture: usize,
    face: usize,
    dof: usize,
    length: f64,
    aperture: f64,
    k_t: f64,
}

/// Assembles and solves the CC-DFM system for a scenario on a conforming
/// mesh. Face fluxes, conservation diagnostics and the dof-to-entity map are
/// carried by the returned solution.
pub fn solve(
    scenario: &Scenario,
    mesh: &Mesh,
    mode: IntersectionMode,
) -> Result<DiscreteSolution, Error> {
    scenario.validate()?;
    let tol = scenario.tolerance().max(mesh.tolerance());
    let tagging = tag_fracture_faces(mesh, &scenario.fractures)?;

    let n_cells = mesh.n_cells();
    let mut entities: Vec<DofEntity> = (0..n_cells).map(DofEntity::MatrixCell).collect();

    // fracture cells, one per tagged face
    let mut fracture_cells: Vec<FractureCell> = Vec::new();
    let mut face_to_fracture_cell: HashMap<usize, usize> = HashMap::new();
    let mut fracture_elements: Vec<FractureElement> = Vec::new();
    for (fi, tagged) in tagging.by_fracture.iter().enumerate() {
        let frac = &scenario.fractures.fractures[fi];
        for (ei, t) in tagged.iter().enumerate() {
            let dof = entities.len();
            let seg = mesh.face_segment(t.face);
            if mesh.face(t.face).is_boundary() {
                return Err(Error::NonConforming(format!(
                    "fracture {fi} runs along the domain boundary at face {}; fracture faces must be interior",
                    t.face
                )));
            }
            if face_to_fracture_cell.insert(t.face, fracture_cells.len()).is_some() {
                return Err(Error::NonConforming(format!(
                    "face {} is claimed by more than one fracture; overlapping fractures are not supported",
                    t.face
                )));
            }
            entities.push(DofEntity::FractureCell {
                fracture: fi,
                element: ei,
            });
            fracture_cells.push(FractureCell {
                fracture: fi,
                face: t.face,
                dof,
                length: seg.length(),
                aperture: frac.aperture,
                k_t: frac.k_t,
            });
            fracture_elements.push(FractureElement {
                fracture: fi,
                segment: seg,
                t0: t.t0,
                t1: t.t1,
                aperture: frac.aperture,
                pressure: f64::NAN,
                dof,
            });
        }
    }

    // branches at mesh vertices: fracture cells reaching each vertex
    let mut vertex_branches: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (ci, fc) in fracture_cells.iter().enumerate() {
        for &v in &mesh.face(fc.face).v {
            vertex_branches.entry(v).or_default().push(ci);
        }
    }

    let mut system = TwoPointSystem::new(entities);

    // cell volumes and sources
    for c in 0..n_cells {
        system.volumes[c] = mesh.cell_area(c);
        system.loads[c] += scenario.source * mesh.cell_area(c);
    }
    for fc in &fracture_cells {
        system.volumes[fc.dof] = fc.length * fc.aperture;
        system.loads[fc.dof] += scenario.source * fc.length * fc.aperture;
    }

    // faces: matrix-matrix, matrix-fracture, boundary
    for f in 0..mesh.n_faces() {
        let face = mesh.face(f);
        let geom = mesh.face_geometry(f);
        let k_left = scenario.permeability_at(mesh.cell_centroid(face.left));

        if let Some(&fc_idx) = face_to_fracture_cell.get(&f) {
            let fc = fracture_cells[fc_idx];
            let frac = &scenario.fractures.fractures[fc.fracture];
            let right = face.right.expect("fracture faces are interior");
            let k_right = scenario.permeability_at(mesh.cell_centroid(right));
            for (cell, d, sign, k) in [
                (face.left, geom.d_left, 1.0, k_left),
                (right, geom.d_right.unwrap(), -1.0, k_right),
            ] {
                let n_out = geom.normal.scale(sign);
                let normal_dist = n_out.dot(d);
                if frac.aperture >= 2.0 * normal_dist {
                    return Err(Error::Assembly(format!(
                        "fracture {} aperture {:.3e} is too large for the mesh: cell {} centroid sits {:.3e} from face {}",
                        fc.fracture, frac.aperture, cell, normal_dist, f
                    )));
                }
                // hybrid face displaced half an aperture towards the cell
                let d_hybrid = Vec2::new(
                    d.x - n_out.x * frac.aperture / 2.0,
                    d.y - n_out.y * frac.aperture / 2.0,
                );
                let alpha_m = half_transmissibility(geom.area, n_out, d_hybrid, k);
                if !(alpha_m > 0.0) {
                    return Err(Error::Assembly(format!(
                        "non-positive matrix half-transmissibility {alpha_m:.3e} at fracture face {f}, cell {cell}"
                    )));
                }
                let alpha_f =
                    fracture_normal_half_transmissibility(geom.area, frac.k_n, frac.aperture);
                system.add_connection(cell, fc.dof, harmonic(alpha_m, alpha_f));
            }
        } else if let Some(right) = face.right {
            let k_right = scenario.permeability_at(mesh.cell_centroid(right));
            let alpha_l = half_transmissibility(geom.area, geom.normal, geom.d_left, k_left);
            let alpha_r = half_transmissibility(
                geom.area,
                geom.normal.scale(-1.0),
                geom.d_right.unwrap(),
                k_right,
            );
            if !(alpha_l > 0.0) || !(alpha_r > 0.0) {
                return Err(Error::Assembly(format!(
                    "non-positive half-transmissibility at face {f} (left {alpha_l:.3e}, right {alpha_r:.3e}); grid is not K-orthogonal enough"
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
                    // u.n = value (outward); inflow is negative
                    system.loads[face.left] -= bc.value_at(geom.centroid) * geom.area;
                }
            }
        }
    }

    // along-fracture and intersection couplings at mesh vertices
    let domain_tol = tol;
    for (&v, branches) in &vertex_branches {
        let vp = mesh.vertex(v);
        let alphas: Vec<f64> = branches
            .iter()
            .map(|&ci| {
                let fc = &fracture_cells[ci];
                fracture_tangential_half_transmissibility(fc.aperture, fc.k_t, fc.length / 2.0)
            })
            .collect();
        let mut distinct: Vec<usize> = branches.iter().map(|&ci| fracture_cells[ci].fracture).collect();
        distinct.sort_unstable();
        distinct.dedup();

        if distinct.len() >= 2 {
            // intersection of at least two fractures
            match mode {
                IntersectionMode::Eliminate => {
                    for (i, j, t) in star_delta_eliminate(&alphas) {
                        system.add_connection(
                            fracture_cells[branches[i]].dof,
                            fracture_cells[branches[j]].dof,
                            t,
                        );
                    }
                }
                IntersectionMode::Keep => {
                    let n_b = branches.len() as f64;
                    let size: f64 =
                        branches.iter().map(|&ci| fracture_cells[ci].aperture).sum::<f64>() / n_b;
                    // harmonic-mean permeability of the incident branches: a
                    // blocking fracture keeps blocking the crossing
                    let k_int = n_b / branches.iter().map(|&ci| 1.0 / fracture_cells[ci].k_t).sum::<f64>();
                    let dof = system.entities.len();
                    system.entities.push(DofEntity::Intersection { vertex: v });
                    system.loads.push(scenario.source * size * size);
                    system.volumes.push(size * size);
                    for (bi, &ci) in branches.iter().enumerate() {
                        let fc = &fracture_cells[ci];
                        let alpha_int =
                            fracture_tangential_half_transmissibility(fc.aperture, k_int, size / 2.0);
                        system.add_connection(fc.dof, dof, harmonic(alphas[bi], alpha_int));
                    }
                }
            }
        } else if branches.len() == 2 {
            // two consecutive cells of the same fracture
            system.add_connection(
                fracture_cells[branches[0]].dof,
                fracture_cells[branches[1]].dof,
                harmonic(alphas[0], alphas[1]),
            );
        } else if branches.len() == 1 {
            // chain end: either an immersed tip (no condition) or a boundary
            // endpoint that must feel the boundary condition directly
            let fc = &fracture_cells[branches[0]];
            if let Some(tag) = boundary_tag_of_point(scenario, vp, domain_tol) {
                let bc = scenario.bc_for_tag(tag)?;
                match bc.kind {
                    BcKind::Dirichlet => {
                        system.add_dirichlet(fc.dof, alphas[0], bc.value_at(vp), vp);
                    }
                    BcKind::Neumann => {
                        system.loads[fc.dof] -= bc.value_at(vp) * fc.aperture;
                    }
                }
            }
        } else if branches.len() > 2 {
            return Err(Error::NonConforming(format!(
                "fracture {} meets itself {} times at vertex {v}; invalid tagging",
                distinct[0],
                branches.len()
            )));
        }
    }

    DiscreteSolution::solve(system, n_cells, fracture_elements)
}

/// Domain-polygon edge containing a boundary point, if any.
fn boundary_tag_of_point(scenario: &Scenario, p: Point2, tol: f64) -> Option<u32> {
    (0..scenario.n_domain_edges() as u32)
        .find(|&tag| distance_point_segment(p, &scenario.domain_edge(tag)) <= tol)
}
