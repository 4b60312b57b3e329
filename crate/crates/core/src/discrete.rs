//! Shared two-point discrete machinery: the connection list produced by the
//! solvers' assembly, its conversion to a sparse system, and the solution
//! diagnostics (per-cell conservation residuals, boundary balance, discrete
//! maximum principle).

use crate::error::Error;
use crate::geometry::{Point2, Segment2};
use crate::linalg::{self, DofEntity, SolveReport, SparseSystem, SystemBuilder};

/// Interior two-point coupling with transmissibility `trans > 0`.
#[derive(Clone, Copy, Debug)]
pub struct Connection {
    pub i: usize,
    pub j: usize,
    pub trans: f64,
}

/// Coupling of one unknown to a Dirichlet boundary value, eliminated into
/// the right-hand side.
#[derive(Clone, Copy, Debug)]
pub struct DirichletLink {
    pub dof: usize,
    pub trans: f64,
    pub value: f64,
    /// Where on the boundary the link acts (diagnostics only).
    pub location: Point2,
}

/// Assembled two-point discretization, still in physical terms.
#[derive(Clone, Debug, Default)]
pub struct TwoPointSystem {
    pub entities: Vec<DofEntity>,
    pub connections: Vec<Connection>,
    pub dirichlet: Vec<DirichletLink>,
    /// Per-dof integrated volumetric in-flow from Neumann boundaries and
    /// sources (enters the right-hand side directly).
    pub loads: Vec<f64>,
    /// Per-dof volumes (measure of the associated entity).
    pub volumes: Vec<f64>,
}

impl TwoPointSystem {
    pub fn new(entities: Vec<DofEntity>) -> Self {
        let n = entities.len();
        TwoPointSystem {
            entities,
            connections: Vec::new(),
            dirichlet: Vec::new(),
            loads: vec![0.0; n],
            volumes: vec![0.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.entities.len()
    }

    pub fn add_connection(&mut self, i: usize, j: usize, trans: f64) {
        debug_assert!(trans > 0.0, "non-positive transmissibility {trans}");
        self.connections.push(Connection { i, j, trans });
    }

    pub fn add_dirichlet(&mut self, dof: usize, trans: f64, value: f64, location: Point2) {
        debug_assert!(trans > 0.0);
        self.dirichlet.push(DirichletLink {
            dof,
            trans,
            value,
            location,
        });
    }

    pub fn assemble(&self) -> SparseSystem {
        let mut b = SystemBuilder::new(self.entities.clone());
        for c in &self.connections {
            b.add_connection(c.i, c.j, c.trans);
        }
        for d in &self.dirichlet {
            b.add_dirichlet(d.dof, d.trans, d.value);
        }
        for (i, &q) in self.loads.iter().enumerate() {
            if q != 0.0 {
                b.add_rhs(i, q);
            }
        }
        b.build()
    }

    /// Per-dof residual of the two-point balance at a given solution:
    /// sum of outgoing fluxes minus loads. Zero for an exact solve.
    pub fn flux_residuals(&self, p: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; self.n()];
        for c in &self.connections {
            let f = c.trans * (p[c.i] - p[c.j]);
            r[c.i] += f;
            r[c.j] -= f;
        }
        for d in &self.dirichlet {
            r[d.dof] += d.trans * (p[d.dof] - d.value);
        }
        for (ri, q) in r.iter_mut().zip(&self.loads) {
            *ri -= q;
        }
        r
    }

    /// Largest flux magnitude over all couplings (scale for residuals).
    pub fn max_abs_flux(&self, p: &[f64]) -> f64 {
        let mut m: f64 = 0.0;
        for c in &self.connections {
            m = m.max((c.trans * (p[c.i] - p[c.j])).abs());
        }
        for d in &self.dirichlet {
            m = m.max((d.trans * (p[d.dof] - d.value)).abs());
        }
        for &q in &self.loads {
            m = m.max(q.abs());
        }
        m
    }

    /// Range of Dirichlet boundary values, if any.
    pub fn dirichlet_range(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for d in &self.dirichlet {
            lo = lo.min(d.value);
            hi = hi.max(d.value);
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// True when the system has no Neumann in-flow or volumetric source,
    /// i.e. when the discrete maximum principle applies.
    pub fn is_boundary_driven_dirichlet_only(&self) -> bool {
        self.loads.iter().all(|&q| q == 0.0)
    }
}

/// Conservation diagnostics of a solved system.
#[derive(Clone, Copy, Debug)]
pub struct ConservationReport {
    /// Largest per-dof flux-balance residual.
    pub max_residual: f64,
    /// Largest single flux magnitude (normalization scale).
    pub max_flux: f64,
    /// `max_residual / max_flux`.
    pub relative_residual: f64,
    /// Largest per-dof residual normalized by the dof's gross flux
    /// throughput (componentwise backward error). Unlike
    /// `relative_residual`, this stays near machine precision even when
    /// huge transmissibilities make the fluxes themselves cancellation-
    /// limited in f64.
    pub backward_error: f64,
    /// Net volumetric rate leaving through Dirichlet boundaries.
    pub dirichlet_outflow: f64,
    /// Net volumetric rate entering through Neumann boundaries and sources.
    pub load_inflow: f64,
    /// |outflow - inflow| relative to the gross boundary throughput.
    pub global_imbalance: f64,
}

pub fn conservation(system: &TwoPointSystem, p: &[f64]) -> ConservationReport {
    let residuals = system.flux_residuals(p);
    let n = system.n();
    // per-dof gross throughput: sum of |T| * (|p_i| + |p_j|) over couplings
    let mut throughput = vec![0.0_f64; n];
    for c in &system.connections {
        let t = c.trans * (p[c.i].abs() + p[c.j].abs());
        throughput[c.i] += t;
        throughput[c.j] += t;
    }
    for d in &system.dirichlet {
        throughput[d.dof] += d.trans * (p[d.dof].abs() + d.value.abs());
    }
    for (i, &q) in system.loads.iter().enumerate() {
        throughput[i] += q.abs();
    }
    let max_residual = residuals.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    let backward_error = residuals
        .iter()
        .zip(&throughput)
        .fold(0.0_f64, |m, (r, t)| m.max(r.abs() / t.max(1e-300)));
    let max_flux = system.max_abs_flux(p);
    let mut dirichlet_outflow = 0.0;
    let mut gross = 0.0;
    for d in &system.dirichlet {
        let f = d.trans * (p[d.dof] - d.value);
        dirichlet_outflow += f;
        gross += f.abs();
    }
    let mut load_inflow = 0.0;
    for &q in &system.loads {
        load_inflow += q;
        gross += q.abs();
    }
    ConservationReport {
        max_residual,
        max_flux,
        relative_residual: if max_flux > 0.0 {
            max_residual / max_flux
        } else {
            0.0
        },
        backward_error,
        dirichlet_outflow,
        load_inflow,
        global_imbalance: (dirichlet_outflow - load_inflow).abs() / gross.max(1e-300),
    }
}

/// One lower-dimensional fracture element of a hybrid solution: its position
/// along the owning fracture and its solved pressure.
#[derive(Clone, Copy, Debug)]
pub struct FractureElement {
    pub fracture: usize,
    /// Geometry of the element (a piece of the fracture centerline).
    pub segment: Segment2,
    /// Parameter interval along the owning fracture.
    pub t0: f64,
    pub t1: f64,
    pub aperture: f64,
    pub pressure: f64,
    pub dof: usize,
}

/// Pressures on matrix cells and fracture elements, plus the discrete system
/// they solve, for post-processing and diagnostics.
#[derive(Debug)]
pub struct DiscreteSolution {
    pub system: TwoPointSystem,
    pub sparse: SparseSystem,
    /// All dof pressures (matrix, fracture, intersection).
    pub pressures: Vec<f64>,
    /// Pressures restricted to the mesh cells.
    pub matrix_pressure: Vec<f64>,
    pub fracture_elements: Vec<FractureElement>,
    pub solve_report: SolveReport,
    /// Unknown count (after any elimination).
    pub dofs: usize,
}

impl DiscreteSolution {
    /// Assembles and solves a two-point system, splitting the solution into
    /// matrix and fracture parts.
    pub fn solve(
        system: TwoPointSystem,
        n_matrix_cells: usize,
        mut fracture_elements: Vec<FractureElement>,
    ) -> Result<Self, Error> {
        let sparse = system.assemble();
        let (pressures, solve_report) = linalg::solve(&sparse)?;
        let matrix_pressure = pressures[..n_matrix_cells].to_vec();
        for fe in &mut fracture_elements {
            fe.pressure = pressures[fe.dof];
        }
        let dofs = system.n();
        Ok(DiscreteSolution {
            system,
            sparse,
            pressures,
            matrix_pressure,
            fracture_elements,
            solve_report,
            dofs,
        })
    }

    pub fn conservation(&self) -> ConservationReport {
        conservation(&self.system, &self.pressures)
    }

    /// Solution range over all dofs.
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

/// Harmonic combination of two half-transmissibilities.
pub fn harmonic(alpha_a: f64, alpha_b: f64) -> f64 {
    alpha_a * alpha_b / (alpha_a + alpha_b)
}
