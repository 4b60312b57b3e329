//! VTK legacy ASCII output: matrix cells as an unstructured grid with
//! cell-data pressure, fracture solutions as a separate polyline file.

use std::fmt::Write as _;

use crate::discrete::FractureElement;
use crate::error::Error;
use crate::mesh::Mesh;

/// Writes the matrix mesh with per-cell pressures as a legacy VTK
/// unstructured grid.
pub fn write_cells<W: std::io::Write>(
    mut w: W,
    mesh: &Mesh,
    pressure: &[f64],
    field_name: &str,
) -> Result<(), Error> {
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    s.push_str("frackbench matrix solution\n");
    s.push_str("ASCII\n");
    s.push_str("DATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {} double", mesh.n_vertices());
    for v in mesh.vertices() {
        let _ = writeln!(s, "{} {} 0", v.x, v.y);
    }
    let total: usize = (0..mesh.n_cells()).map(|c| mesh.cell_vertices(c).len() + 1).sum();
    let _ = writeln!(s, "CELLS {} {}", mesh.n_cells(), total);
    for c in 0..mesh.n_cells() {
        let vs = mesh.cell_vertices(c);
        let _ = write!(s, "{}", vs.len());
        for v in vs {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_TYPES {}", mesh.n_cells());
    for c in 0..mesh.n_cells() {
        // 5 = VTK_TRIANGLE, 9 = VTK_QUAD
        let ty = if mesh.cell_vertices(c).len() == 3 { 5 } else { 9 };
        let _ = writeln!(s, "{ty}");
    }
    let _ = writeln!(s, "CELL_DATA {}", mesh.n_cells());
    let _ = writeln!(s, "SCALARS {field_name} double 1");
    s.push_str("LOOKUP_TABLE default\n");
    for p in pressure {
        let _ = writeln!(s, "{p}");
    }
    w.write_all(s.as_bytes())?;
    Ok(())
}

/// Writes the fracture elements as VTK line cells with their pressures.
pub fn write_fracture_lines<W: std::io::Write>(
    mut w: W,
    elements: &[FractureElement],
    field_name: &str,
) -> Result<(), Error> {
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    s.push_str("frackbench fracture solution\n");
    s.push_str("ASCII\n");
    s.push_str("DATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {} double", 2 * elements.len());
    for e in elements {
        let _ = writeln!(s, "{} {} 0", e.segment.a.x, e.segment.a.y);
        let _ = writeln!(s, "{} {} 0", e.segment.b.x, e.segment.b.y);
    }
    let _ = writeln!(s, "CELLS {} {}", elements.len(), 3 * elements.len());
    for i in 0..elements.len() {
        let _ = writeln!(s, "2 {} {}", 2 * i, 2 * i + 1);
    }
    let _ = writeln!(s, "CELL_TYPES {}", elements.len());
    for _ in elements {
        s.push_str("3\n"); // VTK_LINE
    }
    let _ = writeln!(s, "CELL_DATA {}", elements.len());
    let _ = writeln!(s, "SCALARS {field_name} double 1");
    s.push_str("LOOKUP_TABLE default\n");
    for e in elements {
        let _ = writeln!(s, "{}", e.pressure);
    }
    w.write_all(s.as_bytes())?;
    Ok(())
}
