//! Legacy VTK export and a JSON summary of a mesh.

use std::collections::HashMap;
use std::io::Write;

use serde::Serialize;

use super::KuhnMesh;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MeshSummary {
    pub d: usize,
    pub n_simplices: usize,
    pub measure: f64,
    pub n_dof: usize,
}

pub fn mesh_summary(mesh: &KuhnMesh) -> MeshSummary {
    MeshSummary {
        d: mesh.dim(),
        n_simplices: mesh.len(),
        measure: mesh.measure(),
        n_dof: mesh.sites().len(),
    }
}

/// Writes an ASCII legacy VTK unstructured grid (d <= 3). A point-data
/// field `free` marks the vertices that belong to the configuration.
pub fn write_vtk<W: Write>(mesh: &KuhnMesh, out: &mut W) -> Result<()> {
    let d = mesh.dim();
    let cell_type = match d {
        1 => 3,
        2 => 5,
        3 => 10,
        _ => return Err(Error::UnsupportedDimension(d)),
    };
    let vertices = mesh.vertices();
    let index: HashMap<_, _> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "Kuhn extension of a {}-site configuration", mesh.sites().len())?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", vertices.len())?;
    for v in &vertices {
        let mut c = [0i32; 3];
        c[..d].copy_from_slice(v.coords());
        writeln!(out, "{} {} {}", c[0], c[1], c[2])?;
    }
    writeln!(out, "CELLS {} {}", mesh.len(), mesh.len() * (d + 2))?;
    for s in mesh.simplices() {
        write!(out, "{}", d + 1)?;
        for w in s.vertices() {
            write!(out, " {}", index[&w])?;
        }
        writeln!(out)?;
    }
    writeln!(out, "CELL_TYPES {}", mesh.len())?;
    for _ in 0..mesh.len() {
        writeln!(out, "{cell_type}")?;
    }
    writeln!(out, "POINT_DATA {}", vertices.len())?;
    writeln!(out, "SCALARS free int 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for v in &vertices {
        writeln!(out, "{}", u8::from(mesh.sites().contains(v)))?;
    }
    Ok(())
}
