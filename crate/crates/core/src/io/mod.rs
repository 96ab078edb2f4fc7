//! Mesh, field and surface file formats.
//!
//! - native text: `nv nt`, then `x y z` per vertex, then `i0 i1 i2 i3` per
//!   tetrahedron; fields are one value per line. Floats are written with the
//!   shortest representation that parses back to the same bits.
//! - VTK legacy ASCII: tetrahedral `UNSTRUCTURED_GRID` with optional point
//!   scalars, and `POLYDATA` for surfaces and polylines.
//! - Wavefront OBJ for surfaces and polylines.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::mesh::{MeshError, TetMesh};
use crate::ScalarField;

pub mod native;
pub mod obj;
pub mod vtk;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cell {cell} has VTK type {kind}; only tetrahedra (type 10) are supported")]
    UnsupportedCell { cell: usize, kind: u32 },
    #[error("field has {found} values but the mesh has {expected} vertices")]
    FieldLength { expected: usize, found: usize },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

impl IoError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        IoError::Parse {
            line,
            message: message.into(),
        }
    }
}

/// Mesh file flavours recognised by extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Native,
    Vtk,
}

impl MeshFormat {
    /// `.vtk` selects VTK; anything else is native.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("vtk") => MeshFormat::Vtk,
            _ => MeshFormat::Native,
        }
    }
}

/// Reads a mesh, choosing the format from the extension. A VTK file may
/// carry point scalars, which are returned alongside.
pub fn read_mesh(path: &Path) -> Result<(TetMesh, Option<ScalarField>), IoError> {
    let r = BufReader::new(File::open(path)?);
    match MeshFormat::from_path(path) {
        MeshFormat::Native => Ok((native::read_mesh(r)?, None)),
        MeshFormat::Vtk => vtk::read_unstructured(r),
    }
}

pub fn write_mesh(path: &Path, mesh: &TetMesh, field: Option<&ScalarField>) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path)?);
    match MeshFormat::from_path(path) {
        MeshFormat::Native => native::write_mesh(&mut w, mesh)?,
        MeshFormat::Vtk => vtk::write_unstructured(&mut w, mesh, field.map(|f| ("f", f)))?,
    }
    w.flush()?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<ScalarField, IoError> {
    native::read_field(BufReader::new(File::open(path)?))
}

pub fn write_field(path: &Path, field: &ScalarField) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path)?);
    native::write_field(&mut w, field)?;
    w.flush()?;
    Ok(())
}
