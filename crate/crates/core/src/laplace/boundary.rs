use serde::{Deserialize, Serialize};

use super::LaplaceError;
use crate::mesh::TetMesh;
use crate::union_find::UnionFind;

/// Dirichlet vertex sets of the sweep problem: value 0 on `gamma0`, 1 on
/// `gamma1`. Stored sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepBoundary {
    gamma0: Vec<usize>,
    gamma1: Vec<usize>,
}

fn normalise(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

impl SweepBoundary {
    /// Unchecked construction; see [`SweepBoundary::validate`].
    pub fn new(gamma0: Vec<usize>, gamma1: Vec<usize>) -> Self {
        Self {
            gamma0: normalise(gamma0),
            gamma1: normalise(gamma1),
        }
    }

    /// Builds and validates against `mesh`.
    pub fn checked(mesh: &TetMesh, gamma0: Vec<usize>, gamma1: Vec<usize>) -> Result<Self, LaplaceError> {
        let bc = Self::new(gamma0, gamma1);
        bc.validate(mesh)?;
        Ok(bc)
    }

    pub fn gamma0(&self) -> &[usize] {
        &self.gamma0
    }
    pub fn gamma1(&self) -> &[usize] {
        &self.gamma1
    }

    /// Prescribed value per vertex: `Some(0.0)`, `Some(1.0)` or `None`.
    pub fn dirichlet_values(&self, num_vertices: usize) -> Vec<Option<f64>> {
        let mut d = vec![None; num_vertices];
        for &v in &self.gamma0 {
            d[v] = Some(0.0);
        }
        for &v in &self.gamma1 {
            d[v] = Some(1.0);
        }
        d
    }

    pub fn is_dirichlet(&self, v: usize) -> bool {
        self.gamma0.binary_search(&v).is_ok() || self.gamma1.binary_search(&v).is_ok()
    }

    /// Both sets non-empty, disjoint, made of boundary vertices, and each
    /// connected through boundary edges whose ends both lie in the set.
    pub fn validate(&self, mesh: &TetMesh) -> Result<(), LaplaceError> {
        for (which, set) in [("gamma0", &self.gamma0), ("gamma1", &self.gamma1)] {
            if set.is_empty() {
                return Err(LaplaceError::EmptyBoundarySet { which });
            }
            for &v in set {
                if v >= mesh.num_vertices() {
                    return Err(LaplaceError::VertexOutOfRange { which, vertex: v });
                }
                if !mesh.is_boundary_vertex(v) {
                    return Err(LaplaceError::NotOnBoundary { which, vertex: v });
                }
            }
        }
        if let Some(&v) = self.gamma0.iter().find(|v| self.gamma1.binary_search(v).is_ok()) {
            return Err(LaplaceError::OverlappingBoundary { vertex: v });
        }
        for (which, set) in [("gamma0", &self.gamma0), ("gamma1", &self.gamma1)] {
            let components = boundary_components(mesh, set);
            if components != 1 {
                return Err(LaplaceError::DisconnectedBoundarySet { which, components });
            }
        }
        Ok(())
    }
}

/// Connected components of the boundary subcomplex spanned by `set`.
fn boundary_components(mesh: &TetMesh, set: &[usize]) -> usize {
    let local = |v: usize| set.binary_search(&v).ok();
    let mut uf = UnionFind::new(set.len());
    for f in (0..mesh.num_faces()).filter(|&f| mesh.is_boundary_face(f)) {
        for e in mesh.face_edges(f) {
            let [a, b] = mesh.edges()[e];
            if let (Some(a), Some(b)) = (local(a), local(b)) {
                uf.union(a, b);
            }
        }
    }
    uf.num_sets()
}
