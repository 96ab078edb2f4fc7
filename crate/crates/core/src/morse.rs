//! PL critical points from the reduced homology of lower links.
//!
//! A vertex is regular when its lower link has the reduced homology of a
//! point. Otherwise the first non-vanishing reduced Betti number gives the
//! index: an empty lower link is a minimum, `b~0 != 0` a 1-saddle, `b~1 != 0`
//! a 2-saddle and `b~2 != 0` a maximum. When `b~0 + b~1 > 1` the vertex is a
//! multiple saddle and is reported as degenerate.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::{TieBreak, TieBreakField};
use crate::homology::{reduced_betti, ReducedBetti};
use crate::mesh::TetMesh;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CriticalKind {
    #[serde(rename = "regular")]
    Regular,
    #[serde(rename = "minimum")]
    Minimum,
    #[serde(rename = "1-saddle")]
    Saddle1,
    #[serde(rename = "2-saddle")]
    Saddle2,
    #[serde(rename = "maximum")]
    Maximum,
    #[serde(rename = "degenerate")]
    Degenerate,
}

impl CriticalKind {
    pub fn from_reduced_betti(rb: &ReducedBetti) -> Self {
        if rb.bm1 != 0 {
            CriticalKind::Minimum
        } else if rb.b0 + rb.b1 > 1 {
            CriticalKind::Degenerate
        } else if rb.b0 != 0 {
            CriticalKind::Saddle1
        } else if rb.b1 != 0 {
            CriticalKind::Saddle2
        } else if rb.b2 != 0 {
            CriticalKind::Maximum
        } else {
            CriticalKind::Regular
        }
    }

    /// Morse index, `None` for regular and degenerate vertices.
    pub fn index(self) -> Option<u8> {
        match self {
            CriticalKind::Minimum => Some(0),
            CriticalKind::Saddle1 => Some(1),
            CriticalKind::Saddle2 => Some(2),
            CriticalKind::Maximum => Some(3),
            CriticalKind::Regular | CriticalKind::Degenerate => None,
        }
    }

    pub fn is_critical(self) -> bool {
        self != CriticalKind::Regular
    }

    /// The kind the same vertex has under the negated field.
    pub fn dual(self) -> Self {
        match self {
            CriticalKind::Minimum => CriticalKind::Maximum,
            CriticalKind::Maximum => CriticalKind::Minimum,
            CriticalKind::Saddle1 => CriticalKind::Saddle2,
            CriticalKind::Saddle2 => CriticalKind::Saddle1,
            k => k,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CriticalKind::Regular => "regular",
            CriticalKind::Minimum => "minimum",
            CriticalKind::Saddle1 => "1-saddle",
            CriticalKind::Saddle2 => "2-saddle",
            CriticalKind::Maximum => "maximum",
            CriticalKind::Degenerate => "degenerate",
        }
    }
}

impl std::fmt::Display for CriticalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Interior,
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexClass {
    pub vertex: usize,
    pub location: Location,
    pub reduced_betti: ReducedBetti,
    pub kind: CriticalKind,
    pub value: f64,
}

impl VertexClass {
    pub fn is_interior_critical(&self) -> bool {
        self.location == Location::Interior && self.kind.is_critical()
    }

    /// `1 - chi(lower link)`: the change in Euler characteristic of the
    /// sublevel complex when this vertex enters it.
    pub fn euler_contribution(&self) -> i64 {
        let rb = self.reduced_betti;
        // Reduced Euler characteristic sum_{j >= -1} (-1)^j b~_j, negated.
        rb.bm1 as i64 - rb.b0 as i64 + rb.b1 as i64 - rb.b2 as i64
    }
}

pub fn classify_vertex(mesh: &TetMesh, field: &TieBreakField, v: usize) -> VertexClass {
    let ll = mesh.lower_link(v, field);
    let rb = reduced_betti(&ll).expect("lower links have no tetrahedra");
    VertexClass {
        vertex: v,
        location: if mesh.is_boundary_vertex(v) {
            Location::Boundary
        } else {
            Location::Interior
        },
        reduced_betti: rb,
        kind: CriticalKind::from_reduced_betti(&rb),
        value: field.value(v),
    }
}

/// Counts of vertices per kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCounts {
    pub regular: usize,
    pub minimum: usize,
    pub saddle1: usize,
    pub saddle2: usize,
    pub maximum: usize,
    pub degenerate: usize,
}

impl KindCounts {
    fn add(&mut self, k: CriticalKind) {
        match k {
            CriticalKind::Regular => self.regular += 1,
            CriticalKind::Minimum => self.minimum += 1,
            CriticalKind::Saddle1 => self.saddle1 += 1,
            CriticalKind::Saddle2 => self.saddle2 += 1,
            CriticalKind::Maximum => self.maximum += 1,
            CriticalKind::Degenerate => self.degenerate += 1,
        }
    }

    pub fn critical(&self) -> usize {
        self.minimum + self.saddle1 + self.saddle2 + self.maximum + self.degenerate
    }
}

/// Classification of every vertex that belongs to a tetrahedron.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub tie_break: TieBreak,
    pub entries: Vec<VertexClass>,
}

impl CriticalReport {
    fn cmp(&self, a: &VertexClass, b: &VertexClass) -> Ordering {
        a.value.total_cmp(&b.value).then_with(|| match self.tie_break {
            TieBreak::IndexAscending => a.vertex.cmp(&b.vertex),
            TieBreak::IndexDescending => b.vertex.cmp(&a.vertex),
        })
    }

    pub fn entry(&self, v: usize) -> Option<&VertexClass> {
        self.entries
            .binary_search_by_key(&v, |e| e.vertex)
            .ok()
            .map(|i| &self.entries[i])
    }

    /// Interior critical vertices, ascending in the tie-broken order.
    pub fn interior_critical(&self) -> Vec<&VertexClass> {
        let mut out: Vec<&VertexClass> = self.entries.iter().filter(|e| e.is_interior_critical()).collect();
        out.sort_by(|a, b| self.cmp(a, b));
        out
    }

    pub fn interior_critical_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_interior_critical()).count()
    }

    pub fn counts(&self, location: Location) -> KindCounts {
        let mut c = KindCounts::default();
        for e in self.entries.iter().filter(|e| e.location == location) {
            c.add(e.kind);
        }
        c
    }

    /// Sum of `(-1)^index` over interior critical vertices, with degenerate
    /// vertices counted by their lower-link Euler contribution.
    pub fn interior_euler_sum(&self) -> i64 {
        self.entries
            .iter()
            .filter(|e| e.is_interior_critical())
            .map(VertexClass::euler_contribution)
            .sum()
    }
}

pub fn classify_all(mesh: &TetMesh, field: &TieBreakField) -> CriticalReport {
    assert_eq!(field.len(), mesh.num_vertices(), "field size mismatch");
    let entries = (0..mesh.num_vertices())
        .into_par_iter()
        .filter(|&v| !mesh.vertex_tets(v).is_empty())
        .map(|v| classify_vertex(mesh, field, v))
        .collect();
    CriticalReport {
        tie_break: field.tie_break(),
        entries,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue {
    pub value: f64,
    pub vertex: usize,
    pub kind: CriticalKind,
}

/// Interior critical vertices in ascending tie-broken order.
pub fn critical_values(report: &CriticalReport) -> Vec<CriticalValue> {
    report
        .interior_critical()
        .into_iter()
        .map(|e| CriticalValue {
            value: e.value,
            vertex: e.vertex,
            kind: e.kind,
        })
        .collect()
}
