//! Per-vertex scalar fields and the total vertex order used by the PL theory.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

/// A value per mesh vertex. The PL extension is implied by the mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|x| x.is_finite())
    }

    /// `(min, max)` over all vertices, `None` for an empty field.
    pub fn range(&self) -> Option<(f64, f64)> {
        let mut it = self.values.iter().copied();
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x))))
    }

    pub fn negated(&self) -> Self {
        Self::new(self.values.iter().map(|x| -x).collect())
    }

    /// Applies `g` to every value. Used to check order invariance.
    pub fn map(&self, g: impl Fn(f64) -> f64) -> Self {
        Self::new(self.values.iter().map(|&x| g(x)).collect())
    }
}

impl From<Vec<f64>> for ScalarField {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}

/// Direction in which equal values are separated by vertex index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TieBreak {
    /// `(f_u, u) < (f_v, v)` lexicographically.
    IndexAscending,
    /// Equal values ordered by descending index; the exact reverse of
    /// `IndexAscending` applied to the negated field.
    IndexDescending,
}

/// A scalar field made injective by symbolic perturbation: vertices are
/// compared by value first and by index second.
#[derive(Clone, Debug, PartialEq)]
pub struct TieBreakField {
    field: ScalarField,
    tie: TieBreak,
}

impl TieBreakField {
    pub fn new(field: ScalarField) -> Self {
        Self {
            field,
            tie: TieBreak::IndexAscending,
        }
    }

    pub fn with_tie_break(field: ScalarField, tie: TieBreak) -> Self {
        Self { field, tie }
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn tie_break(&self) -> TieBreak {
        self.tie
    }

    pub fn value(&self, v: usize) -> f64 {
        self.field.value(v)
    }

    pub fn len(&self) -> usize {
        self.field.len()
    }

    pub fn is_empty(&self) -> bool {
        self.field.is_empty()
    }

    /// Total order on vertices.
    pub fn cmp_vertices(&self, u: usize, v: usize) -> Ordering {
        let (a, b) = (self.field.value(u), self.field.value(v));
        a.total_cmp(&b).then_with(|| match self.tie {
            TieBreak::IndexAscending => u.cmp(&v),
            TieBreak::IndexDescending => v.cmp(&u),
        })
    }

    pub fn is_lower(&self, u: usize, than: usize) -> bool {
        self.cmp_vertices(u, than) == Ordering::Less
    }

    /// The negated field with the order exactly reversed, ties included.
    pub fn negated(&self) -> Self {
        Self {
            field: self.field.negated(),
            tie: match self.tie {
                TieBreak::IndexAscending => TieBreak::IndexDescending,
                TieBreak::IndexDescending => TieBreak::IndexAscending,
            },
        }
    }

    /// Vertex ids sorted ascending under the total order.
    pub fn sorted_vertices(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.len()).collect();
        ids.sort_by(|&a, &b| self.cmp_vertices(a, b));
        ids
    }
}

impl From<ScalarField> for TieBreakField {
    fn from(field: ScalarField) -> Self {
        Self::new(field)
    }
}

impl From<&ScalarField> for TieBreakField {
    fn from(field: &ScalarField) -> Self {
        Self::new(field.clone())
    }
}
