use serde::{Deserialize, Serialize};

use super::LaplaceError;
use crate::mesh::{TetMesh, TET_EDGE_PAIRS};

/// How edge weights are derived from the mesh.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightScheme {
    /// Every edge weighs 1.
    #[default]
    Uniform,
    /// `(1/6) sum l_kl cot(theta_kl)` over the tetrahedra at the edge, where
    /// `kl` is the opposite edge and `theta_kl` its dihedral angle. May be
    /// negative on poorly shaped tetrahedra.
    Cotangent,
    /// Area of the barycentric dual face of the edge divided by its length.
    /// Always positive.
    PositiveDual,
}

impl WeightScheme {
    pub fn name(self) -> &'static str {
        match self {
            WeightScheme::Uniform => "uniform",
            WeightScheme::Cotangent => "cotangent",
            WeightScheme::PositiveDual => "positive-dual",
        }
    }

    /// Schemes whose weights are non-negative on every mesh.
    pub fn guarantees_positive(self) -> bool {
        !matches!(self, WeightScheme::Cotangent)
    }
}

impl std::str::FromStr for WeightScheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uniform" => Ok(WeightScheme::Uniform),
            "cotangent" => Ok(WeightScheme::Cotangent),
            "positive-dual" => Ok(WeightScheme::PositiveDual),
            _ => Err(format!("unknown weight scheme {s:?} (expected uniform, cotangent or positive-dual)")),
        }
    }
}

impl std::fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One weight per mesh edge, indexed like [`TetMesh::edges`].
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeWeights {
    scheme: WeightScheme,
    weights: Vec<f64>,
    non_negative: bool,
}

impl EdgeWeights {
    pub fn from_values(scheme: WeightScheme, weights: Vec<f64>) -> Self {
        let non_negative = weights.iter().all(|&w| w >= 0.0);
        Self {
            scheme,
            weights,
            non_negative,
        }
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }
    pub fn values(&self) -> &[f64] {
        &self.weights
    }
    pub fn weight(&self, edge: usize) -> f64 {
        self.weights[edge]
    }
    pub fn len(&self) -> usize {
        self.weights.len()
    }
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// True when no weight is negative, which is what the discrete maximum
    /// principle needs.
    pub fn is_non_negative(&self) -> bool {
        self.non_negative
    }

    pub fn negative_count(&self) -> usize {
        self.weights.iter().filter(|&&w| w < 0.0).count()
    }

    pub fn min(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn compute_weights(mesh: &TetMesh, scheme: WeightScheme) -> Result<EdgeWeights, LaplaceError> {
    let weights = match scheme {
        WeightScheme::Uniform => vec![1.0; mesh.num_edges()],
        WeightScheme::Cotangent => snap(cotangent(mesh)?),
        WeightScheme::PositiveDual => positive_dual(mesh),
    };
    Ok(EdgeWeights::from_values(scheme, weights))
}

/// Sums of cotangent terms that cancel exactly in exact arithmetic (for
/// example the long diagonals of a Kuhn cube) come out as tiny numbers of
/// either sign. Treat them as zero.
fn snap(mut w: Vec<f64>) -> Vec<f64> {
    let scale = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for x in &mut w {
        if x.abs() <= 1e-12 * scale {
            *x = 0.0;
        }
    }
    w
}

fn cotangent(mesh: &TetMesh) -> Result<Vec<f64>, LaplaceError> {
    let mut w = vec![0.0; mesh.num_edges()];
    for t in 0..mesh.num_tets() {
        let tet = mesh.tet(t);
        let p = tet.map(|v| mesh.position(v));
        let six_v = (p[1] - p[0]).cross(&(p[2] - p[0])).dot(&(p[3] - p[0])).abs();
        let lmax = TET_EDGE_PAIRS
            .iter()
            .map(|&(a, b)| (p[a] - p[b]).norm())
            .fold(0.0, f64::max);
        if !(six_v > 1e-12 * lmax.powi(3)) {
            return Err(LaplaceError::DegenerateGeometry { tet: t });
        }
        let edges = mesh.tet_edges(t);
        for (k, &(i, j)) in TET_EDGE_PAIRS.iter().enumerate() {
            // Opposite edge (a, b).
            let (a, b) = TET_EDGE_PAIRS[5 - k];
            let e = p[b] - p[a];
            let len = e.norm();
            let dir = e / len;
            let u = p[i] - p[a];
            let v = p[j] - p[a];
            let up = u - dir * u.dot(&dir);
            let vp = v - dir * v.dot(&dir);
            // |up x vp| = 6V / len, so cot = (up . vp) * len / 6V.
            let cot = up.dot(&vp) * len / six_v;
            w[edges[k]] += len * cot / 6.0;
        }
    }
    Ok(w)
}

fn positive_dual(mesh: &TetMesh) -> Vec<f64> {
    let mut w = vec![0.0; mesh.num_edges()];
    for t in 0..mesh.num_tets() {
        let p = mesh.tet(t).map(|v| mesh.position(v).coords);
        let c = (p[0] + p[1] + p[2] + p[3]) / 4.0;
        let edges = mesh.tet_edges(t);
        for (k, &(i, j)) in TET_EDGE_PAIRS.iter().enumerate() {
            let (a, b) = TET_EDGE_PAIRS[5 - k];
            let m = (p[i] + p[j]) / 2.0;
            let fa = (p[i] + p[j] + p[a]) / 3.0;
            let fb = (p[i] + p[j] + p[b]) / 3.0;
            let area = 0.5 * (fa - m).cross(&(c - m)).norm() + 0.5 * (c - m).cross(&(fb - m)).norm();
            w[edges[k]] += area / (p[i] - p[j]).norm();
        }
    }
    w
}
