//! Level sets, sublevel complexes and the topology changes between them.
//!
//! Level sets are extracted by marching tetrahedra. A level that coincides
//! with a vertex value is moved up to the next float that matches no vertex,
//! so vertices at the requested value count as below it, as they do in
//! [`extract_sublevel_complex`].

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::TieBreakField;
use crate::homology::{surface_betti_fast, BettiNumbers, Complex, ToComplex};
use crate::mesh::{Point, SubComplex, TetMesh};
use crate::morse::{critical_values, CriticalKind, CriticalReport};
use crate::ScalarField;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevelSetError {
    #[error("level {value} is not strictly between the field extremes {min} and {max}")]
    ValueOutOfRange { value: f64, min: f64, max: f64 },
    #[error("critical vertices {first} and {second} share the value {value}")]
    NotIsolated { first: usize, second: usize, value: f64 },
    #[error("{kind} at vertex {vertex} changes level-set Betti numbers by {delta:?}, which matches no allowed pattern")]
    PatternMismatch {
        vertex: usize,
        kind: CriticalKind,
        delta: [i64; 3],
    },
    #[error("level-set Betti numbers vary between {lower} and {upper}: {betti:?}")]
    NotConstant {
        lower: f64,
        upper: f64,
        betti: Vec<[usize; 3]>,
    },
}

/// A marching-tetrahedra surface. Vertex `i` lies on mesh edge
/// `source_edges[i]`; triangle `k` lies in tetrahedron `triangle_tets[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSetSurface {
    pub requested: f64,
    pub level: f64,
    pub nudged: bool,
    pub points: Vec<Point>,
    pub source_edges: Vec<usize>,
    pub triangles: Vec<[usize; 3]>,
    pub triangle_tets: Vec<usize>,
}

impl LevelSetSurface {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Edges as sorted vertex pairs with their incident triangle counts.
    pub fn edge_degrees(&self) -> Vec<([usize; 2], usize)> {
        let mut edges: Vec<[usize; 2]> = self
            .triangles
            .iter()
            .flat_map(|&[a, b, c]| [[a, b], [b, c], [a, c]])
            .map(|[a, b]| if a < b { [a, b] } else { [b, a] })
            .collect();
        edges.sort_unstable();
        let mut out: Vec<([usize; 2], usize)> = Vec::new();
        for e in edges {
            match out.last_mut() {
                Some((last, n)) if *last == e => *n += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }

    /// Edges with exactly one incident triangle.
    pub fn boundary_edges(&self) -> Vec<[usize; 2]> {
        self.edge_degrees()
            .into_iter()
            .filter(|&(_, n)| n == 1)
            .map(|(e, _)| e)
            .collect()
    }

    pub fn max_edge_degree(&self) -> usize {
        self.edge_degrees().iter().map(|&(_, n)| n).max().unwrap_or(0)
    }

    /// Betti numbers through the surface fast path.
    pub fn betti(&self) -> BettiNumbers {
        surface_betti_fast(self).expect("marching tetrahedra produces at most two triangles per edge")
    }
}

impl ToComplex for LevelSetSurface {
    fn to_complex(&self) -> Complex {
        Complex::from_simplices(&self.triangles)
    }
}

/// Smallest float at or above `a` that equals no vertex value.
fn nudge(values: &[f64], a: f64) -> (f64, bool) {
    let mut level = a;
    let mut nudged = false;
    while values.iter().any(|&x| x == level) {
        level = level.next_up();
        nudged = true;
    }
    (level, nudged)
}

/// Facets of one tetrahedron as triples of crossing edge ids.
fn tet_facets(mesh: &TetMesh, values: &[f64], level: f64, t: usize) -> Vec<[usize; 3]> {
    let tet = mesh.tet(t);
    let mut below = Vec::with_capacity(4);
    let mut above = Vec::with_capacity(4);
    for &v in &tet {
        if values[v] < level {
            below.push(v);
        } else {
            above.push(v);
        }
    }
    let e = |a: usize, b: usize| mesh.edge_id(a, b).expect("tet edge");
    match (below.len(), above.len()) {
        (1, 3) => vec![[e(below[0], above[0]), e(below[0], above[1]), e(below[0], above[2])]],
        (3, 1) => vec![[e(above[0], below[0]), e(above[0], below[1]), e(above[0], below[2])]],
        (2, 2) => {
            let (p, q) = (below[0], below[1]);
            let (r, s) = (above[0], above[1]);
            let (pr, ps, qs, qr) = (e(p, r), e(p, s), e(q, s), e(q, r));
            // Quad pr-ps-qs-qr: cut along the diagonal with the smaller edge-id pair.
            let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
            if key(pr, qs) <= key(ps, qr) {
                vec![[pr, ps, qs], [pr, qs, qr]]
            } else {
                vec![[ps, qs, qr], [ps, qr, pr]]
            }
        }
        _ => Vec::new(),
    }
}

pub fn extract_level_set(mesh: &TetMesh, field: &ScalarField, a: f64) -> Result<LevelSetSurface, LevelSetError> {
    assert_eq!(field.len(), mesh.num_vertices(), "field size mismatch");
    let (min, max) = field.range().unwrap_or((f64::NAN, f64::NAN));
    if !(a > min && a < max) {
        return Err(LevelSetError::ValueOutOfRange { value: a, min, max });
    }
    let values = field.values();
    let (level, nudged) = nudge(values, a);

    let per_tet: Vec<Vec<[usize; 3]>> = (0..mesh.num_tets())
        .into_par_iter()
        .map(|t| tet_facets(mesh, values, level, t))
        .collect();

    let mut vertex_of_edge: HashMap<usize, usize> = HashMap::new();
    let mut source_edges = Vec::new();
    let mut points = Vec::new();
    let mut triangles = Vec::new();
    let mut triangle_tets = Vec::new();
    for (t, facets) in per_tet.into_iter().enumerate() {
        for facet in facets {
            let tri = facet.map(|edge| {
                *vertex_of_edge.entry(edge).or_insert_with(|| {
                    let [u, v] = mesh.edges()[edge];
                    let (fu, fv) = (values[u], values[v]);
                    let s = (level - fu) / (fv - fu);
                    let (pu, pv) = (mesh.position(u), mesh.position(v));
                    points.push(pu + (pv - pu) * s);
                    source_edges.push(edge);
                    points.len() - 1
                })
            });
            triangles.push(tri);
            triangle_tets.push(t);
        }
    }
    Ok(LevelSetSurface {
        requested: a,
        level,
        nudged,
        points,
        source_edges,
        triangles,
        triangle_tets,
    })
}

/// All simplices whose vertices have values `<= a`.
pub fn extract_sublevel_complex<'m>(mesh: &'m TetMesh, field: &ScalarField, a: f64) -> SubComplex<'m> {
    assert_eq!(field.len(), mesh.num_vertices(), "field size mismatch");
    mesh.induced(|v| field.value(v) <= a)
}

/// Where the two level sets around a critical value are taken.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonPolicy {
    /// Midway to the neighbouring critical value, or to the field extreme.
    #[default]
    MidGap,
    /// A fixed offset, clipped to the mid-gap point when the gap is smaller.
    Fixed(f64),
}

/// Allowed changes of `(b0, b1, b2)` across a saddle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransitionPattern {
    /// 1-saddle, `(0, +2, 0)`.
    #[serde(rename = "b1+2")]
    GenusUp,
    /// 1-saddle, `(-1, 0, -1)`.
    #[serde(rename = "b0-1,b2-1")]
    ClosedMerge,
    /// 2-saddle, `(0, -2, 0)`.
    #[serde(rename = "b1-2")]
    GenusDown,
    /// 2-saddle, `(+1, 0, +1)`.
    #[serde(rename = "b0+1,b2+1")]
    ClosedSplit,
}

impl TransitionPattern {
    pub fn delta(self) -> [i64; 3] {
        match self {
            TransitionPattern::GenusUp => [0, 2, 0],
            TransitionPattern::ClosedMerge => [-1, 0, -1],
            TransitionPattern::GenusDown => [0, -2, 0],
            TransitionPattern::ClosedSplit => [1, 0, 1],
        }
    }

    pub fn allowed(kind: CriticalKind) -> &'static [TransitionPattern] {
        match kind {
            CriticalKind::Saddle1 => &[TransitionPattern::GenusUp, TransitionPattern::ClosedMerge],
            CriticalKind::Saddle2 => &[TransitionPattern::GenusDown, TransitionPattern::ClosedSplit],
            _ => &[],
        }
    }

    pub fn matching(kind: CriticalKind, delta: [i64; 3]) -> Option<Self> {
        Self::allowed(kind).iter().copied().find(|p| p.delta() == delta)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub vertex: usize,
    pub kind: CriticalKind,
    pub value: f64,
    pub level_below: f64,
    pub level_above: f64,
    pub betti_below: [usize; 3],
    pub betti_above: [usize; 3],
    pub delta: [i64; 3],
    pub pattern: Option<TransitionPattern>,
}

/// Level-set Betti numbers sampled strictly inside one interval between
/// consecutive anchors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub lower: f64,
    pub upper: f64,
    pub samples: Vec<f64>,
    pub betti: Vec<[usize; 3]>,
}

impl IntervalRecord {
    pub fn is_constant(&self) -> bool {
        self.betti.windows(2).all(|w| w[0] == w[1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionAnalysis {
    pub transitions: Vec<TransitionRecord>,
    pub intervals: Vec<IntervalRecord>,
    pub net_delta: [i64; 3],
}

impl TransitionAnalysis {
    pub fn all_matched(&self) -> bool {
        self.transitions.iter().all(|t| t.pattern.is_some())
    }

    pub fn all_constant(&self) -> bool {
        self.intervals.iter().all(IntervalRecord::is_constant)
    }

    /// Betti numbers of the first and last sampled level sets.
    pub fn end_betti(&self) -> Option<([usize; 3], [usize; 3])> {
        let first = self.intervals.first()?.betti.first()?;
        let last = self.intervals.last()?.betti.last()?;
        Some((*first, *last))
    }
}

fn level_betti(mesh: &TetMesh, field: &ScalarField, a: f64) -> Result<[usize; 3], LevelSetError> {
    Ok(extract_level_set(mesh, field, a)?.betti().surface_triple())
}

fn diff(a: [usize; 3], b: [usize; 3]) -> [i64; 3] {
    [0, 1, 2].map(|k| a[k] as i64 - b[k] as i64)
}

/// Measures Betti changes across every interior critical value and samples
/// `samples_per_interval` levels inside every gap. Never fails on unmatched
/// patterns; see [`verify_transitions`].
pub fn analyze_transitions(
    mesh: &TetMesh,
    field: &TieBreakField,
    report: &CriticalReport,
    policy: EpsilonPolicy,
    samples_per_interval: usize,
) -> Result<TransitionAnalysis, LevelSetError> {
    let f = field.field();
    let (min, max) = f.range().ok_or(LevelSetError::ValueOutOfRange {
        value: f64::NAN,
        min: f64::NAN,
        max: f64::NAN,
    })?;
    let crit: Vec<_> = critical_values(report)
        .into_iter()
        .filter(|c| c.value > min && c.value < max)
        .collect();
    for w in crit.windows(2) {
        if w[0].value == w[1].value {
            return Err(LevelSetError::NotIsolated {
                first: w[0].vertex,
                second: w[1].vertex,
                value: w[0].value,
            });
        }
    }
    let mut anchors = vec![min];
    anchors.extend(crit.iter().map(|c| c.value));
    anchors.push(max);

    let mut transitions = Vec::with_capacity(crit.len());
    let mut net = [0i64; 3];
    for (i, c) in crit.iter().enumerate() {
        let (lo, hi) = (anchors[i], anchors[i + 2]);
        let (below, above) = match policy {
            EpsilonPolicy::MidGap => (0.5 * (lo + c.value), 0.5 * (c.value + hi)),
            EpsilonPolicy::Fixed(eps) => (
                (c.value - eps).max(0.5 * (lo + c.value)),
                (c.value + eps).min(0.5 * (c.value + hi)),
            ),
        };
        let bb = level_betti(mesh, f, below)?;
        let ba = level_betti(mesh, f, above)?;
        let delta = diff(ba, bb);
        for k in 0..3 {
            net[k] += delta[k];
        }
        transitions.push(TransitionRecord {
            vertex: c.vertex,
            kind: c.kind,
            value: c.value,
            level_below: below,
            level_above: above,
            betti_below: bb,
            betti_above: ba,
            delta,
            pattern: TransitionPattern::matching(c.kind, delta),
        });
    }

    let n = samples_per_interval.max(1);
    let mut intervals = Vec::with_capacity(anchors.len() - 1);
    for w in anchors.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let samples: Vec<f64> = (1..=n).map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64).collect();
        let betti = samples
            .iter()
            .map(|&a| level_betti(mesh, f, a))
            .collect::<Result<Vec<_>, _>>()?;
        intervals.push(IntervalRecord {
            lower: lo,
            upper: hi,
            samples,
            betti,
        });
    }
    Ok(TransitionAnalysis {
        transitions,
        intervals,
        net_delta: net,
    })
}

/// [`analyze_transitions`] with at least three samples per interval, failing
/// on the first unmatched transition or non-constant interval.
pub fn verify_transitions(
    mesh: &TetMesh,
    field: &TieBreakField,
    report: &CriticalReport,
    policy: EpsilonPolicy,
) -> Result<TransitionAnalysis, LevelSetError> {
    let analysis = analyze_transitions(mesh, field, report, policy, 3)?;
    if let Some(t) = analysis.transitions.iter().find(|t| t.pattern.is_none()) {
        return Err(LevelSetError::PatternMismatch {
            vertex: t.vertex,
            kind: t.kind,
            delta: t.delta,
        });
    }
    if let Some(iv) = analysis.intervals.iter().find(|iv| !iv.is_constant()) {
        return Err(LevelSetError::NotConstant {
            lower: iv.lower,
            upper: iv.upper,
            betti: iv.betti.clone(),
        });
    }
    Ok(analysis)
}
