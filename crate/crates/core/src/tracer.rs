//! Descent along the piecewise-constant gradient of a PL field.
//!
//! A trace keeps track of the lowest-dimensional simplex containing its
//! current point (the carrier). At each step it looks at the tetrahedra
//! around the carrier and follows the steepest `-grad f` that points into
//! its tetrahedron. When no tetrahedron admits its own gradient, the trace
//! slides along a face with the in-plane gradient, and failing that along a
//! descending edge. Reaching an interior critical vertex ends the trace:
//! the descent direction there is not unique.

use nalgebra::{DMatrix, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::TieBreakField;
use crate::laplace::SweepBoundary;
use crate::mesh::{Point, TetMesh};
use crate::morse::classify_vertex;
use crate::ScalarField;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TracerError {
    #[error("tetrahedron {tet} is degenerate; its gradient is undefined")]
    DegenerateTet { tet: usize },
}

/// One gradient per tetrahedron.
#[derive(Clone, Debug, PartialEq)]
pub struct TetGradients {
    grads: Vec<Vector3<f64>>,
}

impl TetGradients {
    pub fn get(&self, t: usize) -> Vector3<f64> {
        self.grads[t]
    }
    pub fn as_slice(&self) -> &[Vector3<f64>] {
        &self.grads
    }
    pub fn len(&self) -> usize {
        self.grads.len()
    }
    pub fn is_empty(&self) -> bool {
        self.grads.is_empty()
    }

    /// Largest `|f_j - f_i - g . (p_j - p_i)|` over all vertex pairs of all
    /// tetrahedra, relative to the field's range.
    pub fn reconstruction_error(&self, mesh: &TetMesh, field: &ScalarField) -> f64 {
        let scale = field.range().map_or(1.0, |(a, b)| (b - a).abs().max(f64::MIN_POSITIVE));
        let mut worst = 0.0f64;
        for (t, g) in self.grads.iter().enumerate() {
            let tet = mesh.tet(t);
            for &i in &tet {
                for &j in &tet {
                    let pred = g.dot(&(mesh.position(j) - mesh.position(i)));
                    worst = worst.max((field.value(j) - field.value(i) - pred).abs() / scale);
                }
            }
        }
        worst
    }
}

pub fn compute_gradients(mesh: &TetMesh, field: &ScalarField) -> Result<TetGradients, TracerError> {
    assert_eq!(field.len(), mesh.num_vertices(), "field size mismatch");
    let grads = (0..mesh.num_tets())
        .into_par_iter()
        .map(|t| {
            let [a, b, c, d] = mesh.tet(t);
            let p0 = mesh.position(a);
            let rows = [b, c, d].map(|v| (mesh.position(v) - p0).transpose());
            let m = nalgebra::Matrix3::from_rows(&rows);
            let scale = rows.iter().map(|r| r.norm()).fold(0.0, f64::max);
            if !(m.determinant().abs() > 1e-14 * scale.powi(3)) {
                return Err(TracerError::DegenerateTet { tet: t });
            }
            let rhs = Vector3::new(
                field.value(b) - field.value(a),
                field.value(c) - field.value(a),
                field.value(d) - field.value(a),
            );
            m.lu().solve(&rhs).ok_or(TracerError::DegenerateTet { tet: t })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TetGradients { grads })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceStatus {
    ReachedBase,
    StalledAtVertex,
    StalledAtSaddle,
    LeftDomain,
}

impl TraceStatus {
    pub fn name(self) -> &'static str {
        match self {
            TraceStatus::ReachedBase => "reached-base",
            TraceStatus::StalledAtVertex => "stalled-at-vertex",
            TraceStatus::StalledAtSaddle => "stalled-at-saddle",
            TraceStatus::LeftDomain => "left-domain",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TracePath {
    /// Field value at the start: the sweep coordinate `u`.
    pub u: f64,
    pub points: Vec<Point>,
    pub values: Vec<f64>,
    /// A tetrahedron containing segment `k`.
    pub segment_tets: Vec<usize>,
    pub status: TraceStatus,
    /// Vertex where the trace stopped, for vertex stalls.
    pub stop_vertex: Option<usize>,
}

impl TracePath {
    pub fn end(&self) -> Point {
        *self.points.last().expect("a trace has at least one point")
    }

    /// `(s, t, u)` for a trace that reached the base. `(s, t)` is the end
    /// point's `xy`, which is only a chart of the base on the structured
    /// box, where the base is the unit square at `z = 0`.
    pub fn box_parameters(&self) -> Option<[f64; 3]> {
        (self.status == TraceStatus::ReachedBase).then(|| {
            let e = self.end();
            [e.x, e.y, self.u]
        })
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Closest approach to `q`, measured on the polyline.
    pub fn distance_to(&self, q: &Point) -> f64 {
        if self.points.len() == 1 {
            return (self.points[0] - q).norm();
        }
        self.points
            .windows(2)
            .map(|w| {
                let d = w[1] - w[0];
                let l2 = d.norm_squared();
                let s = if l2 > 0.0 { ((q - w[0]).dot(&d) / l2).clamp(0.0, 1.0) } else { 0.0 };
                (w[0] + d * s - q).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TraceOptions {
    /// A trace has reached the base once the field is at most this.
    pub base_tol: f64,
    pub max_steps: usize,
    /// Base points closer than this times the bounding-box diagonal are
    /// considered merged.
    pub weld_rel: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            base_tol: 1e-9,
            max_steps: 100_000,
            weld_rel: 1e-6,
        }
    }
}

/// Where a trace starts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Start {
    Vertex(usize),
    Point([f64; 3]),
}

const BARY_EPS: f64 = 1e-10;

/// Affine frame of a simplex: barycentrics `mu = B (x - q0)` for vertices
/// 1..k, and `lambda_0 = 1 - sum mu`.
struct Frame {
    verts: Vec<usize>,
    q0: Point,
    b: DMatrix<f64>,
}

impl Frame {
    fn new(mesh: &TetMesh, verts: &[usize]) -> Option<Self> {
        let q0 = mesh.position(verts[0]);
        let k = verts.len() - 1;
        let e = DMatrix::from_fn(3, k, |r, c| (mesh.position(verts[c + 1]) - q0)[r]);
        let g = e.transpose() * &e;
        let ginv = g.try_inverse()?;
        Some(Self {
            verts: verts.to_vec(),
            q0,
            b: ginv * e.transpose(),
        })
    }

    fn bary(&self, x: &Point) -> Vec<f64> {
        self.bary_dir(&(x - self.q0), 1.0)
    }

    /// Rates of change of the barycentrics along `d` (`affine = 0`), or the
    /// barycentrics of `q0 + d` (`affine = 1`).
    fn bary_dir(&self, d: &Vector3<f64>, affine: f64) -> Vec<f64> {
        let mu = &self.b * nalgebra::DVector::from_column_slice(d.as_slice());
        let mut out = Vec::with_capacity(mu.len() + 1);
        out.push(affine - mu.sum());
        out.extend(mu.iter());
        out
    }

    fn gradient(&self, values: &[f64]) -> Vector3<f64> {
        let f0 = values[self.verts[0]];
        let delta = nalgebra::DVector::from_iterator(self.verts.len() - 1, self.verts[1..].iter().map(|&v| values[v] - f0));
        let g = self.b.transpose() * delta;
        Vector3::new(g[0], g[1], g[2])
    }
}

struct Move {
    frame: Frame,
    dir: Vector3<f64>,
    rate: f64,
    tet: usize,
}

/// Reusable tracing context for one mesh and field.
pub struct Tracer<'a> {
    mesh: &'a TetMesh,
    field: TieBreakField,
    grads: &'a TetGradients,
    opts: TraceOptions,
    buckets: Buckets,
}

/// Uniform grid of tet bounding boxes for point location.
struct Buckets {
    lo: Point,
    cell: f64,
    dims: [usize; 3],
    tets: Vec<Vec<usize>>,
}

impl Buckets {
    fn new(mesh: &TetMesh) -> Self {
        let (lo, hi) = mesh.bounding_box();
        let n = (mesh.num_tets() as f64 / 4.0).cbrt().ceil().max(1.0) as usize;
        let cell = ((hi - lo).max() / n as f64).max(f64::MIN_POSITIVE);
        let dims = [0, 1, 2].map(|k| (((hi[k] - lo[k]) / cell).floor() as usize + 1).min(4 * n));
        let mut tets = vec![Vec::new(); dims[0] * dims[1] * dims[2]];
        let me = Self { lo, cell, dims, tets: Vec::new() };
        for (t, tv) in mesh.tets().iter().enumerate() {
            let mut a = [usize::MAX; 3];
            let mut b = [0usize; 3];
            for &v in tv {
                let c = me.cell_of(&mesh.position(v));
                for k in 0..3 {
                    a[k] = a[k].min(c[k]);
                    b[k] = b[k].max(c[k]);
                }
            }
            for i in a[0]..=b[0] {
                for j in a[1]..=b[1] {
                    for k in a[2]..=b[2] {
                        tets[me.flat([i, j, k])].push(t);
                    }
                }
            }
        }
        Self { tets, ..me }
    }

    fn cell_of(&self, x: &Point) -> [usize; 3] {
        [0, 1, 2].map(|k| (((x[k] - self.lo[k]) / self.cell).floor().max(0.0) as usize).min(self.dims[k] - 1))
    }

    fn flat(&self, c: [usize; 3]) -> usize {
        c[0] + self.dims[0] * (c[1] + self.dims[1] * c[2])
    }

    fn candidates(&self, x: &Point) -> &[usize] {
        &self.tets[self.flat(self.cell_of(x))]
    }
}

impl<'a> Tracer<'a> {
    pub fn new(mesh: &'a TetMesh, field: &ScalarField, grads: &'a TetGradients, opts: TraceOptions) -> Self {
        assert_eq!(grads.len(), mesh.num_tets(), "gradient count mismatch");
        Self {
            mesh,
            field: TieBreakField::new(field.clone()),
            grads,
            opts,
            buckets: Buckets::new(mesh),
        }
    }

    fn values(&self) -> &[f64] {
        self.field.field().values()
    }

    fn interp(&self, verts: &[usize], bary: &[f64]) -> (Point, f64) {
        let mut p = Vector3::zeros();
        let mut f = 0.0;
        for (&v, &l) in verts.iter().zip(bary) {
            p += self.mesh.position(v).coords * l;
            f += self.values()[v] * l;
        }
        (Point::from(p), f)
    }

    /// Tetrahedra containing every vertex of `carrier`.
    fn star(&self, carrier: &[usize]) -> Vec<usize> {
        let mut tets = self.mesh.vertex_tets(carrier[0]).to_vec();
        tets.retain(|&t| {
            let tv = self.mesh.tet(t);
            carrier.iter().all(|v| tv.contains(v))
        });
        tets.sort_unstable();
        tets
    }

    /// Whether moving along `d` from a point with carrier `carrier` stays
    /// inside `frame`'s simplex.
    fn admits(&self, frame: &Frame, carrier: &[usize], d: &Vector3<f64>) -> bool {
        let rates = frame.bary_dir(d, 0.0);
        let tol = rate_tolerance(&rates);
        frame.verts.iter().zip(&rates).all(|(v, &r)| carrier.contains(v) || r >= -tol)
    }

    fn best_move(&self, carrier: &[usize], star: &[usize]) -> Option<Move> {
        let mut best: Option<Move> = None;
        let consider = |m: Move, best: &mut Option<Move>| {
            if m.rate > 0.0 && best.as_ref().is_none_or(|b| m.rate > b.rate) {
                *best = Some(m);
            }
        };
        for &t in star {
            let g = self.grads.get(t);
            let d = -g;
            let Some(frame) = Frame::new(self.mesh, &self.mesh.tet(t)) else { continue };
            if self.admits(&frame, carrier, &d) {
                consider(Move { frame, dir: d, rate: g.norm_squared(), tet: t }, &mut best);
            }
        }
        if best.is_some() {
            return best;
        }
        // Faces and edges of the star that contain the carrier.
        for dim in [3usize, 2] {
            let mut seen: Vec<Vec<usize>> = Vec::new();
            for &t in star {
                let tv = self.mesh.tet(t);
                let subsets: Vec<Vec<usize>> = if dim == 3 {
                    (0..4).map(|skip| tv.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect()).collect()
                } else {
                    crate::mesh::TET_EDGE_PAIRS.iter().map(|&(a, b)| vec![tv[a], tv[b]]).collect()
                };
                for mut s in subsets {
                    s.sort_unstable();
                    if !carrier.iter().all(|v| s.contains(v)) || seen.contains(&s) {
                        continue;
                    }
                    seen.push(s.clone());
                    let Some(frame) = Frame::new(self.mesh, &s) else { continue };
                    let g = frame.gradient(self.values());
                    let d = -g;
                    if self.admits(&frame, carrier, &d) {
                        consider(Move { frame, dir: d, rate: g.norm_squared(), tet: t }, &mut best);
                    }
                }
            }
            if best.is_some() {
                return best;
            }
        }
        None
    }

    /// Locates a point: the containing tetrahedron's vertices with non-zero
    /// barycentrics, and those barycentrics.
    fn locate(&self, x: &Point) -> Option<(Vec<usize>, Vec<f64>)> {
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        for &t in self.buckets.candidates(x) {
            let Some(frame) = Frame::new(self.mesh, &self.mesh.tet(t)) else { continue };
            let l = frame.bary(x);
            let worst = l.iter().copied().fold(f64::INFINITY, f64::min);
            if best.as_ref().is_none_or(|b| worst > b.0) {
                best = Some((worst, t, l));
            }
        }
        let (worst, t, l) = best?;
        if worst < -1e-9 {
            return None;
        }
        Some(snap(&self.mesh.tet(t), &l))
    }

    fn is_interior_critical(&self, v: usize) -> bool {
        classify_vertex(self.mesh, &self.field, v).is_interior_critical()
    }

    pub fn trace(&self, start: Start) -> TracePath {
        let (mut carrier, mut bary) = match start {
            Start::Vertex(v) => (vec![v], vec![1.0]),
            Start::Point(p) => match self.locate(&Point::new(p[0], p[1], p[2])) {
                Some(c) => c,
                None => {
                    return TracePath {
                        u: f64::NAN,
                        points: vec![Point::new(p[0], p[1], p[2])],
                        values: vec![f64::NAN],
                        segment_tets: Vec::new(),
                        status: TraceStatus::LeftDomain,
                        stop_vertex: None,
                    }
                }
            },
        };
        let (mut x, mut fx) = self.interp(&carrier, &bary);
        let mut path = TracePath {
            u: fx,
            points: vec![x],
            values: vec![fx],
            segment_tets: Vec::new(),
            status: TraceStatus::StalledAtVertex,
            stop_vertex: None,
        };
        for _ in 0..self.opts.max_steps {
            if fx <= self.opts.base_tol {
                path.status = TraceStatus::ReachedBase;
                return path;
            }
            if carrier.len() == 1 && self.is_interior_critical(carrier[0]) {
                path.status = TraceStatus::StalledAtSaddle;
                path.stop_vertex = Some(carrier[0]);
                return path;
            }
            let star = self.star(&carrier);
            let Some(m) = self.best_move(&carrier, &star) else {
                path.stop_vertex = (carrier.len() == 1).then(|| carrier[0]);
                return path;
            };
            let l0 = m.frame.bary(&x);
            let dl = m.frame.bary_dir(&m.dir, 0.0);
            let tol = rate_tolerance(&dl);
            let mut t_exit = f64::INFINITY;
            for (i, (&l, &r)) in l0.iter().zip(&dl).enumerate() {
                if r < -tol && !(l <= 0.0 && !carrier.contains(&m.frame.verts[i])) {
                    t_exit = t_exit.min(l.max(0.0) / -r);
                }
            }
            // Stop exactly at the base if it comes first.
            let t_base = (fx - 0.0) / m.rate;
            let t = t_exit.min(t_base);
            if !(t.is_finite() && t > 0.0) {
                path.stop_vertex = (carrier.len() == 1).then(|| carrier[0]);
                return path;
            }
            let l1: Vec<f64> = l0.iter().zip(&dl).map(|(l, r)| (l + t * r).max(0.0)).collect();
            let (c, b) = snap(&m.frame.verts, &l1);
            carrier = c;
            bary = b;
            let (nx, nf) = self.interp(&carrier, &bary);
            let nf = if t == t_base { nf.min(fx - t * m.rate).max(0.0) } else { nf };
            if !(nf < fx) {
                // No progress: numerical dead end.
                path.stop_vertex = (carrier.len() == 1).then(|| carrier[0]);
                return path;
            }
            x = nx;
            fx = nf;
            path.points.push(x);
            path.values.push(fx);
            path.segment_tets.push(m.tet);
        }
        path
    }
}

/// Barycentric rates this far below zero, relative to the largest rate,
/// count as zero. Solver noise in the field tilts gradients by far more
/// than rounding error.
fn rate_tolerance(rates: &[f64]) -> f64 {
    1e-8 * rates.iter().fold(0.0f64, |m, r| m.max(r.abs()))
}

/// Drops near-zero barycentrics and renormalises.
fn snap(verts: &[usize], bary: &[f64]) -> (Vec<usize>, Vec<f64>) {
    let mut keep: Vec<(usize, f64)> = verts
        .iter()
        .zip(bary)
        .filter(|&(_, &l)| l > BARY_EPS)
        .map(|(&v, &l)| (v, l))
        .collect();
    if keep.is_empty() {
        let i = (0..bary.len()).max_by(|&a, &b| bary[a].total_cmp(&bary[b])).unwrap();
        keep.push((verts[i], 1.0));
    }
    keep.sort_unstable_by_key(|&(v, _)| v);
    let s: f64 = keep.iter().map(|&(_, l)| l).sum();
    keep.into_iter().map(|(v, l)| (v, l / s)).unzip()
}

pub fn trace_to_base(mesh: &TetMesh, field: &ScalarField, grads: &TetGradients, start: Start) -> TracePath {
    Tracer::new(mesh, field, grads, TraceOptions::default()).trace(start)
}

/// How census starts are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartSpec {
    /// Every `gamma1` vertex.
    Gamma1Vertices,
    /// Cell-centred `nx * ny` grid over the xy-extent of `gamma1`; each
    /// grid point starts on the highest `gamma1` boundary face above it.
    Grid { nx: usize, ny: usize },
}

impl StartSpec {
    pub fn starts(&self, mesh: &TetMesh, bc: &SweepBoundary) -> Vec<Start> {
        match *self {
            StartSpec::Gamma1Vertices => bc.gamma1().iter().map(|&v| Start::Vertex(v)).collect(),
            StartSpec::Grid { nx, ny } => grid_starts(mesh, bc.gamma1(), nx, ny),
        }
    }
}

fn grid_starts(mesh: &TetMesh, gamma1: &[usize], nx: usize, ny: usize) -> Vec<Start> {
    if gamma1.is_empty() || nx == 0 || ny == 0 {
        return Vec::new();
    }
    let inside = |v: &usize| gamma1.binary_search(v).is_ok();
    let faces: Vec<[Point; 3]> = (0..mesh.num_faces())
        .filter(|&f| mesh.is_boundary_face(f) && mesh.faces()[f].iter().all(inside))
        .map(|f| mesh.faces()[f].map(|v| mesh.position(v)))
        .collect();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for &v in gamma1 {
        let p = mesh.position(v);
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let mut out = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let x = lo[0] + (hi[0] - lo[0]) * (i as f64 + 0.5) / nx as f64;
            let y = lo[1] + (hi[1] - lo[1]) * (j as f64 + 0.5) / ny as f64;
            let mut top: Option<f64> = None;
            for [a, b, c] in &faces {
                // Barycentrics of (x, y) in the projected triangle.
                let det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
                if det.abs() < 1e-14 {
                    continue;
                }
                let l1 = ((x - a.x) * (c.y - a.y) - (c.x - a.x) * (y - a.y)) / det;
                let l2 = ((b.x - a.x) * (y - a.y) - (x - a.x) * (b.y - a.y)) / det;
                let l0 = 1.0 - l1 - l2;
                if l0 >= -1e-12 && l1 >= -1e-12 && l2 >= -1e-12 {
                    let z = l0 * a.z + l1 * b.z + l2 * c.z;
                    top = Some(top.map_or(z, |t: f64| t.max(z)));
                }
            }
            if let Some(z) = top {
                out.push(Start::Point([x, y, z]));
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StatusCounts {
    pub reached_base: usize,
    pub stalled_at_vertex: usize,
    pub stalled_at_saddle: usize,
    pub left_domain: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergedPair {
    pub first: usize,
    pub second: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceCensus {
    pub starts: usize,
    pub counts: StatusCounts,
    pub weld_tolerance: f64,
    /// Smallest distance between base points of two reached traces.
    pub min_separation: Option<f64>,
    pub merged_pairs: Vec<MergedPair>,
    /// Vertices at which traces stalled on an interior critical vertex.
    pub saddle_vertices: Vec<usize>,
}

impl TraceCensus {
    pub fn shows_non_injectivity(&self) -> bool {
        !self.merged_pairs.is_empty() || self.counts.stalled_at_saddle > 0
    }
}

pub fn trace_all(
    mesh: &TetMesh,
    field: &ScalarField,
    grads: &TetGradients,
    starts: &[Start],
    opts: TraceOptions,
) -> Vec<TracePath> {
    let tracer = Tracer::new(mesh, field, grads, opts);
    starts.par_iter().map(|&s| tracer.trace(s)).collect()
}

/// Summarises traces: status counts, base-point separation and merged
/// pairs.
pub fn census_of(mesh: &TetMesh, paths: &[TracePath], opts: TraceOptions) -> TraceCensus {
    let (lo, hi) = mesh.bounding_box();
    let weld = opts.weld_rel * (hi - lo).norm();
    let mut counts = StatusCounts::default();
    let mut saddle_vertices = Vec::new();
    for p in paths {
        match p.status {
            TraceStatus::ReachedBase => counts.reached_base += 1,
            TraceStatus::StalledAtVertex => counts.stalled_at_vertex += 1,
            TraceStatus::StalledAtSaddle => {
                counts.stalled_at_saddle += 1;
                saddle_vertices.extend(p.stop_vertex);
            }
            TraceStatus::LeftDomain => counts.left_domain += 1,
        }
    }
    saddle_vertices.sort_unstable();
    saddle_vertices.dedup();
    let mut ends: Vec<(usize, Point)> = paths
        .iter()
        .enumerate()
        .filter(|(_, p)| p.status == TraceStatus::ReachedBase)
        .map(|(i, p)| (i, p.end()))
        .collect();
    ends.sort_by(|a, b| a.1.x.total_cmp(&b.1.x).then(a.0.cmp(&b.0)));
    let mut min_sep: Option<f64> = None;
    let mut merged = Vec::new();
    for a in 0..ends.len() {
        for b in a + 1..ends.len() {
            let dx = ends[b].1.x - ends[a].1.x;
            if min_sep.is_some_and(|m| dx > m) && dx > weld {
                break;
            }
            let d = (ends[b].1 - ends[a].1).norm();
            min_sep = Some(min_sep.map_or(d, |m| m.min(d)));
            if d < weld {
                let (i, j) = (ends[a].0.min(ends[b].0), ends[a].0.max(ends[b].0));
                merged.push(MergedPair { first: i, second: j, distance: d });
            }
        }
    }
    merged.sort_by(|a, b| (a.first, a.second).cmp(&(b.first, b.second)));
    TraceCensus {
        starts: paths.len(),
        counts,
        weld_tolerance: weld,
        min_separation: min_sep,
        merged_pairs: merged,
        saddle_vertices,
    }
}

pub fn trace_census(
    mesh: &TetMesh,
    field: &ScalarField,
    grads: &TetGradients,
    starts: &[Start],
    opts: TraceOptions,
) -> TraceCensus {
    census_of(mesh, &trace_all(mesh, field, grads, starts, opts), opts)
}
