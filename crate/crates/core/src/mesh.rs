//! Homogeneous simplicial 3-complexes built from tetrahedra.
//!
//! A [`TetMesh`] owns vertex positions and tetrahedra and derives edge and
//! face tables keyed by sorted vertex tuples. Orientation is not tracked.
//! Construction validates that every vertex link is a 2-sphere (interior
//! vertices) or a disk (boundary vertices); nothing downstream has to cope
//! with non-manifold input.

use nalgebra::Point3;
use thiserror::Error;

use crate::field::TieBreakField;
use crate::homology::{surface_summary, Complex, ToComplex};

pub type Point = Point3<f64>;

const NONE: usize = usize::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeshError {
    #[error("mesh has no tetrahedra")]
    Empty,
    #[error("tetrahedron {tet} references vertex {vertex}, but only {num_vertices} vertices exist")]
    IndexOutOfRange {
        tet: usize,
        vertex: usize,
        num_vertices: usize,
    },
    #[error("tetrahedron {tet} repeats a vertex index: {vertices:?}")]
    DegenerateTet { tet: usize, vertices: [usize; 4] },
    #[error("tetrahedra {first} and {second} have the same vertices")]
    DuplicateTet { first: usize, second: usize },
    #[error("face {face:?} is shared by {count} tetrahedra")]
    NonManifoldFace { face: [usize; 3], count: usize },
    #[error("link of vertex {vertex} is not a {expected}: {reason}")]
    BadLink {
        vertex: usize,
        expected: &'static str,
        reason: String,
    },
}

/// Compressed adjacency lists.
#[derive(Clone, Debug, Default)]
struct Adjacency {
    offsets: Vec<usize>,
    items: Vec<usize>,
}

impl Adjacency {
    fn build(n: usize, pairs: impl Iterator<Item = (usize, usize)> + Clone) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for (k, _) in pairs.clone() {
            offsets[k + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut items = vec![0; offsets[n]];
        for (k, item) in pairs {
            items[fill[k]] = item;
            fill[k] += 1;
        }
        Self { offsets, items }
    }

    fn get(&self, k: usize) -> &[usize] {
        &self.items[self.offsets[k]..self.offsets[k + 1]]
    }
}

/// Immutable tetrahedral mesh with derived incidence tables.
#[derive(Clone, Debug)]
pub struct TetMesh {
    positions: Vec<Point>,
    tets: Vec<[usize; 4]>,
    edges: Vec<[usize; 2]>,
    faces: Vec<[usize; 3]>,
    /// `tet_faces[t][i]` is the face opposite local vertex `i` of `tets[t]`.
    tet_faces: Vec<[usize; 4]>,
    tet_edges: Vec<[usize; 6]>,
    /// `face_edges[f][i]` is the edge opposite local vertex `i` of `faces[f]`.
    face_edges: Vec<[usize; 3]>,
    face_tets: Vec<[usize; 2]>,
    vertex_tets: Adjacency,
    vertex_edges: Adjacency,
    vertex_faces: Adjacency,
    boundary_vertex: Vec<bool>,
}

/// Local vertex pairs of the six tetrahedron edges.
pub const TET_EDGE_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn sorted4(t: [usize; 4]) -> [usize; 4] {
    let mut s = t;
    s.sort_unstable();
    s
}

fn opposite_face(t: &[usize; 4], i: usize) -> [usize; 3] {
    let mut f = [0; 3];
    let mut k = 0;
    for (j, &v) in t.iter().enumerate() {
        if j != i {
            f[k] = v;
            k += 1;
        }
    }
    f.sort_unstable();
    f
}

fn edge_key(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

impl TetMesh {
    /// Builds and validates a mesh.
    pub fn new(positions: Vec<Point>, tets: Vec<[usize; 4]>) -> Result<Self, MeshError> {
        if tets.is_empty() {
            return Err(MeshError::Empty);
        }
        let nv = positions.len();
        for (t, tet) in tets.iter().enumerate() {
            if let Some(&v) = tet.iter().find(|&&v| v >= nv) {
                return Err(MeshError::IndexOutOfRange {
                    tet: t,
                    vertex: v,
                    num_vertices: nv,
                });
            }
            let s = sorted4(*tet);
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(MeshError::DegenerateTet {
                    tet: t,
                    vertices: *tet,
                });
            }
        }
        let mut keyed: Vec<([usize; 4], usize)> =
            tets.iter().enumerate().map(|(t, tet)| (sorted4(*tet), t)).collect();
        keyed.sort_unstable();
        if let Some(w) = keyed.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(MeshError::DuplicateTet {
                first: w[0].1.min(w[1].1),
                second: w[0].1.max(w[1].1),
            });
        }

        let mut faces: Vec<[usize; 3]> = Vec::with_capacity(tets.len() * 4);
        let mut edges: Vec<[usize; 2]> = Vec::with_capacity(tets.len() * 6);
        for tet in &tets {
            for i in 0..4 {
                faces.push(opposite_face(tet, i));
            }
            for &(a, b) in &TET_EDGE_PAIRS {
                edges.push(edge_key(tet[a], tet[b]));
            }
        }
        faces.sort_unstable();
        // Count multiplicities before dedup to catch non-manifold faces.
        let mut run = 1;
        for i in 1..=faces.len() {
            if i < faces.len() && faces[i] == faces[i - 1] {
                run += 1;
                continue;
            }
            if run > 2 {
                return Err(MeshError::NonManifoldFace {
                    face: faces[i - 1],
                    count: run,
                });
            }
            run = 1;
        }
        faces.dedup();
        edges.sort_unstable();
        edges.dedup();

        let face_id = |f: &[usize; 3]| faces.binary_search(f).expect("face table");
        let edge_id = |a: usize, b: usize| edges.binary_search(&edge_key(a, b)).expect("edge table");

        let mut tet_faces = Vec::with_capacity(tets.len());
        let mut tet_edges = Vec::with_capacity(tets.len());
        let mut face_tets = vec![[NONE; 2]; faces.len()];
        for (t, tet) in tets.iter().enumerate() {
            let mut tf = [0; 4];
            for (i, slot) in tf.iter_mut().enumerate() {
                let f = face_id(&opposite_face(tet, i));
                *slot = f;
                let ft = &mut face_tets[f];
                if ft[0] == NONE {
                    ft[0] = t;
                } else {
                    ft[1] = t;
                }
            }
            tet_faces.push(tf);
            let mut te = [0; 6];
            for (k, &(a, b)) in TET_EDGE_PAIRS.iter().enumerate() {
                te[k] = edge_id(tet[a], tet[b]);
            }
            tet_edges.push(te);
        }
        let face_edges = faces
            .iter()
            .map(|&[a, b, c]| [edge_id(b, c), edge_id(a, c), edge_id(a, b)])
            .collect();

        let mut boundary_vertex = vec![false; nv];
        for (f, ft) in face_tets.iter().enumerate() {
            if ft[1] == NONE {
                for &v in &faces[f] {
                    boundary_vertex[v] = true;
                }
            }
        }

        let vertex_tets = Adjacency::build(
            nv,
            tets.iter().enumerate().flat_map(|(t, tet)| tet.iter().map(move |&v| (v, t))),
        );
        let vertex_edges = Adjacency::build(
            nv,
            edges.iter().enumerate().flat_map(|(e, ed)| ed.iter().map(move |&v| (v, e))),
        );
        let vertex_faces = Adjacency::build(
            nv,
            faces.iter().enumerate().flat_map(|(f, fc)| fc.iter().map(move |&v| (v, f))),
        );

        let mesh = Self {
            positions,
            tets,
            edges,
            faces,
            tet_faces,
            tet_edges,
            face_edges,
            face_tets,
            vertex_tets,
            vertex_edges,
            vertex_faces,
            boundary_vertex,
        };
        mesh.validate_links()?;
        Ok(mesh)
    }

    fn validate_links(&self) -> Result<(), MeshError> {
        for v in 0..self.num_vertices() {
            if self.vertex_tets.get(v).is_empty() {
                // Unused vertices carry no link; they are not part of the complex.
                continue;
            }
            let boundary = self.boundary_vertex[v];
            let expected = if boundary { "disk" } else { "2-sphere" };
            let bad = |reason: String| MeshError::BadLink {
                vertex: v,
                expected,
                reason,
            };
            let link = self.link(v).to_complex();
            let s = surface_summary(&link).map_err(|e| bad(e.to_string()))?;
            if s.components != 1 {
                return Err(bad(format!("{} components", s.components)));
            }
            let chi = s.euler_characteristic();
            if boundary {
                if chi != 1 || s.boundary_loops != 1 {
                    return Err(bad(format!(
                        "Euler characteristic {chi}, {} boundary loops",
                        s.boundary_loops
                    )));
                }
            } else if chi != 2 || s.boundary_edges != 0 {
                return Err(bad(format!(
                    "Euler characteristic {chi}, {} boundary edges",
                    s.boundary_edges
                )));
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.positions.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }
    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }
    pub fn position(&self, v: usize) -> Point {
        self.positions[v]
    }
    /// Tetrahedra in input vertex order.
    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }
    pub fn tet(&self, t: usize) -> [usize; 4] {
        self.tets[t]
    }
    /// Edges as sorted vertex pairs, lexicographically ordered.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    /// Faces as sorted vertex triples, lexicographically ordered.
    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }
    pub fn tet_faces(&self, t: usize) -> [usize; 4] {
        self.tet_faces[t]
    }
    /// Edge ids of a tetrahedron in [`TET_EDGE_PAIRS`] order.
    pub fn tet_edges(&self, t: usize) -> [usize; 6] {
        self.tet_edges[t]
    }
    pub fn face_edges(&self, f: usize) -> [usize; 3] {
        self.face_edges[f]
    }

    /// The one or two tetrahedra containing face `f`.
    pub fn face_tets(&self, f: usize) -> impl Iterator<Item = usize> + '_ {
        self.face_tets[f].iter().copied().filter(|&t| t != NONE)
    }

    pub fn is_boundary_face(&self, f: usize) -> bool {
        self.face_tets[f][1] == NONE
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn boundary_vertices(&self) -> &[bool] {
        &self.boundary_vertex
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&edge_key(a, b)).ok()
    }

    pub fn face_id(&self, mut f: [usize; 3]) -> Option<usize> {
        f.sort_unstable();
        self.faces.binary_search(&f).ok()
    }

    pub fn vertex_tets(&self, v: usize) -> &[usize] {
        self.vertex_tets.get(v)
    }

    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        self.vertex_edges.get(v)
    }

    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        self.vertex_faces.get(v)
    }

    /// Vertices joined to `v` by an edge, ascending.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.vertex_edges(v).iter().map(move |&e| {
            let [a, b] = self.edges[e];
            if a == v {
                b
            } else {
                a
            }
        })
    }

    /// Ids of the `dim`-simplices containing `v` (the dimension-restricted
    /// star). For `dim == 0` this is just `v`.
    pub fn star(&self, v: usize, dim: usize) -> Vec<usize> {
        match dim {
            0 => vec![v],
            1 => self.vertex_edges(v).to_vec(),
            2 => self.vertex_faces(v).to_vec(),
            3 => self.vertex_tets(v).to_vec(),
            _ => panic!("no simplices of dimension {dim} in a 3-complex"),
        }
    }

    /// Faces of the tetrahedra around `v` that do not contain `v`.
    fn link_faces(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.vertex_tets(v).iter().map(move |&t| {
            let i = self.tets[t].iter().position(|&u| u == v).unwrap();
            self.tet_faces[t][i]
        })
    }

    /// All simplices of the closed star of `v` that are disjoint from `v`.
    pub fn link(&self, v: usize) -> SubComplex<'_> {
        let faces: Vec<usize> = self.link_faces(v).collect();
        SubComplex::closure_of_faces(self, faces)
    }

    /// The part of the link spanned by vertices that come before `v` in the
    /// field's total order.
    pub fn lower_link(&self, v: usize, field: &TieBreakField) -> SubComplex<'_> {
        assert_eq!(field.len(), self.num_vertices(), "field size mismatch");
        let lower = |u: usize| field.is_lower(u, v);
        let mut vertices: Vec<usize> = self.neighbors(v).filter(|&u| lower(u)).collect();
        vertices.sort_unstable();
        let mut faces = Vec::new();
        let mut edges = Vec::new();
        for f in self.link_faces(v) {
            let fv = self.faces[f];
            if fv.iter().all(|&u| lower(u)) {
                faces.push(f);
            }
            for (i, &e) in self.face_edges[f].iter().enumerate() {
                let [a, b] = opposite_pair(&fv, i);
                if lower(a) && lower(b) {
                    edges.push(e);
                }
            }
        }
        faces.sort_unstable();
        faces.dedup();
        edges.sort_unstable();
        edges.dedup();
        SubComplex {
            mesh: self,
            vertices,
            edges,
            faces,
            tets: Vec::new(),
        }
    }

    /// Boundary faces with their edges and vertices.
    pub fn boundary_surface(&self) -> SubComplex<'_> {
        let faces = (0..self.num_faces()).filter(|&f| self.is_boundary_face(f)).collect();
        SubComplex::closure_of_faces(self, faces)
    }

    /// The whole mesh as a subcomplex.
    pub fn full(&self) -> SubComplex<'_> {
        SubComplex {
            mesh: self,
            vertices: (0..self.num_vertices())
                .filter(|&v| !self.vertex_tets(v).is_empty())
                .collect(),
            edges: (0..self.num_edges()).collect(),
            faces: (0..self.num_faces()).collect(),
            tets: (0..self.num_tets()).collect(),
        }
    }

    /// Subcomplex of all simplices whose vertices all satisfy `keep`.
    pub fn induced(&self, keep: impl Fn(usize) -> bool) -> SubComplex<'_> {
        let keep_v: Vec<bool> = (0..self.num_vertices())
            .map(|v| !self.vertex_tets(v).is_empty() && keep(v))
            .collect();
        SubComplex {
            mesh: self,
            vertices: (0..self.num_vertices()).filter(|&v| keep_v[v]).collect(),
            edges: (0..self.num_edges())
                .filter(|&e| self.edges[e].iter().all(|&v| keep_v[v]))
                .collect(),
            faces: (0..self.num_faces())
                .filter(|&f| self.faces[f].iter().all(|&v| keep_v[v]))
                .collect(),
            tets: (0..self.num_tets())
                .filter(|&t| self.tets[t].iter().all(|&v| keep_v[v]))
                .collect(),
        }
    }

    /// Signed volume of tetrahedron `t` in input vertex order.
    pub fn signed_volume(&self, t: usize) -> f64 {
        let [a, b, c, d] = self.tets[t].map(|v| self.positions[v]);
        (b - a).cross(&(c - a)).dot(&(d - a)) / 6.0
    }

    /// Length of the longest edge; a convenient "cell diameter".
    pub fn max_edge_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|&[a, b]| (self.positions[a] - self.positions[b]).norm())
            .fold(0.0, f64::max)
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = self.positions[0];
        let mut hi = self.positions[0];
        for p in &self.positions {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }
}

fn opposite_pair(f: &[usize; 3], i: usize) -> [usize; 2] {
    match i {
        0 => [f[1], f[2]],
        1 => [f[0], f[2]],
        _ => [f[0], f[1]],
    }
}

/// A subcomplex of a [`TetMesh`], closed under taking faces. Simplex ids are
/// stored sorted per dimension.
#[derive(Clone, Debug)]
pub struct SubComplex<'m> {
    mesh: &'m TetMesh,
    vertices: Vec<usize>,
    edges: Vec<usize>,
    faces: Vec<usize>,
    tets: Vec<usize>,
}

impl<'m> SubComplex<'m> {
    fn closure_of_faces(mesh: &'m TetMesh, mut faces: Vec<usize>) -> Self {
        faces.sort_unstable();
        faces.dedup();
        let mut edges: Vec<usize> = faces.iter().flat_map(|&f| mesh.face_edges[f]).collect();
        edges.sort_unstable();
        edges.dedup();
        let mut vertices: Vec<usize> = faces.iter().flat_map(|&f| mesh.faces[f]).collect();
        vertices.sort_unstable();
        vertices.dedup();
        Self {
            mesh,
            vertices,
            edges,
            faces,
            tets: Vec::new(),
        }
    }

    /// Closure of an arbitrary set of simplex ids per dimension.
    pub fn closure(
        mesh: &'m TetMesh,
        vertices: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = usize>,
        faces: impl IntoIterator<Item = usize>,
        tets: impl IntoIterator<Item = usize>,
    ) -> Self {
        let mut t: Vec<usize> = tets.into_iter().collect();
        t.sort_unstable();
        t.dedup();
        let mut f: Vec<usize> = faces.into_iter().collect();
        f.extend(t.iter().flat_map(|&x| mesh.tet_faces[x]));
        f.sort_unstable();
        f.dedup();
        let mut e: Vec<usize> = edges.into_iter().collect();
        e.extend(f.iter().flat_map(|&x| mesh.face_edges[x]));
        e.sort_unstable();
        e.dedup();
        let mut v: Vec<usize> = vertices.into_iter().collect();
        v.extend(e.iter().flat_map(|&x| mesh.edges[x]));
        v.sort_unstable();
        v.dedup();
        Self {
            mesh,
            vertices: v,
            edges: e,
            faces: f,
            tets: t,
        }
    }

    pub fn mesh(&self) -> &'m TetMesh {
        self.mesh
    }
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }
    pub fn faces(&self) -> &[usize] {
        &self.faces
    }
    pub fn tets(&self) -> &[usize] {
        &self.tets
    }

    pub fn counts(&self) -> [usize; 4] {
        [
            self.vertices.len(),
            self.edges.len(),
            self.faces.len(),
            self.tets.len(),
        ]
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn euler_characteristic(&self) -> i64 {
        let [v, e, f, t] = self.counts();
        v as i64 - e as i64 + f as i64 - t as i64
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// True if every face of every member is also a member.
    pub fn is_closed(&self) -> bool {
        let has = |set: &[usize], x: usize| set.binary_search(&x).is_ok();
        self.tets.iter().all(|&t| self.mesh.tet_faces[t].iter().all(|&f| has(&self.faces, f)))
            && self
                .faces
                .iter()
                .all(|&f| self.mesh.face_edges[f].iter().all(|&e| has(&self.edges, e)))
            && self
                .edges
                .iter()
                .all(|&e| self.mesh.edges[e].iter().all(|&v| has(&self.vertices, v)))
    }

    /// True if `self` is contained in `other` simplex by simplex.
    pub fn is_subset_of(&self, other: &SubComplex<'_>) -> bool {
        let sub = |a: &[usize], b: &[usize]| a.iter().all(|x| b.binary_search(x).is_ok());
        sub(&self.vertices, &other.vertices)
            && sub(&self.edges, &other.edges)
            && sub(&self.faces, &other.faces)
            && sub(&self.tets, &other.tets)
    }
}

impl ToComplex for SubComplex<'_> {
    fn to_complex(&self) -> Complex {
        let local = |set: &[usize], x: usize| set.binary_search(&x).expect("subcomplex not closed");
        let edges = self
            .edges
            .iter()
            .map(|&e| self.mesh.edges[e].map(|v| local(&self.vertices, v)))
            .collect();
        let triangles = self
            .faces
            .iter()
            .map(|&f| self.mesh.face_edges[f].map(|e| local(&self.edges, e)))
            .collect();
        let tets = self
            .tets
            .iter()
            .map(|&t| self.mesh.tet_faces[t].map(|f| local(&self.faces, f)))
            .collect();
        Complex::from_incidences(self.vertices.len(), edges, triangles, tets)
    }
}

impl ToComplex for TetMesh {
    fn to_complex(&self) -> Complex {
        self.full().to_complex()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{betti, BettiNumbers};

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z)
    }

    pub(crate) fn single_tet() -> TetMesh {
        TetMesh::new(
            vec![p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.), p(0., 0., 1.)],
            vec![[0, 1, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn single_tet_tables() {
        let m = single_tet();
        assert_eq!((m.num_edges(), m.num_faces()), (6, 4));
        assert!((0..4).all(|f| m.is_boundary_face(f)));
        assert_eq!(m.boundary_surface().faces().len(), 4);
        for v in 0..4 {
            assert_eq!(m.star(v, 1).len(), 3);
            assert_eq!(m.star(v, 3), vec![0]);
            let l = m.link(v);
            assert_eq!(l.counts(), [3, 3, 1, 0]);
            assert!(!l.contains_vertex(v));
            assert_eq!(l.euler_characteristic(), 1);
        }
        assert!((m.signed_volume(0) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn two_tets_share_a_face() {
        let m = TetMesh::new(
            vec![p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.), p(0., 0., 1.), p(1., 1., 1.)],
            vec![[0, 1, 2, 3], [4, 1, 2, 3]],
        )
        .unwrap();
        let interior = (0..m.num_faces()).filter(|&f| !m.is_boundary_face(f)).count();
        assert_eq!(interior, 1);
        assert_eq!(m.num_faces() - interior, 6);
        assert_eq!(betti(&m.boundary_surface()), BettiNumbers::new(1, 0, 1, 0));
    }

    #[test]
    fn rejects_bad_input() {
        let pts = vec![p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.), p(0., 0., 1.)];
        assert_eq!(TetMesh::new(pts.clone(), vec![]).unwrap_err(), MeshError::Empty);
        assert!(matches!(
            TetMesh::new(pts.clone(), vec![[0, 1, 2, 2]]),
            Err(MeshError::DegenerateTet { tet: 0, .. })
        ));
        assert!(matches!(
            TetMesh::new(pts.clone(), vec![[0, 1, 2, 9]]),
            Err(MeshError::IndexOutOfRange { vertex: 9, .. })
        ));
        assert_eq!(
            TetMesh::new(pts, vec![[0, 1, 2, 3], [3, 2, 1, 0]]).unwrap_err(),
            MeshError::DuplicateTet { first: 0, second: 1 }
        );
    }

    #[test]
    fn rejects_triply_shared_face() {
        // Three apexes on a common base triangle 0-1-2.
        let pts = vec![
            p(0., 0., 0.),
            p(1., 0., 0.),
            p(0., 1., 0.),
            p(0.2, 0.2, 1.),
            p(0.2, 0.2, -1.),
            p(1., 1., 0.5),
        ];
        let err = TetMesh::new(pts, vec![[0, 1, 2, 3], [0, 1, 2, 4], [0, 1, 2, 5]]).unwrap_err();
        assert_eq!(
            err,
            MeshError::NonManifoldFace {
                face: [0, 1, 2],
                count: 3
            }
        );
    }

    #[test]
    fn rejects_bowtie_vertex() {
        // Two tetrahedra touching only at vertex 0: its link has two components.
        let pts = vec![
            p(0., 0., 0.),
            p(1., 0., 0.),
            p(0., 1., 0.),
            p(0., 0., 1.),
            p(-1., 0., 0.),
            p(0., -1., 0.),
            p(0., 0., -1.),
        ];
        let err = TetMesh::new(pts, vec![[0, 1, 2, 3], [0, 4, 5, 6]]).unwrap_err();
        assert!(matches!(err, MeshError::BadLink { vertex: 0, expected: "disk", .. }));
    }

    #[test]
    fn lower_link_extremes() {
        let m = single_tet();
        let f: TieBreakField = crate::field::ScalarField::new(vec![0.0, 1.0, 2.0, 3.0]).into();
        assert!(m.lower_link(0, &f).is_empty());
        let top = m.lower_link(3, &f);
        assert_eq!(top.counts(), m.link(3).counts());
        assert!(top.is_closed());
        let mid = m.lower_link(2, &f);
        assert_eq!(mid.counts(), [2, 1, 0, 0]);
        assert!(mid.is_subset_of(&m.link(2)));
    }

    #[test]
    fn closure_is_closed() {
        let m = single_tet();
        let c = SubComplex::closure(&m, [], [], [], [0]);
        assert!(c.is_closed());
        assert_eq!(c.counts(), [4, 6, 4, 1]);
        assert_eq!(betti(&c), BettiNumbers::new(1, 0, 0, 0));
    }
}
