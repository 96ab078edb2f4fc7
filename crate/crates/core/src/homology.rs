//! Z/2 homology of simplicial complexes of dimension at most 3.
//!
//! Everything is computed from sparse boundary matrices. Each column is a
//! sorted list of row indices; reduction adds earlier columns with the same
//! lowest row until the lowest row is unique. The number of non-zero reduced
//! columns is the rank. Reduction runs from the top dimension down so that
//! columns known to be cycles can be cleared without touching them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::union_find::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("complex contains {0} tetrahedra; reduced Betti numbers are defined here for complexes of dimension at most 2")]
    ComplexTooHighDimensional(usize),
    #[error("edge {edge} has {faces} incident triangles; not a surface")]
    NotASurface { edge: usize, faces: usize },
}

/// Betti numbers over Z/2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BettiNumbers {
    pub b0: usize,
    pub b1: usize,
    pub b2: usize,
    pub b3: usize,
}

impl BettiNumbers {
    pub const fn new(b0: usize, b1: usize, b2: usize, b3: usize) -> Self {
        Self { b0, b1, b2, b3 }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.b0 as i64 - self.b1 as i64 + self.b2 as i64 - self.b3 as i64
    }

    /// `(b0, b1, b2)`, the part that is meaningful for surfaces.
    pub fn surface_triple(&self) -> [usize; 3] {
        [self.b0, self.b1, self.b2]
    }
}

impl std::fmt::Display for BettiNumbers {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{},{})", self.b0, self.b1, self.b2, self.b3)
    }
}

/// Reduced Betti numbers of a complex of dimension at most 2, indexed
/// -1 through 2. `bm1` is 1 exactly for the empty complex.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedBetti {
    pub bm1: usize,
    pub b0: usize,
    pub b1: usize,
    pub b2: usize,
}

impl ReducedBetti {
    pub const fn new(bm1: usize, b0: usize, b1: usize, b2: usize) -> Self {
        Self { bm1, b0, b1, b2 }
    }

    pub fn is_zero(&self) -> bool {
        self.bm1 == 0 && self.b0 == 0 && self.b1 == 0 && self.b2 == 0
    }

    pub fn as_array(&self) -> [usize; 4] {
        [self.bm1, self.b0, self.b1, self.b2]
    }

    fn from_betti(b: BettiNumbers, empty: bool) -> Self {
        if empty {
            Self::new(1, 0, 0, 0)
        } else {
            Self::new(0, b.b0 - 1, b.b1, b.b2)
        }
    }
}

/// A simplicial complex stored as boundary incidences with local indices:
/// edges list their two vertices, triangles their three edges, tetrahedra
/// their four triangles.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Complex {
    num_vertices: usize,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    tets: Vec<[usize; 4]>,
}

impl Complex {
    /// Builds from boundary incidences. Indices must be in range; this is
    /// checked.
    pub fn from_incidences(
        num_vertices: usize,
        edges: Vec<[usize; 2]>,
        triangles: Vec<[usize; 3]>,
        tets: Vec<[usize; 4]>,
    ) -> Self {
        assert!(edges.iter().flatten().all(|&v| v < num_vertices));
        assert!(triangles.iter().flatten().all(|&e| e < edges.len()));
        assert!(tets.iter().flatten().all(|&t| t < triangles.len()));
        Self {
            num_vertices,
            edges,
            triangles,
            tets,
        }
    }

    /// Closure of a list of simplices given by vertex labels (1 to 4 labels
    /// each). Labels need not be contiguous; they are compacted.
    pub fn from_simplices<S: AsRef<[usize]>>(simplices: &[S]) -> Self {
        let mut verts: Vec<usize> = Vec::new();
        let mut e: Vec<[usize; 2]> = Vec::new();
        let mut t: Vec<[usize; 3]> = Vec::new();
        let mut q: Vec<[usize; 4]> = Vec::new();
        for s in simplices {
            let mut s = s.as_ref().to_vec();
            s.sort_unstable();
            s.dedup();
            match s.len() {
                1 => verts.push(s[0]),
                2 => e.push([s[0], s[1]]),
                3 => t.push([s[0], s[1], s[2]]),
                4 => q.push([s[0], s[1], s[2], s[3]]),
                n => panic!("simplex with {n} distinct vertices"),
            }
        }
        for x in &q {
            for skip in 0..4 {
                t.push(drop_one(x, skip));
            }
        }
        for x in &t {
            e.push([x[1], x[2]]);
            e.push([x[0], x[2]]);
            e.push([x[0], x[1]]);
        }
        for x in &e {
            verts.extend_from_slice(x);
        }
        verts.sort_unstable();
        verts.dedup();
        e.sort_unstable();
        e.dedup();
        t.sort_unstable();
        t.dedup();
        q.sort_unstable();
        q.dedup();

        let vid = |v: usize| verts.binary_search(&v).unwrap();
        let eid = |a: usize, b: usize| e.binary_search(&[a, b]).unwrap();
        let tid = |x: [usize; 3]| t.binary_search(&x).unwrap();
        let edges = e.iter().map(|&[a, b]| [vid(a), vid(b)]).collect();
        let triangles = t
            .iter()
            .map(|&[a, b, c]| [eid(b, c), eid(a, c), eid(a, b)])
            .collect();
        let tets = q
            .iter()
            .map(|x| {
                [
                    tid(drop_one(x, 0)),
                    tid(drop_one(x, 1)),
                    tid(drop_one(x, 2)),
                    tid(drop_one(x, 3)),
                ]
            })
            .collect();
        Self {
            num_vertices: verts.len(),
            edges,
            triangles,
            tets,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }
    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }

    pub fn counts(&self) -> [usize; 4] {
        [
            self.num_vertices,
            self.edges.len(),
            self.triangles.len(),
            self.tets.len(),
        ]
    }

    pub fn is_empty(&self) -> bool {
        self.num_vertices == 0
    }

    pub fn euler_characteristic(&self) -> i64 {
        let [v, e, f, t] = self.counts();
        v as i64 - e as i64 + f as i64 - t as i64
    }

    /// Number of connected components by union-find over edges.
    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.num_vertices);
        for &[a, b] in &self.edges {
            uf.union(a, b);
        }
        uf.num_sets()
    }
}

fn drop_one<const N: usize, const M: usize>(x: &[usize; N], skip: usize) -> [usize; M] {
    let mut out = [0; M];
    let mut k = 0;
    for (i, &v) in x.iter().enumerate() {
        if i != skip {
            out[k] = v;
            k += 1;
        }
    }
    out
}

/// Anything whose homology can be taken.
pub trait ToComplex {
    fn to_complex(&self) -> Complex;
}

impl ToComplex for Complex {
    fn to_complex(&self) -> Complex {
        self.clone()
    }
}

/// Sparse Z/2 column reduction. Returns the number of non-zero reduced
/// columns and the set of pivot rows. Columns listed in `cleared` are known
/// to reduce to zero and are skipped.
fn reduce_rank(columns: impl Iterator<Item = Vec<usize>>, num_rows: usize, cleared: &[bool]) -> (usize, Vec<bool>) {
    const NONE: usize = usize::MAX;
    let mut pivot_col = vec![NONE; num_rows];
    let mut reduced: Vec<Vec<usize>> = Vec::new();
    let mut is_pivot_row = vec![false; num_rows];
    let mut rank = 0;
    for (j, mut col) in columns.enumerate() {
        if cleared.get(j).copied().unwrap_or(false) {
            continue;
        }
        col.sort_unstable();
        while let Some(&low) = col.last() {
            let k = pivot_col[low];
            if k == NONE {
                pivot_col[low] = reduced.len();
                is_pivot_row[low] = true;
                rank += 1;
                break;
            }
            col = symmetric_difference(&col, &reduced[k]);
        }
        if !col.is_empty() {
            reduced.push(col);
        }
    }
    (rank, is_pivot_row)
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Betti numbers over Z/2 by rank reduction of the boundary matrices.
pub fn betti(complex: &impl ToComplex) -> BettiNumbers {
    betti_of(&complex.to_complex())
}

fn betti_of(c: &Complex) -> BettiNumbers {
    let [nv, ne, nf, nt] = c.counts();
    let (r3, cleared_f) = reduce_rank(c.tets.iter().map(|x| x.to_vec()), nf, &[]);
    let (r2, cleared_e) = reduce_rank(c.triangles.iter().map(|x| x.to_vec()), ne, &cleared_f);
    let (r1, _) = reduce_rank(c.edges.iter().map(|x| x.to_vec()), nv, &cleared_e);
    let b = BettiNumbers::new(nv - r1, ne - r1 - r2, nf - r2 - r3, nt - r3);
    debug_assert_eq!(b.b0, c.components(), "rank-based b0 disagrees with union-find");
    b
}

/// Reduced Betti numbers; only for complexes without tetrahedra.
pub fn reduced_betti(complex: &impl ToComplex) -> Result<ReducedBetti, HomologyError> {
    let c = complex.to_complex();
    if !c.tets.is_empty() {
        return Err(HomologyError::ComplexTooHighDimensional(c.tets.len()));
    }
    Ok(ReducedBetti::from_betti(betti_of(&c), c.is_empty()))
}

/// Combinatorial summary of a 2-complex in which every edge has at most two
/// incident triangles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurfaceSummary {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub components: usize,
    /// Edge-connected triangle clusters without boundary edges.
    pub closed_components: usize,
    pub boundary_edges: usize,
    pub boundary_loops: usize,
}

impl SurfaceSummary {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.triangles as i64
    }

    pub fn betti(&self) -> BettiNumbers {
        let b0 = self.components;
        let b2 = self.closed_components;
        let b1 = b0 as i64 + b2 as i64 - self.euler_characteristic();
        BettiNumbers::new(b0, b1 as usize, b2, 0)
    }
}

/// Summarizes a complex that must have no tetrahedra and at most two
/// triangles per edge.
pub fn surface_summary(c: &Complex) -> Result<SurfaceSummary, HomologyError> {
    if !c.tets.is_empty() {
        return Err(HomologyError::ComplexTooHighDimensional(c.tets.len()));
    }
    let mut edge_faces: Vec<[usize; 2]> = vec![[usize::MAX; 2]; c.edges.len()];
    let mut degree = vec![0usize; c.edges.len()];
    for (f, tri) in c.triangles.iter().enumerate() {
        for &e in tri {
            if degree[e] >= 2 {
                return Err(HomologyError::NotASurface {
                    edge: e,
                    faces: degree[e] + 1,
                });
            }
            edge_faces[e][degree[e]] = f;
            degree[e] += 1;
        }
    }
    let mut tri_uf = UnionFind::new(c.triangles.len());
    for (e, pair) in edge_faces.iter().enumerate() {
        if degree[e] == 2 {
            tri_uf.union(pair[0], pair[1]);
        }
    }
    let mut open_cluster = vec![false; c.triangles.len()];
    for (f, tri) in c.triangles.iter().enumerate() {
        if tri.iter().any(|&e| degree[e] == 1) {
            let r = tri_uf.find(f);
            open_cluster[r] = true;
        }
    }
    let closed_components = (0..c.triangles.len())
        .filter(|&f| tri_uf.find(f) == f && !open_cluster[f])
        .count();

    let mut loops_uf = UnionFind::new(c.num_vertices);
    let mut on_boundary = vec![false; c.num_vertices];
    let mut boundary_edges = 0;
    for (e, &[a, b]) in c.edges.iter().enumerate() {
        if degree[e] == 1 {
            boundary_edges += 1;
            loops_uf.union(a, b);
            on_boundary[a] = true;
            on_boundary[b] = true;
        }
    }
    let boundary_loops = (0..c.num_vertices)
        .filter(|&v| on_boundary[v] && loops_uf.find(v) == v)
        .count();

    Ok(SurfaceSummary {
        vertices: c.num_vertices,
        edges: c.edges.len(),
        triangles: c.triangles.len(),
        components: c.components(),
        closed_components,
        boundary_edges,
        boundary_loops,
    })
}

/// Betti numbers of a surface-like 2-complex without matrix reduction:
/// `b0` by union-find, `b2` from closed triangle clusters, `b1` from the
/// Euler characteristic.
pub fn surface_betti_fast(complex: &impl ToComplex) -> Result<BettiNumbers, HomologyError> {
    Ok(surface_summary(&complex.to_complex())?.betti())
}
