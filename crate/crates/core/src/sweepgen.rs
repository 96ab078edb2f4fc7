//! Structured sweep domains.
//!
//! Every generated mesh is a Kuhn-subdivided box: each grid cube is cut into
//! six tetrahedra along its main diagonal, one per monotone lattice path
//! from the cube's low corner to its high corner.
//!
//! The counterexample keeps the box and moves the Dirichlet sets instead of
//! the vertices. `gamma0` is a strip across the bottom face (along x), bent
//! up both x-walls as arms and ending in two plates on the top face, one at
//! each x end. `gamma1` is the same shape turned a quarter turn and upside
//! down: a strip across the top face (along y), arms down the y-walls, and
//! plates on the bottom face. Each set therefore wraps around the middle of
//! the other, while the gap between a set's two plates keeps them apart.
//! With uniform weights the resulting sweep field has one interior 1-saddle
//! below one interior 2-saddle.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homology::{betti, surface_summary, BettiNumbers, ToComplex};
use crate::laplace::SweepBoundary;
use crate::mesh::{MeshError, Point, SubComplex, TetMesh};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepGenError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("gamma0 and gamma1 overlap at vertex {vertex}")]
    OverlappingBoundary { vertex: usize },
    #[error("warp is not locally invertible near {point:?} (Jacobian determinant {det:e})")]
    NonBijectiveWarp { point: [f64; 3], det: f64 },
    #[error("tetrahedron {tet} has non-positive volume {volume:e}")]
    InvertedElement { tet: usize, volume: f64 },
    #[error("sweep topology check failed: {condition}")]
    TopologyMismatch { condition: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Vertex index of lattice point `(i, j, k)`.
pub fn lattice_index(nx: usize, ny: usize, i: usize, j: usize, k: usize) -> usize {
    i + (nx + 1) * (j + (ny + 1) * k)
}

/// Kuhn tetrahedra of an `nx * ny * nz` grid, each positively oriented for
/// the unit-spaced lattice.
fn kuhn_tets(nx: usize, ny: usize, nz: usize) -> Vec<[usize; 4]> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut tets = Vec::with_capacity(6 * nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                for perm in PERMS {
                    let mut c = [i, j, k];
                    let mut tet = [lattice_index(nx, ny, i, j, k); 4];
                    for (s, &axis) in perm.iter().enumerate() {
                        c[axis] += 1;
                        tet[s + 1] = lattice_index(nx, ny, c[0], c[1], c[2]);
                    }
                    // The path tetrahedron's orientation is the permutation's sign.
                    if matches!(perm, [0, 2, 1] | [1, 0, 2] | [2, 1, 0]) {
                        tet.swap(2, 3);
                    }
                    tets.push(tet);
                }
            }
        }
    }
    tets
}

fn unit_lattice(nx: usize, ny: usize, nz: usize) -> Vec<Point> {
    let mut p = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                p.push(Point::new(i as f64 / nx as f64, j as f64 / ny as f64, k as f64 / nz as f64));
            }
        }
    }
    p
}

/// Unit box with `gamma0` the `z = 0` face and `gamma1` the `z = 1` face.
pub fn generate_box(nx: usize, ny: usize, nz: usize) -> Result<(TetMesh, SweepBoundary), SweepGenError> {
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(SweepGenError::InvalidParams(format!(
            "resolution ({nx}, {ny}, {nz}) must be at least 1 in every direction"
        )));
    }
    let mesh = TetMesh::new(unit_lattice(nx, ny, nz), kuhn_tets(nx, ny, nz))?;
    let layer = (nx + 1) * (ny + 1);
    let gamma0 = (0..layer).collect();
    let gamma1 = (nz * layer..(nz + 1) * layer).collect();
    Ok((mesh, SweepBoundary::new(gamma0, gamma1)))
}

/// A smooth position map of the unit box, applied after subdivision.
///
/// In order: `z += bulge * z * sin(pi x) sin(pi y)` domes the top face,
/// `x += bend * sin(pi z)` bows the columns, and `(x, y)` is rotated about
/// the box axis by `twist * (z - 1/2)` radians.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Warp {
    pub bulge: f64,
    pub bend: f64,
    pub twist: f64,
}

impl Warp {
    pub fn is_identity(&self) -> bool {
        self.bulge == 0.0 && self.bend == 0.0 && self.twist == 0.0
    }

    pub fn apply(&self, p: &Point) -> Point {
        use std::f64::consts::PI;
        let (x, y, z) = (p.x, p.y, p.z);
        let zw = z + self.bulge * z * (PI * x).sin() * (PI * y).sin();
        let xw = x + self.bend * (PI * z).sin();
        let theta = self.twist * (z - 0.5);
        let (s, c) = theta.sin_cos();
        let (dx, dy) = (xw - 0.5, y - 0.5);
        Point::new(0.5 + c * dx - s * dy, 0.5 + s * dx + c * dy, zw)
    }

    /// Jacobian determinant by central differences.
    pub fn jacobian_det(&self, p: &Point) -> f64 {
        let h = 1e-6;
        let col = |k: usize| {
            let mut a = *p;
            let mut b = *p;
            a[k] += h;
            b[k] -= h;
            (self.apply(&a) - self.apply(&b)) / (2.0 * h)
        };
        let (c0, c1, c2) = (col(0), col(1), col(2));
        c0.cross(&c1).dot(&c2)
    }
}

/// Parameters of the painted counterexample. Widths are fractions of the
/// half side `n / 2` and are rounded to whole cells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepParams {
    /// Cells along x and y; must be even.
    pub n: usize,
    /// Cells along z.
    pub nz: usize,
    /// Half width of each set's strip across its own face.
    pub bar_half_width: f64,
    /// Half width of the arms on the side walls.
    pub arm_half_width: f64,
    /// Fraction of the height the arms climb. At 1 the arms reach the
    /// opposite face and the plates are added.
    pub arm_reach: f64,
    /// Half of the gap between a set's two plates, measured from the centre.
    pub tip_gap: f64,
    /// Half width of the plates, across the plate direction.
    pub plate_half_width: f64,
    pub warp: Warp,
}

pub const DEFAULT_RESOLUTION: usize = 16;

impl Default for SweepParams {
    fn default() -> Self {
        Self {
            n: DEFAULT_RESOLUTION,
            nz: DEFAULT_RESOLUTION,
            bar_half_width: 0.125,
            arm_half_width: 0.125,
            arm_reach: 1.0,
            tip_gap: 0.25,
            plate_half_width: 1.0,
            warp: Warp::default(),
        }
    }
}

impl SweepParams {
    /// Parameters that reproduce [`generate_box`] exactly.
    pub fn identity(n: usize, nz: usize) -> Self {
        Self {
            n,
            nz,
            bar_half_width: 1.0,
            arm_half_width: 0.0,
            arm_reach: 0.0,
            tip_gap: 1.0,
            plate_half_width: 0.0,
            warp: Warp::default(),
        }
    }

    /// The defaults with every length scaled to `n` (even) and `nz` cells.
    /// Below `n = 16` the rounded bar and tip gap can coincide, which makes
    /// the two sets overlap.
    pub fn at_resolution(n: usize, nz: usize) -> Self {
        Self { n, nz, ..Self::default() }
    }

    fn cells(&self, frac: f64) -> usize {
        (frac * (self.n / 2) as f64).round() as usize
    }

    fn check(&self) -> Result<(), SweepGenError> {
        let bad = |m: String| Err(SweepGenError::InvalidParams(m));
        if self.n < 2 || self.n % 2 != 0 {
            return bad(format!("n = {} must be even and at least 2", self.n));
        }
        if self.nz < 1 {
            return bad("nz must be at least 1".into());
        }
        for (name, v) in [
            ("bar_half_width", self.bar_half_width),
            ("arm_half_width", self.arm_half_width),
            ("arm_reach", self.arm_reach),
            ("tip_gap", self.tip_gap),
            ("plate_half_width", self.plate_half_width),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} = {v} must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Lattice rule for the two Dirichlet sets.
fn paint(p: &SweepParams) -> (Vec<usize>, Vec<usize>) {
    let (n, nz) = (p.n, p.nz);
    let c = (n / 2) as i64;
    let w = p.cells(p.bar_half_width) as i64;
    let aw = p.cells(p.arm_half_width) as i64;
    let tip = p.cells(p.tip_gap) as i64;
    let pw = p.cells(p.plate_half_width) as i64;
    let reach = (p.arm_reach * nz as f64).round() as usize;
    let arms = reach > 0;
    let plates = reach == nz;
    let (mut g0, mut g1) = (Vec::new(), Vec::new());
    for k in 0..=nz {
        for j in 0..=n {
            for i in 0..=n {
                let (x, y) = (i as i64 - c, j as i64 - c);
                let (bot, top) = (k == 0, k == nz);
                let (xwall, ywall) = (x.abs() == c, y.abs() == c);
                let in0 = (bot && y.abs() <= w)
                    || (arms && xwall && y.abs() <= aw && k <= reach)
                    || (plates && top && y.abs() <= pw && x.abs() >= tip);
                let in1 = (top && x.abs() <= w)
                    || (arms && ywall && x.abs() <= aw && k >= nz - reach)
                    || (plates && bot && x.abs() <= pw && y.abs() >= tip);
                let v = lattice_index(n, n, i, j, k);
                if in0 {
                    g0.push(v);
                }
                if in1 {
                    g1.push(v);
                }
            }
        }
    }
    (g0, g1)
}

pub fn generate_counterexample(params: &SweepParams) -> Result<(TetMesh, SweepBoundary), SweepGenError> {
    params.check()?;
    let (n, nz) = (params.n, params.nz);
    let mut positions = unit_lattice(n, n, nz);
    if !params.warp.is_identity() {
        for p in &positions {
            let det = params.warp.jacobian_det(p);
            if !(det > 0.0) {
                return Err(SweepGenError::NonBijectiveWarp {
                    point: [p.x, p.y, p.z],
                    det,
                });
            }
        }
        for p in &mut positions {
            *p = params.warp.apply(p);
        }
    }
    let mesh = TetMesh::new(positions, kuhn_tets(n, n, nz))?;
    for t in 0..mesh.num_tets() {
        let volume = mesh.signed_volume(t);
        if !(volume > 0.0) {
            return Err(SweepGenError::InvertedElement { tet: t, volume });
        }
    }
    let (g0, g1) = paint(params);
    let bc = SweepBoundary::new(g0, g1);
    if let Some(&v) = bc.gamma0().iter().find(|v| bc.gamma1().binary_search(v).is_ok()) {
        return Err(SweepGenError::OverlappingBoundary { vertex: v });
    }
    Ok((mesh, bc))
}

/// Homology of one Dirichlet patch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchSummary {
    pub vertices: usize,
    pub triangles: usize,
    pub betti: BettiNumbers,
    pub boundary_loops: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepTopologyReport {
    pub mesh_betti: BettiNumbers,
    pub boundary_betti: BettiNumbers,
    pub gamma0: PatchSummary,
    pub gamma1: PatchSummary,
}

/// Boundary subcomplex spanned by a vertex set.
pub fn boundary_patch<'m>(mesh: &'m TetMesh, set: &[usize]) -> SubComplex<'m> {
    let inside = |v: &usize| set.binary_search(v).is_ok();
    let faces: Vec<usize> = (0..mesh.num_faces())
        .filter(|&f| mesh.is_boundary_face(f) && mesh.faces()[f].iter().all(inside))
        .collect();
    let edges: Vec<usize> = faces
        .iter()
        .flat_map(|&f| mesh.face_edges(f))
        .chain((0..mesh.num_edges()).filter(|&e| {
            mesh.edges()[e].iter().all(inside) && mesh.vertex_faces(mesh.edges()[e][0]).iter().any(|&f| {
                mesh.is_boundary_face(f) && mesh.face_edges(f).contains(&e)
            })
        }))
        .collect();
    SubComplex::closure(mesh, set.iter().copied(), edges, faces, [])
}

fn summarize(patch: &SubComplex<'_>) -> Result<PatchSummary, SweepGenError> {
    let s = surface_summary(&patch.to_complex()).map_err(|e| SweepGenError::TopologyMismatch {
        condition: format!("boundary patch is not a surface: {e}"),
    })?;
    Ok(PatchSummary {
        vertices: s.vertices,
        triangles: s.triangles,
        betti: betti(patch),
        boundary_loops: s.boundary_loops,
    })
}

/// Necessary conditions for the mesh to be `gamma0 x [0, 1]` with the given
/// ends.
pub fn validate_sweep_topology(mesh: &TetMesh, bc: &SweepBoundary) -> Result<SweepTopologyReport, SweepGenError> {
    let mismatch = |condition: String| SweepGenError::TopologyMismatch { condition };
    bc.validate(mesh).map_err(|e| mismatch(format!("boundary sets: {e}")))?;
    let gamma0 = summarize(&boundary_patch(mesh, bc.gamma0()))?;
    let gamma1 = summarize(&boundary_patch(mesh, bc.gamma1()))?;
    if gamma0.betti != gamma1.betti || gamma0.boundary_loops != gamma1.boundary_loops {
        return Err(mismatch(format!(
            "gamma0 (betti {}, {} boundary loops) and gamma1 (betti {}, {} boundary loops) differ",
            gamma0.betti, gamma0.boundary_loops, gamma1.betti, gamma1.boundary_loops
        )));
    }
    let mesh_betti = betti(mesh);
    let disk = gamma0.betti == BettiNumbers::new(1, 0, 0, 0) && gamma0.boundary_loops == 1;
    if disk && mesh_betti != BettiNumbers::new(1, 0, 0, 0) {
        return Err(mismatch(format!("gamma0 is a disk but the mesh has betti {mesh_betti}")));
    }
    Ok(SweepTopologyReport {
        mesh_betti,
        boundary_betti: betti(&mesh.boundary_surface()),
        gamma0,
        gamma1,
    })
}
