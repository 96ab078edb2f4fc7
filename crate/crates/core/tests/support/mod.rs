#![allow(dead_code)]

//! Shared fixtures and independent oracles for the integration tests.

use rand::Rng;
use sweeptopo::{Point, ScalarField, SubComplex, TetMesh};

/// Betti numbers over Z/2 by dense Gaussian elimination of the boundary
/// matrices of the closure of `simplices`. Shares no code with the library.
pub fn dense_betti(simplices: &[Vec<usize>]) -> [usize; 4] {
    let mut by_dim: [Vec<Vec<usize>>; 4] = Default::default();
    for s in simplices {
        let mut s = s.clone();
        s.sort_unstable();
        s.dedup();
        // Every non-empty subset is a face.
        for mask in 1u32..(1 << s.len()) {
            let face: Vec<usize> = (0..s.len()).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect();
            by_dim[face.len() - 1].push(face);
        }
    }
    for d in &mut by_dim {
        d.sort();
        d.dedup();
    }
    let mut ranks = [0usize; 5];
    for k in 1..4 {
        let rows = &by_dim[k - 1];
        let matrix: Vec<Vec<u8>> = by_dim[k]
            .iter()
            .map(|s| {
                let mut col = vec![0u8; rows.len()];
                for skip in 0..s.len() {
                    let face: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                    let r = rows.binary_search(&face).expect("closure is missing a face");
                    col[r] ^= 1;
                }
                col
            })
            .collect();
        ranks[k] = gf2_rank(matrix);
    }
    [0, 1, 2, 3].map(|k| by_dim[k].len() - ranks[k] - ranks[k + 1])
}

fn gf2_rank(mut rows: Vec<Vec<u8>>) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] == 1) else { continue };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] == 1 {
                for k in c..width {
                    rows[r][k] ^= rows[rank][k];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Maximal simplices of a subcomplex as vertex lists.
pub fn simplices_of(sub: &SubComplex<'_>) -> Vec<Vec<usize>> {
    let m = sub.mesh();
    let mut out: Vec<Vec<usize>> = sub.vertices().iter().map(|&v| vec![v]).collect();
    out.extend(sub.edges().iter().map(|&e| m.edges()[e].to_vec()));
    out.extend(sub.faces().iter().map(|&f| m.faces()[f].to_vec()));
    out.extend(sub.tets().iter().map(|&t| m.tet(t).to_vec()));
    out
}

/// Triangles of the seven-vertex torus.
pub fn torus7() -> Vec<[usize; 3]> {
    (0..7)
        .flat_map(|i| [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 2) % 7, (i + 3) % 7]])
        .collect()
}

/// Random closed subcomplex: each simplex of each dimension is kept with
/// probability `p`, then closed.
pub fn random_subcomplex<'m>(mesh: &'m TetMesh, rng: &mut impl Rng, p: f64) -> SubComplex<'m> {
    let pick = |n: usize, rng: &mut dyn rand::RngCore| -> Vec<usize> { (0..n).filter(|_| rng.random_bool(p)).collect() };
    let verts = pick(mesh.num_vertices(), rng);
    let edges = pick(mesh.num_edges(), rng);
    let faces = pick(mesh.num_faces(), rng);
    let tets = pick(mesh.num_tets(), rng);
    SubComplex::closure(mesh, verts, edges, faces, tets)
}

pub fn linear_field(mesh: &TetMesh, a: [f64; 3], b: f64) -> ScalarField {
    ScalarField::new(mesh.positions().iter().map(|p| a[0] * p.x + a[1] * p.y + a[2] * p.z + b).collect())
}

pub fn random_field(n: usize, rng: &mut impl Rng) -> ScalarField {
    ScalarField::new((0..n).map(|_| rng.random::<f64>()).collect())
}

/// A solid torus: an `n x 3 x 3` Kuhn block bent around a circle, with the
/// two end layers identified.
pub fn solid_torus(n: usize) -> TetMesh {
    assert!(n >= 3);
    let id = |i: usize, j: usize, k: usize| (i % n) + n * (j + 4 * k);
    let mut positions = vec![Point::origin(); n * 16];
    for k in 0..4 {
        for j in 0..4 {
            for i in 0..n {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                let r = 4.0 + j as f64;
                positions[id(i, j, k)] = Point::new(r * a.cos(), r * a.sin(), k as f64);
            }
        }
    }
    let mut tets = Vec::new();
    for k in 0..3 {
        for j in 0..3 {
            for i in 0..n {
                let c = |d: [usize; 3]| id(i + d[0], j + d[1], k + d[2]);
                for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                    let mut d = [0usize; 3];
                    let mut t = [c(d); 4];
                    for (s, &axis) in perm.iter().enumerate() {
                        d[axis] = 1;
                        t[s + 1] = c(d);
                    }
                    tets.push(t);
                }
            }
        }
    }
    TetMesh::new(positions, tets).expect("solid torus is a valid mesh")
}
