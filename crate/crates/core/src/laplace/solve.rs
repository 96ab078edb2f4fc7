use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{CsrMatrix, EdgeWeights, LaplaceError, SweepBoundary};
use crate::mesh::TetMesh;
use crate::ScalarField;

pub const DEFAULT_TOL: f64 = 1e-10;

/// Convergence details of a sweep solve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveInfo {
    pub free_vertices: usize,
    pub iterations: usize,
    /// `|b - Ax| / |b|` of the reduced system at exit.
    pub relative_residual: f64,
    /// Largest `|sum_j w_ij (f_i - f_j)| / sum_j |w_ij|` over free vertices.
    pub max_scaled_residual: f64,
}

pub fn solve_sweep(
    mesh: &TetMesh,
    weights: &EdgeWeights,
    bc: &SweepBoundary,
    tol: f64,
) -> Result<ScalarField, LaplaceError> {
    solve_sweep_with_info(mesh, weights, bc, tol).map(|(f, _)| f)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `L f = 0` on free vertices with `f = 0` on gamma0 and `f = 1` on
/// gamma1, by Jacobi-preconditioned conjugate gradients on the reduced
/// system. Stops once the true residual meets both the relative and the
/// per-vertex criterion.
pub fn solve_sweep_with_info(
    mesh: &TetMesh,
    weights: &EdgeWeights,
    bc: &SweepBoundary,
    tol: f64,
) -> Result<(ScalarField, SolveInfo), LaplaceError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(LaplaceError::BadTolerance(tol));
    }
    if weights.len() != mesh.num_edges() {
        return Err(LaplaceError::WeightCount {
            expected: mesh.num_edges(),
            found: weights.len(),
        });
    }
    bc.validate(mesh)?;
    let nv = mesh.num_vertices();
    let dirichlet = bc.dirichlet_values(nv);
    check_coupling(mesh, weights, &dirichlet)?;

    let free: Vec<usize> = (0..nv).filter(|&v| dirichlet[v].is_none()).collect();
    let mut local = vec![usize::MAX; nv];
    for (k, &v) in free.iter().enumerate() {
        local[v] = k;
    }
    let n = free.len();
    let mut triplets = Vec::new();
    let mut b = vec![0.0; n];
    let mut row_weight = vec![0.0; n];
    for (e, &[u, v]) in mesh.edges().iter().enumerate() {
        let w = weights.weight(e);
        if w == 0.0 {
            continue;
        }
        for (i, j) in [(u, v), (v, u)] {
            let li = local[i];
            if li == usize::MAX {
                continue;
            }
            triplets.push((li, li, w));
            row_weight[li] += w.abs();
            match dirichlet[j] {
                Some(d) => b[li] += w * d,
                None => triplets.push((li, local[j], -w)),
            }
        }
    }
    let a = CsrMatrix::from_triplets(n, triplets);
    let diag = a.diagonal();
    let inv: Vec<f64> = diag
        .iter()
        .zip(&row_weight)
        .map(|(&d, &w)| if d > 0.0 { 1.0 / d } else { 1.0 / w })
        .collect();

    let mut x = vec![0.0; n];
    let (iterations, rel, scaled) = pcg(&a, &b, &inv, &row_weight, &mut x, tol, 50 * n.max(1))?;

    let mut values: Vec<f64> = dirichlet.iter().map(|d| d.unwrap_or(0.0)).collect();
    for (k, &v) in free.iter().enumerate() {
        values[v] = x[k];
    }
    Ok((
        ScalarField::new(values),
        SolveInfo {
            free_vertices: n,
            iterations,
            relative_residual: rel,
            max_scaled_residual: scaled,
        },
    ))
}

/// Every free vertex must reach a Dirichlet vertex through non-zero weights,
/// otherwise the reduced system is singular.
fn check_coupling(mesh: &TetMesh, weights: &EdgeWeights, dirichlet: &[Option<f64>]) -> Result<(), LaplaceError> {
    let nv = mesh.num_vertices();
    let mut seen: Vec<bool> = dirichlet.iter().map(Option::is_some).collect();
    let mut queue: VecDeque<usize> = (0..nv).filter(|&v| seen[v]).collect();
    while let Some(v) = queue.pop_front() {
        for &e in mesh.vertex_edges(v) {
            if weights.weight(e) == 0.0 {
                continue;
            }
            let [a, b] = mesh.edges()[e];
            let u = if a == v { b } else { a };
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    match seen.iter().position(|&s| !s) {
        Some(vertex) => Err(LaplaceError::SingularSystem { vertex }),
        None => Ok(()),
    }
}

fn scaled_max(r: &[f64], row_weight: &[f64]) -> f64 {
    r.iter().zip(row_weight).map(|(x, w)| x.abs() / w).fold(0.0, f64::max)
}

fn pcg(
    a: &CsrMatrix,
    b: &[f64],
    inv_diag: &[f64],
    row_weight: &[f64],
    x: &mut [f64],
    tol: f64,
    cap: usize,
) -> Result<(usize, f64, f64), LaplaceError> {
    let n = b.len();
    let bnorm = norm(b);
    if n == 0 || bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok((0, 0.0, 0.0));
    }
    let precondition = |r: &[f64]| -> Vec<f64> { r.iter().zip(inv_diag).map(|(a, b)| a * b).collect() };
    let true_residual = |x: &[f64]| -> Vec<f64> {
        let ax = a.mul_vec(x);
        b.iter().zip(&ax).map(|(b, ax)| b - ax).collect()
    };
    let met = |r: &[f64]| norm(r) <= tol * bnorm && scaled_max(r, row_weight) <= tol;

    let mut r = b.to_vec();
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];
    for it in 0..=cap {
        if met(&r) {
            let rt = true_residual(x);
            if met(&rt) {
                return Ok((it, norm(&rt) / bnorm, scaled_max(&rt, row_weight)));
            }
            // Recursive residual drifted; restart from the true one.
            r = rt;
            z = precondition(&r);
            p.clone_from(&z);
            rz = dot(&r, &z);
        }
        if it == cap {
            break;
        }
        a.mul_vec_into(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0 && pq.is_finite()) {
            return Err(LaplaceError::SolverDiverged {
                iterations: it,
                residual: norm(&r) / bnorm,
            });
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        z = precondition(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(LaplaceError::SolverDiverged {
        iterations: cap,
        residual: norm(&true_residual(x)) / bnorm,
    })
}

/// Independent re-evaluation of the discrete Laplacian at free vertices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualCheck {
    pub free_vertices: usize,
    /// Largest `|sum_j w_ij (f_i - f_j)| / sum_j |w_ij|`.
    pub max_scaled_residual: f64,
    pub worst_vertex: Option<usize>,
}

impl ResidualCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_scaled_residual <= tol
    }
}

pub fn residual_check(mesh: &TetMesh, weights: &EdgeWeights, bc: &SweepBoundary, field: &ScalarField) -> ResidualCheck {
    let nv = mesh.num_vertices();
    let mut lap = vec![0.0; nv];
    let mut rw = vec![0.0; nv];
    for (e, &[u, v]) in mesh.edges().iter().enumerate() {
        let w = weights.weight(e);
        let d = field.value(u) - field.value(v);
        lap[u] += w * d;
        lap[v] -= w * d;
        rw[u] += w.abs();
        rw[v] += w.abs();
    }
    let mut out = ResidualCheck {
        free_vertices: 0,
        max_scaled_residual: 0.0,
        worst_vertex: None,
    };
    for v in (0..nv).filter(|&v| !bc.is_dirichlet(v)) {
        out.free_vertices += 1;
        let s = if rw[v] > 0.0 { lap[v].abs() / rw[v] } else { f64::INFINITY };
        if out.worst_vertex.is_none() || s > out.max_scaled_residual {
            out.max_scaled_residual = s;
            out.worst_vertex = Some(v);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// Strictly above every neighbour.
    LocalMaximum,
    /// Strictly below every neighbour.
    LocalMinimum,
    /// At or above the largest Dirichlet value.
    GlobalMaximum,
    /// At or below the smallest Dirichlet value.
    GlobalMinimum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub vertex: usize,
    pub value: f64,
    pub neighbor_min: f64,
    pub neighbor_max: f64,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxPrincipleReport {
    pub checked_vertices: usize,
    pub dirichlet_min: f64,
    pub dirichlet_max: f64,
    pub violations: Vec<Violation>,
}

impl MaxPrincipleReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists non-Dirichlet vertices that are strict local extrema among their
/// neighbours, or that reach the Dirichlet range's ends.
pub fn check_max_principle(mesh: &TetMesh, field: &ScalarField, bc: &SweepBoundary) -> MaxPrincipleReport {
    let d = bc.dirichlet_values(mesh.num_vertices());
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (v, dv) in d.iter().enumerate() {
        if dv.is_some() {
            lo = lo.min(field.value(v));
            hi = hi.max(field.value(v));
        }
    }
    let mut report = MaxPrincipleReport {
        checked_vertices: 0,
        dirichlet_min: lo,
        dirichlet_max: hi,
        violations: Vec::new(),
    };
    for v in 0..mesh.num_vertices() {
        if d[v].is_some() || mesh.vertex_edges(v).is_empty() {
            continue;
        }
        report.checked_vertices += 1;
        let x = field.value(v);
        let (nmin, nmax) = mesh
            .neighbors(v)
            .map(|u| field.value(u))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
        let kind = if x > nmax {
            Some(ViolationKind::LocalMaximum)
        } else if x < nmin {
            Some(ViolationKind::LocalMinimum)
        } else if x >= hi {
            Some(ViolationKind::GlobalMaximum)
        } else if x <= lo {
            Some(ViolationKind::GlobalMinimum)
        } else {
            None
        };
        if let Some(kind) = kind {
            report.violations.push(Violation {
                vertex: v,
                value: x,
                neighbor_min: nmin,
                neighbor_max: nmax,
                kind,
            });
        }
    }
    report
}
