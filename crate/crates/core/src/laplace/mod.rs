//! Discrete Laplace operators and the sweep Dirichlet problem.
//!
//! The operator is `(Lf)_i = sum_j w_ij (f_i - f_j)` over the edges at
//! vertex `i`. The sweep field is 0 on `gamma0`, 1 on `gamma1`, and has zero
//! Laplacian at every other vertex, boundary vertices included.

mod boundary;
mod csr;
mod solve;
mod weights;

pub use boundary::SweepBoundary;
pub use csr::CsrMatrix;
pub use solve::{
    check_max_principle, residual_check, solve_sweep, solve_sweep_with_info, MaxPrincipleReport,
    ResidualCheck, SolveInfo, Violation, ViolationKind, DEFAULT_TOL,
};
pub use weights::{compute_weights, EdgeWeights, WeightScheme};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaplaceError {
    #[error("tetrahedron {tet} has (near) zero volume")]
    DegenerateGeometry { tet: usize },
    #[error("{which} is empty")]
    EmptyBoundarySet { which: &'static str },
    #[error("vertex {vertex} is in both gamma0 and gamma1")]
    OverlappingBoundary { vertex: usize },
    #[error("vertex {vertex} of {which} is not a mesh vertex")]
    VertexOutOfRange { which: &'static str, vertex: usize },
    #[error("vertex {vertex} of {which} is not on the mesh boundary")]
    NotOnBoundary { which: &'static str, vertex: usize },
    #[error("{which} spans {components} components of the boundary surface")]
    DisconnectedBoundarySet { which: &'static str, components: usize },
    #[error("edge weights are for {found} edges but the mesh has {expected}")]
    WeightCount { expected: usize, found: usize },
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("vertex {vertex} is not coupled to any Dirichlet vertex through non-zero weights")]
    SingularSystem { vertex: usize },
    #[error("conjugate gradients did not converge in {iterations} iterations (relative residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },
}
