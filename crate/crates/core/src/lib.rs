//! Harmonic sweep fields on tetrahedral meshes and their PL critical points.
//!
//! The crate is organised bottom-up:
//!
//! - [`mesh`] builds validated simplicial 3-complexes and answers star, link
//!   and lower-link queries.
//! - [`homology`] computes Z/2 Betti numbers by sparse column reduction.
//! - [`laplace`] assembles edge weights and solves the sweep Dirichlet problem.
//! - [`morse`] classifies vertices from the reduced homology of lower links.
//! - [`levelset`] extracts level sets and sublevel complexes and checks how
//!   their topology changes across critical values.
//! - [`sweepgen`] generates structured boxes and the saddle counterexample.
//! - [`tracer`] follows the piecewise-constant gradient down to the base.
//!
//! ```
//! use sweeptopo::{sweepgen, laplace, morse};
//!
//! let (mesh, bc) = sweepgen::generate_box(3, 3, 3).unwrap();
//! let w = laplace::compute_weights(&mesh, laplace::WeightScheme::Cotangent).unwrap();
//! let f = laplace::solve_sweep(&mesh, &w, &bc, 1e-10).unwrap();
//! let report = morse::classify_all(&mesh, &f.into());
//! assert_eq!(report.interior_critical_count(), 0);
//! ```

pub mod field;
pub mod homology;
pub mod io;
pub mod laplace;
pub mod levelset;
pub mod mesh;
pub mod morse;
pub mod sweepgen;
pub mod tracer;
pub mod union_find;

pub use field::{ScalarField, TieBreak, TieBreakField};
pub use homology::{betti, reduced_betti, surface_betti_fast, BettiNumbers, ReducedBetti};
pub use mesh::{MeshError, Point, SubComplex, TetMesh};

use thiserror::Error;

/// Any error produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Homology(#[from] homology::HomologyError),
    #[error(transparent)]
    Laplace(#[from] laplace::LaplaceError),
    #[error(transparent)]
    LevelSet(#[from] levelset::LevelSetError),
    #[error(transparent)]
    SweepGen(#[from] sweepgen::SweepGenError),
    #[error(transparent)]
    Tracer(#[from] tracer::TracerError),
    #[error(transparent)]
    Io(#[from] io::IoError),
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/meshes.md")]
    struct Meshes;
    #[doc = include_str!("../../../book/src/homology.md")]
    struct Homology;
    #[doc = include_str!("../../../book/src/sweep-fields.md")]
    struct SweepFields;
    #[doc = include_str!("../../../book/src/critical-points.md")]
    struct CriticalPoints;
    #[doc = include_str!("../../../book/src/level-sets.md")]
    struct LevelSets;
    #[doc = include_str!("../../../book/src/counterexample.md")]
    struct Counterexample;
    #[doc = include_str!("../../../book/src/tracing.md")]
    struct Tracing;
}
