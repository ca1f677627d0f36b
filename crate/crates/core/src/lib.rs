//! Recoverability tests and reconstruction for discrete inverse problems on
//! graphs with a boundary/interior vertex partition.
//!
//! Two unknowns are supported: edge conductivities `γ` (inverse conductivity
//! problem) and interior Schrödinger potentials `q` (inverse Schrödinger
//! problem). Data is the Dirichlet-to-Neumann map measured at the boundary
//! vertices.
//!
//! * [`graph`]: graphs, discrete gradient, connectivity predicates.
//! * [`laplace`]: weighted Laplacian, Dirichlet solves, DtN map.
//! * [`solvability`]: product-of-solutions matrices, Jacobians, rank tests.
//! * [`newton`]: Newton reconstruction from DtN data.
//! * [`survey`]: Erdős–Rényi recoverability surveys.
//! * [`io`] and [`cli`]: file formats and the command-line front end.

pub mod cli;
pub mod error;
pub mod graph;
pub mod io;
pub mod laplace;
pub mod linalg;
pub mod newton;
pub mod solvability;
pub mod survey;

pub use error::{Error, Result};
pub use graph::{GradientMatrix, Graph};
pub use laplace::{DirichletSolver, DtnMap, EdgeWeights, LaplacianBlocks, NodeWeights};
pub use num_complex::Complex64;

/// Default relative tolerance used for rank and well-posedness decisions.
pub const DEFAULT_TOL: f64 = 1e-9;
