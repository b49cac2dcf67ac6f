//! Nonlinear free-energy diminishing DDFV scheme for the anisotropic
//! drift-diffusion equation
//!
//! ```text
//! ∂t u − div(Λ(∇u + u∇V)) = 0   in Ω × (0, T),   (Λ(∇u + u∇V))·n = 0 on ∂Ω,
//! ```
//!
//! discretised on general 2D polygonal meshes with the discrete duality
//! finite volume framework (unknowns on primal cells, boundary edges and
//! vertices). The flux is written in the nonlinear form `−u Λ∇(log u + V)`,
//! which makes the scheme conserve mass, keep the solution positive and
//! dissipate the discrete free energy.
//!
//! The crate is organised bottom-up:
//!
//! - [`mesh`]: primal meshes, generators, the DDFV three-mesh structure, file I/O, quality metrics.
//! - [`operators`]: discrete gradient/divergence, brackets, local diamond matrices, penalization, norms.
//! - [`scheme`]: residual and Jacobian of the implicit scheme, energy functionals, time stepping.
//! - [`solver`]: sparse direct linear solves and Newton's method.
//! - [`harness`]: reference test cases, error norms, convergence and long-time studies, property suite.

// `!(x > 0.0)` is used on purpose so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod harness;
pub mod mesh;
pub mod operators;
pub mod scheme;
pub mod solver;

pub use error::{Error, MeshError, SchemeError, SolverError};
pub use geometry::Point;
pub use mesh::{DdfvMesh, PrimalMesh};
pub use operators::{DiamondField, DiscreteField, TensorSpec};
pub use scheme::{Scheme, SchemeParams};
pub use solver::NewtonConfig;
