//! Primal meshes, the DDFV three-mesh structure, generators, file I/O and
//! quality metrics.

mod ddfv;
pub mod generate;
pub mod io;
mod primal;
mod quality;

pub use ddfv::{DdfvMesh, Diamond, Layout, Neighbor, Overlap, SIN_ALPHA_TOL};
pub use generate::{gen_kershaw, gen_quad_fvca, gen_uniform_quad, MeshFamily};
pub use io::{read_mesh, write_mesh};
pub use primal::PrimalMesh;
pub use quality::{quality, theta, theta_tilde, QualityReport};
