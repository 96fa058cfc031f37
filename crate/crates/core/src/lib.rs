//! Anisotropic graded refinement of tetrahedral meshes toward vertex and edge
//! singularities, with a P1 Poisson solver for convergence studies.

pub mod domains;
pub mod error;
pub mod experiment;
pub mod fem;
pub mod geometry;
pub mod mesh;
pub mod quadrature;
pub mod shape;
pub mod singular;
pub mod vtk;
pub mod weighted;

pub use error::{Error, Result};
pub use geometry::Point;
pub use mesh::{Mesh, Tet, TetType};
pub use singular::{SingularEntity, SingularSet};
