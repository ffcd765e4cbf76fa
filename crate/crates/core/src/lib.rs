//! Capillary surfaces in solid cones.
//!
//! Sphere inversions acting on second-order surface data, spherical-cap
//! capillary configurations of circular cones, radial-graph meshes and their
//! discrete curvature, reflection-sweep diagnostics, and a volume-constrained
//! capillary energy minimizer.

pub mod checks;
pub mod cli;
pub mod cone;
pub mod domain;
pub mod error;
pub mod field;
pub mod geom;
pub mod io;
pub mod mesh;
pub mod reflect;
pub mod solver;
pub mod specimens;

pub use error::{Error, Result};
