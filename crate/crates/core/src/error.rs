use thiserror::Error;

use crate::geom::Vec3;
use crate::solver::SolverResult;

/// Errors raised by the geometric constructions and diagnostics.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("point coincides with the inversion center")]
    PointAtOrigin,
    #[error("inversion radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("homothety ratio must be positive and finite, got {0}")]
    InvalidRatio(f64),
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("angle out of range: {0}")]
    InvalidAngle(String),
    #[error("point {0:?} does not lie on the cone boundary")]
    NotOnCone(Vec3),
    #[error("contact angle 0 is a degenerate tangency")]
    DegenerateTangency,
    #[error("resolution must be at least 3 in each direction, got {0}x{1}")]
    InvalidResolution(usize, usize),
    #[error("radius function must be positive, found {value} at node {node}")]
    NonPositiveRadius { node: usize, value: f64 },
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("mesh vertex {0} lies at the inversion center")]
    VertexAtOrigin(usize),
    #[error("not a radial graph: ray {witness:?} meets the surface {hits} times")]
    NotRadialGraph { witness: Vec3, hits: usize },
    #[error("boundary vertex {0} is off the cone boundary")]
    BoundaryOffCone(usize),
    #[error("boundedness check requires H <= 0, got {0}")]
    PositiveMeanCurvature(f64),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate field: {0}")]
    DegenerateField(String),
    #[error("no convergence after {iterations} iterations (gradient norm {grad_norm:e})")]
    NonConvergence {
        iterations: usize,
        grad_norm: f64,
        best: Box<SolverResult>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
