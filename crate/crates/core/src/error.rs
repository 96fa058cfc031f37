use std::path::PathBuf;

use crate::mesh::TetType;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("tetrahedron {tet} does not match any of the five singular-set patterns: {reason}")]
    AmbiguousClassification { tet: usize, reason: String },

    #[error("{ttype:?} tetrahedron needs grading parameter {name}")]
    MissingParameter { ttype: TetType, name: &'static str },

    #[error("child {child} of tetrahedron {tet} has volume {child_volume:e} (parent {parent_volume:e})")]
    DegenerateChild {
        tet: usize,
        child: usize,
        child_volume: f64,
        parent_volume: f64,
    },

    #[error("edge ({a}, {b}) split at t={existing} and t={requested} by neighbouring tetrahedra")]
    ConformityBreak {
        a: u32,
        b: u32,
        existing: f64,
        requested: f64,
    },

    #[error("invalid singular set: {0}")]
    InvalidSingularSet(String),

    #[error("edge length {0:e} too small for relative distances")]
    ZeroEdgeLength(f64),

    #[error("tetrahedron {tet}: {reason}")]
    FrameMismatch { tet: usize, reason: String },

    #[error("tetrahedron {0} has no e-tetrahedron ancestor")]
    AncestryError(usize),

    #[error("{what} = {value} outside {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("distance evaluated on the singular entity itself")]
    AtSingularity,

    #[error("decomposition radii: {0}")]
    ConfigError(String),

    #[error("field cannot supply derivatives of order {0}")]
    UnsupportedOrder(usize),

    #[error("tetrahedron {tet} has volume {volume:e}")]
    DegenerateTet { tet: usize, volume: f64 },

    #[error("mesh has no interior vertices")]
    EmptyInterior,

    #[error("CG stopped after {iterations} iterations at relative residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("fine mesh does not descend from the coarse mesh")]
    NotAncestor,

    #[error("difference {index} underflows (identical successive solutions)")]
    ZeroDiff { index: usize },

    #[error("functions live on different meshes")]
    MeshMismatch,

    #[error("unknown domain '{0}'")]
    UnknownDomain(String),

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("mesh file line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
