use thiserror::Error;

use crate::mesh::{FaceId, MeshValidationReport};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("non-triangular face on line {line} ({corners} corners)")]
    NonTriangularFace { line: usize, corners: usize },
    #[error("face {face} references vertex {index} but only {vertex_count} exist")]
    IndexOutOfRange {
        face: usize,
        index: usize,
        vertex_count: usize,
    },
    #[error("face {face} repeats a vertex")]
    DegenerateFace { face: usize },
    #[error("faces {first} and {second} are duplicates")]
    DuplicateFace { first: usize, second: usize },
    #[error("vertex {vertex} is not referenced by any face")]
    UnreferencedVertex { vertex: usize },
    #[error("edge ({a}, {b}) has more than two incident faces")]
    NonManifoldEdge { a: usize, b: usize },
    #[error("faces around edge ({a}, {b}) are inconsistently oriented")]
    InconsistentOrientation { a: usize, b: usize },
    #[error("mesh has no faces")]
    Empty,
    #[error("unrecognised mesh format for {0}")]
    UnknownFormat(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CollapseError {
    #[error("collapse of edge {0} is not valid")]
    InvalidCollapse(u32),
    #[error("record {record} applied out of order (mesh is at collapse depth {depth})")]
    OutOfOrder { record: usize, depth: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UnfoldError {
    #[error("faces {0} and {1} are not edge-adjacent")]
    NotAdjacent(FaceId, FaceId),
    #[error("attaching {face} to {parent} would create a cycle")]
    WouldCreateCycle { face: FaceId, parent: FaceId },
    #[error("face {0} is not part of the unfold tree")]
    NotInTree(FaceId),
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid input mesh: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

impl PipelineError {
    pub(crate) fn from_report(report: &MeshValidationReport) -> Self {
        PipelineError::InvalidInput(report.problems().join("; "))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("layout is degenerate (zero area)")]
    DegenerateLayout,
}
