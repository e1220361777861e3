use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("kernel scale sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("box kernel floor must lie in [0, 1], got {0}")]
    InvalidBoxFloor(f64),
    #[error("face {face} references vertex {vertex} but the mesh has {count} vertices")]
    VertexIndexOutOfRange { face: usize, vertex: usize, count: usize },
    #[error("degenerate faces (zero area): {0:?}")]
    DegenerateFaces(Vec<usize>),
    #[error("non-manifold edge ({0}, {1}) is shared by more than two faces")]
    NonManifoldEdge(usize, usize),
    #[error("face index {0} out of range")]
    FaceIndexOutOfRange(usize),
    #[error("value {value} out of range for {what}")]
    ArgumentOutOfRange { what: &'static str, value: f64 },
    #[error("invalid filter specification: {0}")]
    InvalidSpec(String),
    #[error("k = {k} out of range for a cloud of {count} points")]
    KOutOfRange { k: usize, count: usize },
    #[error("rank-deficient neighborhood at point {0}")]
    RankDeficientNeighborhood(usize),
    #[error("point cloud has no normals")]
    MissingNormals,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("meshes have different connectivity")]
    ConnectivityMismatch,
    #[error("empty input")]
    Empty,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
