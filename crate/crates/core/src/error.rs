use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex id {id} out of range for a graph with {n} vertices")]
    IdOutOfRange { id: usize, n: usize },
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate boundary vertex {0}")]
    DuplicateBoundary(usize),
    #[error("boundary set is empty")]
    EmptyBoundary,
    #[error("graph has no interior vertices")]
    EmptyInterior,
    #[error("{what}: expected length {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("conductivity is not admissible: edge {edge} has non-positive real part")]
    NotAdmissible { edge: usize },
    #[error("graph or its interior subgraph is disconnected")]
    DisconnectedGraph,
    #[error("interior operator (L_II + diag(q)) is singular")]
    SingularInteriorOperator,
    #[error("matrix too large for exhaustive minors: min dimension {0} exceeds 8")]
    TooLarge(usize),
    #[error("cannot place {edges} edges on {n} vertices")]
    TooManyEdges { n: usize, edges: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
