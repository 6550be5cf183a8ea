use thiserror::Error;

pub type Result<T> = std::result::Result<T, WalkError>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum WalkError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },

    #[error("duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { u: usize, v: usize },

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("arc index {index} out of range for {len} arcs")]
    ArcOutOfRange { index: usize, len: usize },

    #[error("{what} must be at least {min}, got {value}")]
    SizeTooSmall {
        what: &'static str,
        value: usize,
        min: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vertex {vertex}: coin rows are not orthonormal (Gram residual {residual:.3e})")]
    NonOrthonormal { vertex: usize, residual: f64 },

    #[error("vertex {vertex}: coin row has length {found}, expected deg = {expected}")]
    RowLength {
        vertex: usize,
        expected: usize,
        found: usize,
    },

    #[error("vertex {vertex}: rank p = {rank} is invalid for degree {degree}")]
    InvalidRank {
        vertex: usize,
        rank: usize,
        degree: usize,
    },

    #[error("invalid coin file: {0}")]
    CoinFile(String),

    #[error("hamiltonian: {0}")]
    Hamiltonian(String),

    #[error("graph is not a 3d torus")]
    NotTorus,

    #[error("coin is not the Grover coin")]
    NotGrover,

    #[error("mobility parameter {0} outside the allowed range")]
    EpsilonOutOfRange(f64),

    #[error(
        "{arcs} arcs exceeds the dense budget of {budget}; use the matrix-free / state-probe path"
    )]
    DenseBudget { arcs: usize, budget: usize },

    #[error("dense operators were not assembled for this walk")]
    DenseUnavailable,

    #[error("step counts must be strictly increasing")]
    NonIncreasingSteps,

    #[error("{0}")]
    InvalidArgument(String),

    #[error("{lambda} is not an eigenvalue of the predicted spectrum")]
    NotAnEigenvalue { lambda: f64 },

    #[error("predicted spectrum has {found} eigenvalues but the arc space has dimension {expected} (deficit {})", *expected as i64 - *found as i64)]
    MultiplicityDeficit { expected: usize, found: usize },
}
