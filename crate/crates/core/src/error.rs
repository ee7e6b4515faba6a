use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} has degree {degree}, exceeding the bound {bound}")]
    DegreeBoundExceeded {
        vertex: usize,
        degree: usize,
        bound: usize,
    },
    #[error("empty simplex in input")]
    EmptySimplex,
    #[error("complex has no simplices")]
    EmptyComplex,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("dimension {requested} out of range (complex dimension {available})")]
    DimensionOutOfRange { requested: usize, available: usize },
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("no character table available for this group")]
    TableUnavailable,
    #[error("character table fails orthogonality: {0}")]
    OrthogonalityFailure(String),
    #[error("element set is not a subgroup")]
    NotASubgroup,
    #[error("group of order {0} is too large for exhaustive subgroup search")]
    GroupTooLarge(usize),
    #[error("invalid group action: {0}")]
    InvalidAction(String),
    #[error("groups differ")]
    GroupMismatch,
    #[error("invalid subgroup embedding: {0}")]
    InvalidEmbedding(String),
    #[error("irreducible index {0} out of range")]
    CharacterOutOfRange(usize),
    #[error("measures have different radii ({0} vs {1})")]
    RadiusMismatch(usize, usize),
    #[error("measure radius {have} too small, need at least {need}")]
    RadiusTooSmall { have: usize, need: usize },
    #[error("{0} simplices exceed the configured cap {1}")]
    SizeCapExceeded(usize, usize),
    #[error("power {0} exceeds the cap {1}")]
    PowerCapExceeded(usize, usize),
    #[error("value is not rational: {0}")]
    NotRational(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("family index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("{0} is not divisible by {1}")]
    Indivisible(usize, usize),
    #[error("malformed canonical code: {0}")]
    MalformedCode(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl Error {
    /// Whether the error reflects a computational cap rather than bad input.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::SizeCapExceeded(..) | Error::PowerCapExceeded(..) | Error::GroupTooLarge(_)
        )
    }
}
