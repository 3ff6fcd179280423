use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("loop at vertex {0} is not allowed in a simple graph")]
    Loop(usize),

    #[error("graph must have at least one vertex")]
    EmptyGraph,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("time budget of {0} ms exhausted")]
    Budget(u64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid state: {0}")]
    State(String),

    /// A solver or labeling tripwire fired; this indicates a bug, not a property of the input.
    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Budget and size failures are reported as skipped instances, not hard failures.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::Size(_) | Error::Budget(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
