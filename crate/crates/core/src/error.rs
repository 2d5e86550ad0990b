use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("element {index} out of range for group of order {order}")]
    ElementOutOfRange { index: usize, order: usize },
    #[error("graph6 parse error: {0}")]
    Graph6(String),
    #[error("edge list parse error: {0}")]
    EdgeList(String),
    #[error("unknown edge id {0}")]
    UnknownEdge(usize),
    #[error("vector has length {got}, graph has {expected} edges")]
    SizeMismatch { expected: usize, got: usize },
    #[error("key {key} out of range (key space {space})")]
    KeyOutOfRange { key: u64, space: u64 },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("certificate error: {0}")]
    Certificate(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
