use thiserror::Error;

use crate::graph::{EdgeRef, Mode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("a graph needs at least one vertex")]
    ZeroVertices,
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("listening edges cannot be stored or mutated in directed mode")]
    ListeningInDirectedMode,
    #[error("edge {0} is not present")]
    EdgeAbsent(EdgeRef),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("operation requires {expected} mode, graph is {actual}")]
    ModeMismatch { expected: Mode, actual: Mode },
    #[error("{what} needs {required} cases, budget is {budget}")]
    BudgetExceeded { what: &'static str, required: u128, budget: u128 },
    #[error("malformed graph document: {0}")]
    Document(String),
    #[error("iteration cap of {cap} moves exceeded")]
    IterationCap { cap: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
