use thiserror::Error;

use crate::graph::{Edge, NodeId};

/// Rejections of malformed updates against a [`DynGraph`](crate::graph::DynGraph).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("node {node} out of range for a graph on {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("edge {0} already present")]
    DuplicateEdge(Edge),
    #[error("edge {0} not present")]
    MissingEdge(Edge),
    #[error("weight {weight} of edge {edge} outside [0, 1]")]
    InvalidWeight { edge: Edge, weight: f64 },
    #[error("weight {0} is not representable in the target scalar type")]
    Unrepresentable(f64),
    #[error("support edge {0} is absent from the graph")]
    SupportOutsideGraph(Edge),
}

impl GraphError {
    /// Stable numeric code, used as the CLI exit status for rejected events.
    pub fn code(&self) -> i32 {
        match self {
            GraphError::SelfLoop(_) => 10,
            GraphError::NodeOutOfRange { .. } => 11,
            GraphError::DuplicateEdge(_) => 12,
            GraphError::MissingEdge(_) => 13,
            GraphError::InvalidWeight { .. } => 14,
            GraphError::Unrepresentable(_) => 15,
            GraphError::SupportOutsideGraph(_) => 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("lambda = {lambda} must satisfy 0 < lambda < beta = {beta}")]
    LambdaOutOfRange { lambda: f64, beta: f64 },
    #[error("lambda = {lambda} is below delta/n^2 = {floor}")]
    LambdaBelowFloor { lambda: f64, floor: f64 },
    #[error("{name} = {value} must lie in (0, 1)")]
    OutOfUnitInterval { name: &'static str, value: f64 },
    #[error("mode paper needs delta in (0, 1e-3], got {0}")]
    BadDelta(f64),
    #[error("need at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("level {level} outside [0, {levels}]")]
    LevelOutOfRange { level: usize, levels: usize },
}

#[derive(Debug, Error)]
pub enum SparsifyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("lambda-uniform weight is not a fractional matching: node {node} has degree {degree} > 1/lambda")]
    NotFractional { node: NodeId, degree: usize },
    #[error("weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),
    #[error("dead edges remain at level {level} or above; clean up before rebuilding")]
    DeadEdgesPresent { level: usize },
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("edge {0} has no direction")]
    MissingDirection(Edge),
    #[error("direction for {edge} names node {tail}, which is not an endpoint")]
    BadDirection { edge: Edge, tail: NodeId },
}
