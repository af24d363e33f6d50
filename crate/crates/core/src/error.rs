use crate::graph::{EdgeId, Vertex};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("edges {first} and {second} share weight {weight}")]
    DuplicateWeight {
        first: String,
        second: String,
        weight: f64,
    },

    #[error("edge {label} is a self-loop on vertex {vertex}")]
    SelfLoop { label: String, vertex: Vertex },

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },

    #[error("edge {label} has a non-finite weight")]
    NonFiniteWeight { label: String },

    #[error("weight update for edge {0} is not a number")]
    NanWeight(EdgeId),

    #[error("duplicate edge id {0}")]
    DuplicateLabel(String),

    #[error("unknown edge {0}")]
    UnknownEdge(String),

    #[error("edge {0} is not a tree edge")]
    NotATreeEdge(EdgeId),

    #[error("edge {0} is a tree edge")]
    IsATreeEdge(EdgeId),

    #[error("edge set is not a spanning tree: {0}")]
    NotSpanning(String),

    #[error("graph is disconnected: vertices {a} and {b} are in different components")]
    Disconnected { a: Vertex, b: Vertex },

    #[error("start vertex {start} out of range for graph with {n} vertices")]
    StartOutOfRange { start: Vertex, n: usize },

    #[error("tree is not the minimum spanning tree: non-tree edge {non_tree} is lighter than tree edge {heavier} on its cycle")]
    NotMst { non_tree: EdgeId, heavier: EdgeId },

    #[error("vertex {vertex} has degree {degree}, at most 3 is allowed")]
    DegreeTooHigh { vertex: Vertex, degree: usize },

    #[error("swap of {out} for {entering} does not yield a spanning tree")]
    InvalidSwap { out: EdgeId, entering: EdgeId },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("protocol violation at event {event}: {msg}")]
    ProtocolViolation { event: usize, msg: String },

    #[error("event ceiling of {ceiling} exceeded; last event at time {time}")]
    EventCeiling { ceiling: usize, time: f64 },

    #[error("simulation quiesced with {running} processes not halted")]
    NotHalted { running: usize },

    #[error("stale overlay: {0}")]
    StaleOverlay(String),
}
