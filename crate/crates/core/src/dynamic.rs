//! Shared surface of the fully-dynamic MST structures.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, SpanningTree, WeightedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateOutcome {
    Unchanged,
    Swapped { out: EdgeId, entering: EdgeId },
}

impl UpdateOutcome {
    pub fn is_swap(&self) -> bool {
        matches!(self, UpdateOutcome::Swapped { .. })
    }
}

/// A structure that keeps the MST of a graph under single-edge weight
/// changes. Deletion is an increase to [`crate::SENTINEL`], insertion a
/// decrease from it.
pub trait DynamicMst {
    fn graph(&self) -> &WeightedGraph;

    fn tree(&self) -> &SpanningTree;

    /// Sets the weight of `e` to `weight`.
    fn set_weight(&mut self, e: EdgeId, weight: f64) -> Result<UpdateOutcome>;

    /// Adds `delta` to the weight of `e`.
    fn apply_update(&mut self, e: EdgeId, delta: f64) -> Result<UpdateOutcome> {
        if e.0 >= self.graph().m() {
            return Err(Error::UnknownEdge(e.to_string()));
        }
        if delta.is_nan() {
            return Err(Error::NanWeight(e));
        }
        let w = self.graph().weight(e) + delta;
        self.set_weight(e, w)
    }
}
