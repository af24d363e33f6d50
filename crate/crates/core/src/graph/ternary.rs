use std::collections::BTreeSet;

use super::{EdgeId, Vertex, WeightedGraph};
use crate::error::Result;

/// How a graph was expanded to maximum degree 3.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TernaryMapping {
    /// Original vertex to the chain of vertices replacing it. The first
    /// entry is always the original vertex id.
    pub forward: Vec<Vec<Vertex>>,
    /// Expanded vertex to the original vertex it belongs to.
    pub owner: Vec<Vertex>,
    /// Chain edges added by the expansion.
    pub internal_edges: BTreeSet<EdgeId>,
}

impl TernaryMapping {
    pub fn is_internal(&self, e: EdgeId) -> bool {
        self.internal_edges.contains(&e)
    }

    /// Maps an edge set of the expanded graph back to original edge ids.
    pub fn contract_edges(&self, edges: impl IntoIterator<Item = EdgeId>) -> BTreeSet<EdgeId> {
        edges
            .into_iter()
            .filter(|e| !self.internal_edges.contains(e))
            .collect()
    }
}

/// Expands every vertex of degree d > 3 into a chain of d - 2 vertices.
///
/// Original edges keep their ids; chain edges are appended after them with
/// weights below every finite original weight, so every MST of the result
/// contains all of them.
pub fn ternarize(g: &WeightedGraph) -> Result<(WeightedGraph, TernaryMapping)> {
    let n = g.n();
    let mut forward: Vec<Vec<Vertex>> = (0..n).map(|v| vec![v]).collect();
    let mut owner: Vec<Vertex> = (0..n).collect();
    // slot[e] = (vertex for endpoint u, vertex for endpoint v)
    let mut slot: Vec<(Vertex, Vertex)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    let mut next = n;

    for v in 0..n {
        let inc = g.incident(v);
        let d = inc.len();
        if d <= 3 {
            continue;
        }
        let k = d - 2;
        let chain: Vec<Vertex> = std::iter::once(v)
            .chain((1..k).map(|i| next + i - 1))
            .collect();
        next += k - 1;
        for _ in 1..k {
            owner.push(v);
        }
        // ends of the chain take two original edges, the interior one each
        let mut pos = 0;
        for (i, &c) in chain.iter().enumerate() {
            let take = if i == 0 || i == k - 1 { 2 } else { 1 };
            for &e in &inc[pos..pos + take] {
                let edge = g.edge(e);
                let s = &mut slot[e.0];
                if edge.u == v {
                    s.0 = c;
                }
                if edge.v == v {
                    s.1 = c;
                }
            }
            pos += take;
        }
        debug_assert_eq!(pos, d);
        forward[v] = chain;
    }

    let mut out = WeightedGraph::new(next);
    for (edge, &(a, b)) in g.edges().iter().zip(&slot) {
        out.add_edge(a, b, edge.weight, edge.label.clone())?;
    }
    let floor = g
        .edges()
        .iter()
        .map(|e| e.weight)
        .filter(|w| w.is_finite())
        .fold(f64::INFINITY, f64::min);
    let floor = if floor.is_finite() { floor } else { 0.0 };
    let mut internal = BTreeSet::new();
    let mut rank = 0usize;
    for (v, chain) in forward.iter().enumerate() {
        for (i, pair) in chain.windows(2).enumerate() {
            let w = floor - 1.0 - rank as f64;
            rank += 1;
            let id = out.add_edge(pair[0], pair[1], w, format!("~t{v}.{i}"))?;
            internal.insert(id);
        }
    }
    Ok((
        out,
        TernaryMapping {
            forward,
            owner,
            internal_edges: internal,
        },
    ))
}
