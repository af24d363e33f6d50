//! Brute-force ground truth for the dynamic structures.

use crate::error::{Error, Result};
use crate::graph::{fundamental_cycle, EdgeId, SpanningTree, WeightedGraph};
use crate::static_mst::kruskal;

/// Kruskal on a copy of `g` with `e` set to `weight`.
pub fn recompute_after(g: &WeightedGraph, e: EdgeId, weight: f64) -> Result<SpanningTree> {
    let mut h = g.clone();
    h.set_weight(e, weight)?;
    kruskal(&h)
}

/// Lightest non-tree edge crossing the cut left by removing tree edge `e`;
/// `None` when `e` is a bridge.
pub fn min_replacement_for_tree_edge(
    g: &WeightedGraph,
    t: &SpanningTree,
    e: EdgeId,
) -> Result<Option<EdgeId>> {
    if !t.contains(e) {
        return Err(Error::NotATreeEdge(e));
    }
    let side = g.components_by(|f| f != e && t.contains(f));
    Ok(t.non_tree_edges(g)
        .filter(|&f| {
            let (u, v) = g.endpoints(f);
            side[u] != side[v]
        })
        .min_by_key(|&f| g.key(f)))
}

/// Heaviest tree edge on the cycle `f` closes.
pub fn max_tree_edge_on_cycle(g: &WeightedGraph, t: &SpanningTree, f: EdgeId) -> Result<EdgeId> {
    let cycle = fundamental_cycle(g, t, f)?;
    cycle
        .iter()
        .max_by_key(|&e| g.key(e))
        .ok_or_else(|| Error::InvalidParameter(format!("edge {f} closes an empty cycle")))
}

/// Edges in `a` but not `b` and in `b` but not `a`.
pub fn tree_difference(a: &SpanningTree, b: &SpanningTree) -> (Vec<EdgeId>, Vec<EdgeId>) {
    (
        a.edges().difference(b.edges()).copied().collect(),
        b.edges().difference(a.edges()).copied().collect(),
    )
}
