//! The 2-dimensional topology tree, stored sparsely.
//!
//! For two nodes α, β on the same level, the entry at (α, β) is the
//! lightest non-tree edge with one endpoint under α and the other under β
//! (both under α when α = β). Leaf pairs also keep the whole edge set
//! `E_ij`. Pairs with no edges are absent.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::partition::{ClusterId, RestrictedPartition};
use super::tree::{NodeId, TopologyTree};
use crate::graph::{EdgeId, EdgeKey, SpanningTree, WeightedGraph};

fn ordered<T: Ord>(a: T, b: T) -> (T, T) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TwoDimTree {
    leaves: BTreeMap<(ClusterId, ClusterId), BTreeSet<EdgeKey>>,
    minima: HashMap<(NodeId, NodeId), EdgeKey>,
}

impl TwoDimTree {
    pub fn build(
        g: &WeightedGraph,
        t: &SpanningTree,
        p: &RestrictedPartition,
        topo: &TopologyTree,
    ) -> Self {
        let mut leaves: BTreeMap<(ClusterId, ClusterId), BTreeSet<EdgeKey>> = BTreeMap::new();
        for f in t.non_tree_edges(g) {
            let (u, v) = g.endpoints(f);
            leaves
                .entry(ordered(p.cluster_of(u), p.cluster_of(v)))
                .or_default()
                .insert(g.key(f));
        }
        let mut minima: HashMap<(NodeId, NodeId), EdgeKey> = HashMap::new();
        for (&(a, b), set) in &leaves {
            let m = *set.first().unwrap();
            let (pa, pb) = (topo.ancestors(topo.leaf(a)), topo.ancestors(topo.leaf(b)));
            for (&x, &y) in pa.iter().zip(&pb) {
                let slot = minima.entry(ordered(x, y)).or_insert(m);
                if m < *slot {
                    *slot = m;
                }
            }
        }
        TwoDimTree { leaves, minima }
    }

    /// Stored minimum for two nodes on the same level.
    pub fn min_at(&self, a: NodeId, b: NodeId) -> Option<EdgeKey> {
        self.minima.get(&ordered(a, b)).copied()
    }

    /// Every stored entry, sorted.
    pub fn entries(&self) -> Vec<((NodeId, NodeId), EdgeKey)> {
        let mut v: Vec<_> = self.minima.iter().map(|(&k, &m)| (k, m)).collect();
        v.sort_by_key(|&(k, _)| k);
        v
    }

    /// The edge set of a pair of basic clusters.
    pub fn leaf_set(&self, a: ClusterId, b: ClusterId) -> Option<&BTreeSet<EdgeKey>> {
        self.leaves.get(&ordered(a, b))
    }

    /// Number of nonempty cluster pairs.
    pub fn leaf_count(&self) -> usize {
        self.leaves.values().filter(|s| !s.is_empty()).count()
    }

    /// Lightest edge between two nodes on possibly different levels: the
    /// higher node is expanded into its children until the levels agree.
    pub fn pair_min(&self, topo: &TopologyTree, a: NodeId, b: NodeId) -> Option<EdgeKey> {
        let (la, lb) = (topo.node(a).level, topo.node(b).level);
        if la == lb {
            return self.min_at(a, b);
        }
        let (hi, lo) = if la > lb { (a, b) } else { (b, a) };
        topo.node(hi)
            .children
            .iter()
            .filter_map(|&c| self.pair_min(topo, c, lo))
            .min()
    }

    /// Moves non-tree edge `f` from key `old` to its current key and
    /// repairs the minima on the path above its leaf pair.
    pub fn reweigh(
        &mut self,
        g: &WeightedGraph,
        p: &RestrictedPartition,
        topo: &TopologyTree,
        f: EdgeId,
        old: EdgeKey,
    ) {
        let (u, v) = g.endpoints(f);
        let pair = ordered(p.cluster_of(u), p.cluster_of(v));
        let set = self.leaves.entry(pair).or_default();
        set.remove(&old);
        set.insert(g.key(f));
        let leaf_min = set.first().copied();
        let (pa, pb) = (
            topo.ancestors(topo.leaf(pair.0)),
            topo.ancestors(topo.leaf(pair.1)),
        );
        for (level, (&x, &y)) in pa.iter().zip(&pb).enumerate() {
            let m = if level == 0 {
                leaf_min
            } else {
                self.children_min(topo, x, y)
            };
            match m {
                Some(m) => self.minima.insert(ordered(x, y), m),
                None => self.minima.remove(&ordered(x, y)),
            };
        }
    }

    fn children_min(&self, topo: &TopologyTree, x: NodeId, y: NodeId) -> Option<EdgeKey> {
        let (cx, cy) = (&topo.node(x).children, &topo.node(y).children);
        let mut best = None;
        for (i, &a) in cx.iter().enumerate() {
            for (j, &b) in cy.iter().enumerate() {
                if x == y && j < i {
                    continue;
                }
                best = [best, self.min_at(a, b)].into_iter().flatten().min();
            }
        }
        best
    }
}
