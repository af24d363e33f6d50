//! Fully-dynamic MST through responsibility sets.
//!
//! Every non-tree edge `j` owns its cycle set `C_j` (the tree edges on the
//! cycle it closes) and a responsibility set `N_j`: the edges of `C_j` not
//! already on the cycle of a lighter non-tree edge. A covered tree edge is
//! therefore owned by its cheapest replacement. Non-tree edges live in an
//! AVL tree ordered by weight whose nodes also carry `L` and `R`, the union
//! of the responsibility sets in the left and right subtree, so the owner of
//! a tree edge is found by a single root-to-node descent.

mod avl;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::dynamic::{DynamicMst, UpdateOutcome};
use crate::edgeset::EdgeSet;
use crate::error::{Error, Result};
use crate::graph::{
    verify_mst_properties, EdgeId, EdgeKey, MstVerdict, SpanningTree, WeightedGraph,
};
use crate::static_mst::kruskal;

use avl::Avl;
pub use avl::Side;

/// Read-only view of one index node.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeView {
    pub edge: EdgeId,
    pub key: EdgeKey,
    pub depth: usize,
    pub side: Side,
    pub c: EdgeSet,
    pub n: EdgeSet,
    pub l: EdgeSet,
    pub r: EdgeSet,
}

#[derive(Clone, Debug)]
pub struct ResponsibilityIndex {
    tree: Avl,
    f_tree: BTreeMap<EdgeId, EdgeId>,
    f_nontree: BTreeMap<EdgeId, EdgeId>,
}

impl ResponsibilityIndex {
    /// Builds the index for `t`, which must be the MST of `g`.
    pub fn initialize(g: &WeightedGraph, t: &SpanningTree) -> Result<Self> {
        if let MstVerdict::Fail { non_tree, heavier } = verify_mst_properties(g, t)? {
            return Err(Error::NotMst { non_tree, heavier });
        }
        let rooted = t.rooted(g);
        let mut entries: Vec<(EdgeKey, EdgeSet)> = t
            .non_tree_edges(g)
            .map(|f| {
                let (u, v) = g.endpoints(f);
                (g.key(f), rooted.path(u, v).into_iter().collect())
            })
            .collect();
        entries.sort_by_key(|(k, _)| *k);
        let mut idx = ResponsibilityIndex {
            tree: Avl::from_sorted(entries),
            f_tree: BTreeMap::new(),
            f_nontree: BTreeMap::new(),
        };
        idx.tree.resweep(None);
        idx.rebuild_maps(g);
        Ok(idx)
    }

    /// Owner of each covered tree edge.
    pub fn f_tree(&self) -> &BTreeMap<EdgeId, EdgeId> {
        &self.f_tree
    }

    /// Heaviest member of each non-empty responsibility set.
    pub fn f_nontree(&self) -> &BTreeMap<EdgeId, EdgeId> {
        &self.f_nontree
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.len() == 0
    }

    pub fn cycle_set(&self, j: EdgeId) -> Option<&EdgeSet> {
        self.tree.slot_of(j).map(|s| &self.tree.node(s).c)
    }

    pub fn responsibility_set(&self, j: EdgeId) -> Option<&EdgeSet> {
        self.tree.slot_of(j).map(|s| &self.tree.node(s).n)
    }

    /// Non-tree edges in index order.
    pub fn in_order(&self) -> Vec<EdgeId> {
        self.tree
            .in_order()
            .into_iter()
            .map(|s| self.tree.node(s).edge)
            .collect()
    }

    /// Nodes in depth-first pre-order.
    pub fn nodes(&self) -> Vec<NodeView> {
        self.tree
            .pre_order()
            .into_iter()
            .map(|(s, depth, side)| {
                let x = self.tree.node(s);
                NodeView {
                    edge: x.edge,
                    key: x.key,
                    depth,
                    side,
                    c: x.c.clone(),
                    n: x.n.clone(),
                    l: x.l.clone(),
                    r: x.r.clone(),
                }
            })
            .collect()
    }

    /// Owner of tree edge `e` found by descending through the `L`/`R`
    /// aggregates; `None` for a bridge.
    pub fn find_responsible(&self, e: EdgeId) -> Option<EdgeId> {
        let mut cur = self.tree.root();
        while let Some(s) = cur {
            let x = self.tree.node(s);
            if x.n.contains(e) {
                return Some(x.edge);
            }
            cur = if x.l.contains(e) {
                x.left
            } else if x.r.contains(e) {
                x.right
            } else {
                None
            };
        }
        None
    }

    /// Dispatches a weight change of `e` to `weight` by case.
    pub fn set_weight(
        &mut self,
        g: &mut WeightedGraph,
        t: &mut SpanningTree,
        e: EdgeId,
        weight: f64,
    ) -> Result<UpdateOutcome> {
        g.check_weight(e, weight)?;
        let old = g.key(e);
        let new = EdgeKey { weight, id: e };
        match (t.contains(e), new > old) {
            (true, true) => self.increase_tree(g, t, e, weight),
            (true, false) => {
                // a lighter tree edge stays in the tree
                g.set_weight(e, weight)?;
                self.rebuild_maps(g);
                Ok(UpdateOutcome::Unchanged)
            }
            (false, false) => self.decrease_nontree(g, t, e, weight),
            (false, true) => {
                g.set_weight(e, weight)?;
                self.reposition(e, new);
                self.rebuild_maps(g);
                Ok(UpdateOutcome::Unchanged)
            }
        }
    }

    /// Adds `delta` to the weight of `e`.
    pub fn apply_update(
        &mut self,
        g: &mut WeightedGraph,
        t: &mut SpanningTree,
        e: EdgeId,
        delta: f64,
    ) -> Result<UpdateOutcome> {
        if e.0 >= g.m() {
            return Err(Error::UnknownEdge(e.to_string()));
        }
        self.set_weight(g, t, e, g.weight(e) + delta)
    }

    /// Lowers non-tree edge `ej`. It enters the tree iff it drops below the
    /// heaviest edge of its whole cycle set; the responsibility set alone is
    /// not enough, since an edge owned by a lighter non-tree edge can still
    /// be the heaviest on this cycle.
    pub fn decrease_nontree(
        &mut self,
        g: &mut WeightedGraph,
        t: &mut SpanningTree,
        ej: EdgeId,
        weight: f64,
    ) -> Result<UpdateOutcome> {
        if e_unknown(g, ej) {
            return Err(Error::UnknownEdge(ej.to_string()));
        }
        if t.contains(ej) {
            return Err(Error::IsATreeEdge(ej));
        }
        g.check_weight(ej, weight)?;
        let slot = self.slot(ej)?;
        let heaviest = self.tree.node(slot).c.iter().max_by_key(|&e| g.key(e));
        g.set_weight(ej, weight)?;
        let new = g.key(ej);
        match heaviest {
            Some(ei) if g.key(ei) > new => {
                t.swap(ei, ej);
                self.update_after_swap(g, t, ei, ej)?;
                Ok(UpdateOutcome::Swapped {
                    out: ei,
                    entering: ej,
                })
            }
            _ => {
                self.reposition(ej, new);
                self.rebuild_maps(g);
                Ok(UpdateOutcome::Unchanged)
            }
        }
    }

    /// Raises tree edge `ei`. Its owner replaces it iff the owner ends up
    /// lighter; bridges never move.
    pub fn increase_tree(
        &mut self,
        g: &mut WeightedGraph,
        t: &mut SpanningTree,
        ei: EdgeId,
        weight: f64,
    ) -> Result<UpdateOutcome> {
        if e_unknown(g, ei) {
            return Err(Error::UnknownEdge(ei.to_string()));
        }
        if !t.contains(ei) {
            return Err(Error::NotATreeEdge(ei));
        }
        g.set_weight(ei, weight)?;
        match self.find_responsible(ei) {
            Some(ej) if g.key(ej) < g.key(ei) => {
                t.swap(ei, ej);
                self.update_after_swap(g, t, ei, ej)?;
                Ok(UpdateOutcome::Swapped {
                    out: ei,
                    entering: ej,
                })
            }
            _ => {
                self.rebuild_maps(g);
                Ok(UpdateOutcome::Unchanged)
            }
        }
    }

    /// Repairs the index after `t` swapped `er` out for `ec`.
    ///
    /// With `U = C_ec ∪ {ec}`, every cycle through `er` becomes `C_j Δ U`;
    /// cycles avoiding `er` are untouched. `ec` leaves the index, `er`
    /// enters it with cycle `U \ {er}`, and responsibility is re-swept from
    /// the lightest key whose cycle changed.
    pub fn update_after_swap(
        &mut self,
        g: &WeightedGraph,
        t: &SpanningTree,
        er: EdgeId,
        ec: EdgeId,
    ) -> Result<()> {
        if t.contains(er) || !t.contains(ec) {
            return Err(Error::InvalidSwap {
                out: er,
                entering: ec,
            });
        }
        let c_slot = self.slot(ec)?;
        let c_key = self.tree.node(c_slot).key;
        let mut u = self.tree.node(c_slot).c.clone();
        if !u.contains(er) {
            return Err(Error::InvalidSwap {
                out: er,
                entering: ec,
            });
        }
        u.insert(ec);
        let mut from = c_key;
        for s in self.tree.in_order() {
            if s == c_slot {
                continue;
            }
            let x = self.tree.node_mut(s);
            if x.c.contains(er) {
                x.c = x.c.symmetric_difference(&u);
                from = from.min(x.key);
            }
        }
        self.tree.remove(c_key);
        let mut c_r = u;
        c_r.remove(er);
        let r_key = g.key(er);
        self.tree.insert(er, r_key, c_r);
        self.tree.resweep(Some(from.min(r_key)));
        self.rebuild_maps(g);
        Ok(())
    }

    /// Moves the node of `j` to key `new` and re-sweeps.
    fn reposition(&mut self, j: EdgeId, new: EdgeKey) {
        let s = self.tree.slot_of(j).expect("non-tree edge is indexed");
        let old = self.tree.node(s).key;
        if old == new {
            return;
        }
        let c = self.tree.remove(old);
        self.tree.insert(j, new, c);
        self.tree.resweep(Some(old.min(new)));
    }

    fn slot(&self, j: EdgeId) -> Result<usize> {
        self.tree
            .slot_of(j)
            .ok_or_else(|| Error::UnknownEdge(j.to_string()))
    }

    fn rebuild_maps(&mut self, g: &WeightedGraph) {
        self.f_tree.clear();
        self.f_nontree.clear();
        for s in self.tree.in_order() {
            let x = self.tree.node(s);
            for e in x.n.iter() {
                self.f_tree.insert(e, x.edge);
            }
            if let Some(top) = x.n.iter().max_by_key(|&e| g.key(e)) {
                self.f_nontree.insert(x.edge, top);
            }
        }
    }

    /// Structural self-check: ordering, balance, aggregates and the
    /// partition of covered edges by the `N` sets.
    pub fn check_structure(&self, g: &WeightedGraph) -> std::result::Result<(), String> {
        self.tree.check()?;
        let order = self.tree.in_order();
        for w in order.windows(2) {
            if self.tree.node(w[0]).key >= self.tree.node(w[1]).key {
                return Err("in-order keys not strictly increasing".into());
            }
        }
        let mut seen = EdgeSet::new();
        let mut covered = EdgeSet::new();
        for &s in &order {
            let x = self.tree.node(s);
            if x.key != g.key(x.edge) {
                return Err(format!("stale key for {}", x.edge));
            }
            if !x.n.is_subset(&x.c) {
                return Err(format!("N not within C for {}", x.edge));
            }
            if !x.n.is_disjoint(&seen) {
                return Err(format!("N sets overlap at {}", x.edge));
            }
            if x.n != x.c.difference(&covered) {
                return Err(format!("N of {} is not C minus lighter cycles", x.edge));
            }
            seen = seen.union(&x.n);
            covered = covered.union(&x.c);
        }
        if seen != covered {
            return Err("N sets do not cover every covered tree edge".into());
        }
        Ok(())
    }

    /// One line per node, depth-first: indentation by depth, `<`/`>` for a
    /// left/right child, then the edge label, weight and the four sets as
    /// sorted edge indices.
    pub fn dump(&self, g: &WeightedGraph) -> String {
        let mut out = String::new();
        for v in self.nodes() {
            let _ = writeln!(
                out,
                "{:indent$}{}{} w={} C={} N={} L={} R={}",
                "",
                match v.side {
                    Side::Root => "",
                    Side::Left => "<",
                    Side::Right => ">",
                },
                g.label(v.edge),
                v.key.weight,
                v.c,
                v.n,
                v.l,
                v.r,
                indent = 2 * v.depth
            );
        }
        out
    }
}

fn e_unknown(g: &WeightedGraph, e: EdgeId) -> bool {
    e.0 >= g.m()
}

/// Graph, tree and index bundled as one [`DynamicMst`].
#[derive(Clone, Debug)]
pub struct ResponsibilityDmst {
    g: WeightedGraph,
    t: SpanningTree,
    idx: ResponsibilityIndex,
}

impl ResponsibilityDmst {
    pub fn new(g: WeightedGraph) -> Result<Self> {
        let t = kruskal(&g)?;
        let idx = ResponsibilityIndex::initialize(&g, &t)?;
        Ok(ResponsibilityDmst { g, t, idx })
    }

    pub fn index(&self) -> &ResponsibilityIndex {
        &self.idx
    }
}

impl DynamicMst for ResponsibilityDmst {
    fn graph(&self) -> &WeightedGraph {
        &self.g
    }

    fn tree(&self) -> &SpanningTree {
        &self.t
    }

    fn set_weight(&mut self, e: EdgeId, weight: f64) -> Result<UpdateOutcome> {
        if e.0 >= self.g.m() {
            return Err(Error::UnknownEdge(e.to_string()));
        }
        self.idx.set_weight(&mut self.g, &mut self.t, e, weight)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_graph;

    fn ids(xs: &[usize]) -> EdgeSet {
        xs.iter().map(|&x| EdgeId(x)).collect()
    }

    fn tri() -> WeightedGraph {
        load_graph("3 3\n0 1 1 e1\n1 2 2 e2\n0 2 3 e3\n").unwrap()
    }

    #[test]
    fn path_gives_empty_index() {
        let g = load_graph("3 2\n0 1 1 a\n1 2 2 b\n").unwrap();
        let idx = ResponsibilityIndex::initialize(&g, &kruskal(&g).unwrap()).unwrap();
        assert!(idx.is_empty());
        assert!(idx.f_tree().is_empty());
        assert_eq!(idx.find_responsible(EdgeId(0)), None);
    }

    #[test]
    fn triangle_single_owner() {
        let g = tri();
        let idx = ResponsibilityIndex::initialize(&g, &kruskal(&g).unwrap()).unwrap();
        assert_eq!(idx.cycle_set(EdgeId(2)), Some(&ids(&[0, 1])));
        assert_eq!(idx.responsibility_set(EdgeId(2)), Some(&ids(&[0, 1])));
        assert_eq!(idx.f_tree()[&EdgeId(0)], EdgeId(2));
        assert_eq!(idx.f_tree()[&EdgeId(1)], EdgeId(2));
        assert_eq!(idx.f_nontree()[&EdgeId(2)], EdgeId(1));
    }

    #[test]
    fn rejects_non_mst() {
        let g = tri();
        let t = SpanningTree::new(&g, [EdgeId(0), EdgeId(2)]).unwrap();
        assert_eq!(
            ResponsibilityIndex::initialize(&g, &t).unwrap_err(),
            Error::NotMst {
                non_tree: EdgeId(1),
                heavier: EdgeId(2)
            }
        );
    }

    #[test]
    fn triangle_decreases() {
        let mut d = ResponsibilityDmst::new(tri()).unwrap();
        assert_eq!(
            d.set_weight(EdgeId(2), 2.5).unwrap(),
            UpdateOutcome::Unchanged
        );
        assert_eq!(
            d.set_weight(EdgeId(2), 1.5).unwrap(),
            UpdateOutcome::Swapped {
                out: EdgeId(1),
                entering: EdgeId(2)
            }
        );
        assert_eq!(
            d.tree().edges(),
            &[EdgeId(0), EdgeId(2)].into_iter().collect()
        );
        assert_eq!(d.index().cycle_set(EdgeId(1)), Some(&ids(&[0, 2])));
        d.index().check_structure(d.graph()).unwrap();
    }

    #[test]
    fn case_errors() {
        let g = tri();
        let mut t = kruskal(&g).unwrap();
        let mut idx = ResponsibilityIndex::initialize(&g, &t).unwrap();
        let mut h = g.clone();
        assert_eq!(
            idx.decrease_nontree(&mut h, &mut t, EdgeId(0), 0.5),
            Err(Error::IsATreeEdge(EdgeId(0)))
        );
        assert_eq!(
            idx.increase_tree(&mut h, &mut t, EdgeId(2), 9.0),
            Err(Error::NotATreeEdge(EdgeId(2)))
        );
        assert!(matches!(
            idx.apply_update(&mut h, &mut t, EdgeId(0), 1.0),
            Err(Error::DuplicateWeight { .. })
        ));
        assert_eq!(h, g);
        assert!(matches!(
            idx.update_after_swap(&h, &t, EdgeId(0), EdgeId(2)),
            Err(Error::InvalidSwap { .. })
        ));
    }

    /// Path a-b-c with tree edges 1 and 5, chord (a,c) at 6 and a second
    /// (b,c) edge at 7. The chord owns both tree edges, so the (b,c) edge
    /// has an empty responsibility set, yet dropping it to 4 must evict the
    /// tree edge of weight 5.
    #[test]
    fn decrease_uses_full_cycle_set() {
        let g = load_graph("3 4\n0 1 1 t1\n1 2 5 t2\n0 2 6 x\n1 2 7 y\n").unwrap();
        let mut d = ResponsibilityDmst::new(g).unwrap();
        assert!(d.index().responsibility_set(EdgeId(3)).unwrap().is_empty());
        assert_eq!(
            d.set_weight(EdgeId(3), 4.0).unwrap(),
            UpdateOutcome::Swapped {
                out: EdgeId(1),
                entering: EdgeId(3)
            }
        );
        d.index().check_structure(d.graph()).unwrap();
    }

    #[test]
    fn bridge_increase_never_swaps() {
        let g = load_graph("4 4\n0 1 1 a\n1 2 2 b\n0 2 3 c\n2 3 4 bridge\n").unwrap();
        let mut d = ResponsibilityDmst::new(g).unwrap();
        assert_eq!(
            d.set_weight(EdgeId(3), crate::graph::SENTINEL).unwrap(),
            UpdateOutcome::Unchanged
        );
        assert!(d.tree().contains(EdgeId(3)));
    }

    #[test]
    fn nontree_increase_reorders() {
        let g = load_graph("3 4\n0 1 1 t1\n1 2 5 t2\n0 2 6 x\n1 2 7 y\n").unwrap();
        let mut d = ResponsibilityDmst::new(g).unwrap();
        assert_eq!(d.index().in_order(), vec![EdgeId(2), EdgeId(3)]);
        assert_eq!(
            d.set_weight(EdgeId(2), 8.0).unwrap(),
            UpdateOutcome::Unchanged
        );
        assert_eq!(d.index().in_order(), vec![EdgeId(3), EdgeId(2)]);
        assert_eq!(d.index().responsibility_set(EdgeId(3)), Some(&ids(&[1])));
        assert_eq!(d.index().responsibility_set(EdgeId(2)), Some(&ids(&[0])));
        d.index().check_structure(d.graph()).unwrap();
    }
}
