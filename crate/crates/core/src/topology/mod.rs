//! Clustering-based fully-dynamic MST: a restricted partition of the tree
//! into basic clusters of at most z vertices, a topology tree over the
//! clusters, and a sparse 2-dimensional topology tree of non-tree edge
//! minima answering replacement queries.

mod partition;
mod tree;
mod twod;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

pub use partition::{check_conditions, ClusterId, PartitionVerdict, RestrictedPartition};
pub use tree::{NodeId, TopoNode, TopologyTree};
pub use twod::TwoDimTree;

use crate::dynamic::{DynamicMst, UpdateOutcome};
use crate::error::{Error, Result};
use crate::graph::{
    ternarize, EdgeId, EdgeKey, SpanningTree, TernaryMapping, Vertex, WeightedGraph,
};
use crate::oracle::tree_difference;
use crate::static_mst::kruskal;

/// `ceil(sqrt(m))`, at least 1.
pub fn default_z(m: usize) -> usize {
    ((m as f64).sqrt().ceil() as usize).max(1)
}

/// Partition, topology tree and 2-d tree over a graph of max degree 3.
#[derive(Clone, Debug)]
pub struct TopologyHierarchy {
    g: WeightedGraph,
    t: SpanningTree,
    pinned: BTreeSet<EdgeId>,
    part: RestrictedPartition,
    topo: TopologyTree,
    twod: TwoDimTree,
    last_touches: usize,
    max_touches: usize,
}

impl TopologyHierarchy {
    /// `pinned` tree edges count as lighter than every other edge: they are
    /// never the heaviest edge on a cycle.
    pub fn new(
        g: WeightedGraph,
        t: SpanningTree,
        z: usize,
        pinned: BTreeSet<EdgeId>,
    ) -> Result<Self> {
        t.validate(&g)?;
        let part = RestrictedPartition::build(&g, &t, z)?;
        Self::with_partition(g, t, part, pinned)
    }

    /// Builds the upper levels over a partition formed elsewhere. The
    /// partition is taken as given; [`Self::check`] reports violations.
    pub fn with_partition(
        g: WeightedGraph,
        t: SpanningTree,
        part: RestrictedPartition,
        pinned: BTreeSet<EdgeId>,
    ) -> Result<Self> {
        t.validate(&g)?;
        let topo = TopologyTree::build(&g, &t, &part);
        let twod = TwoDimTree::build(&g, &t, &part, &topo);
        Ok(TopologyHierarchy {
            g,
            t,
            pinned,
            part,
            topo,
            twod,
            last_touches: 0,
            max_touches: 0,
        })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.g
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.t
    }

    pub fn z(&self) -> usize {
        self.part.z()
    }

    pub fn partition(&self) -> &RestrictedPartition {
        &self.part
    }

    pub fn topology(&self) -> &TopologyTree {
        &self.topo
    }

    pub fn two_dim(&self) -> &TwoDimTree {
        &self.twod
    }

    /// Basic-cluster touches of the most recent swap.
    pub fn last_touches(&self) -> usize {
        self.last_touches
    }

    pub fn max_touches(&self) -> usize {
        self.max_touches
    }

    /// Lightest non-tree edge reconnecting the two sides of tree edge `e`.
    ///
    /// Topology nodes containing both endpoints of `e` are mixed; they form
    /// a path from the root down. Their other children lie wholly on one
    /// side, decided by the side of the link edge's endpoint in the mixed
    /// child. The answer is the least pair minimum across the two sides;
    /// when `e` lies inside a basic cluster, that cluster's incident
    /// non-tree edges are scanned as well.
    pub fn query_replacement(&self, e: EdgeId) -> Result<Option<EdgeId>> {
        if e.0 >= self.g.m() {
            return Err(Error::UnknownEdge(e.to_string()));
        }
        if !self.t.contains(e) {
            return Err(Error::NotATreeEdge(e));
        }
        let (u, v) = self.g.endpoints(e);
        let (cu, cv) = (self.part.cluster_of(u), self.part.cluster_of(v));
        let up_u = self.topo.ancestors(self.topo.leaf(cu));
        let up_v = self.topo.ancestors(self.topo.leaf(cv));
        // side of each pure node: true for u's side
        let mut side: HashMap<NodeId, bool> = HashMap::new();
        let mut local: BTreeMap<Vertex, bool> = BTreeMap::new();
        let lowest_mixed = if cu == cv {
            let inner = self.part.vertices(cu);
            for &x in inner {
                local.insert(x, false);
            }
            local.insert(u, true);
            let mut q = VecDeque::from([u]);
            while let Some(x) = q.pop_front() {
                for &f in self.g.incident(x) {
                    let y = self.g.edge(f).other(x);
                    if f != e && self.t.contains(f) && inner.contains(&y) && !local[&y] {
                        local.insert(y, true);
                        q.push_back(y);
                    }
                }
            }
            0
        } else {
            let l = (0..up_u.len()).find(|&l| up_u[l] == up_v[l]).unwrap();
            side.insert(up_u[l - 1], true);
            side.insert(up_v[l - 1], false);
            l
        };
        let vertex_side = |side: &HashMap<NodeId, bool>, x: Vertex| -> bool {
            if let Some(&s) = local.get(&x) {
                return s;
            }
            let mut node = self.topo.leaf(self.part.cluster_of(x));
            loop {
                if let Some(&s) = side.get(&node) {
                    return s;
                }
                node = self
                    .topo
                    .node(node)
                    .parent
                    .expect("vertex under a classified node");
            }
        };
        for level in lowest_mixed + 1..up_u.len() {
            let (mixed, child) = (up_u[level], up_u[level - 1]);
            let nd = self.topo.node(mixed);
            if let (Some(link), [a, b]) = (nd.link, &nd.children[..]) {
                let sibling = if *a == child { *b } else { *a };
                let (x, y) = self.g.endpoints(link);
                let inside = self.topo.vertices(&self.part, child);
                let anchor = if inside.contains(&x) { x } else { y };
                let s = vertex_side(&side, anchor);
                side.insert(sibling, s);
            }
        }
        let mut nodes_u: Vec<NodeId> = side.iter().filter(|(_, &s)| s).map(|(&n, _)| n).collect();
        let mut nodes_v: Vec<NodeId> = side.iter().filter(|(_, &s)| !s).map(|(&n, _)| n).collect();
        nodes_u.sort_unstable();
        nodes_v.sort_unstable();
        // query from the side with fewer nodes; ties go to the lower endpoint
        let u_first = nodes_u.len() < nodes_v.len() || (nodes_u.len() == nodes_v.len() && u < v);
        let (query, other) = if u_first {
            (&nodes_u, &nodes_v)
        } else {
            (&nodes_v, &nodes_u)
        };
        let mut best: Option<EdgeKey> = None;
        for &a in query {
            for &b in other {
                best = [best, self.twod.pair_min(&self.topo, a, b)]
                    .into_iter()
                    .flatten()
                    .min();
            }
        }
        if cu == cv {
            for &x in self.part.vertices(cu) {
                for &f in self.g.incident(x) {
                    if self.t.contains(f) {
                        continue;
                    }
                    let y = self.g.edge(f).other(x);
                    if vertex_side(&side, x) != vertex_side(&side, y) {
                        best = [best, Some(self.g.key(f))].into_iter().flatten().min();
                    }
                }
            }
        }
        Ok(best.map(|k| k.id))
    }

    /// Heaviest unpinned tree edge on the cycle of non-tree edge `f`.
    pub fn cycle_max(&self, f: EdgeId) -> Result<Option<EdgeId>> {
        if self.t.contains(f) {
            return Err(Error::IsATreeEdge(f));
        }
        let (a, b) = self.g.endpoints(f);
        let path = crate::graph::RootedTree::new(&self.g, &self.t, a).path(a, b);
        Ok(path
            .into_iter()
            .filter(|e| !self.pinned.contains(e))
            .max_by_key(|&e| self.g.key(e)))
    }

    /// Replaces tree edge `e` by non-tree edge `f` and repairs every level.
    pub fn apply_swap(&mut self, e: EdgeId, f: EdgeId) -> Result<usize> {
        let invalid = Error::InvalidSwap {
            out: e,
            entering: f,
        };
        if e.0 >= self.g.m() || f.0 >= self.g.m() || !self.t.contains(e) || self.t.contains(f) {
            return Err(invalid);
        }
        let (u, _) = self.g.endpoints(e);
        let comp = self.g.components_by(|x| x != e && self.t.contains(x));
        let (c, d) = self.g.endpoints(f);
        if comp[c] == comp[d] || (comp[c] != comp[u] && comp[d] != comp[u]) {
            return Err(invalid);
        }
        self.t.swap(e, f);
        let touches = self.part.apply_swap(&self.g, &self.t, e, f);
        self.topo = TopologyTree::build(&self.g, &self.t, &self.part);
        self.twod = TwoDimTree::build(&self.g, &self.t, &self.part, &self.topo);
        self.last_touches = touches;
        self.max_touches = self.max_touches.max(touches);
        Ok(touches)
    }

    /// Sets the weight of `e` and keeps the MST.
    pub fn set_weight(&mut self, e: EdgeId, weight: f64) -> Result<UpdateOutcome> {
        self.g.check_weight(e, weight)?;
        let old = self.g.key(e);
        let new = EdgeKey { weight, id: e };
        if self.t.contains(e) {
            let replacement = if new > old {
                self.query_replacement(e)?
            } else {
                None
            };
            self.g.set_weight(e, weight)?;
            if let Some(r) = replacement.filter(|&r| self.g.key(r) < new) {
                self.apply_swap(e, r)?;
                return Ok(UpdateOutcome::Swapped {
                    out: e,
                    entering: r,
                });
            }
            return Ok(UpdateOutcome::Unchanged);
        }
        let heaviest = if new < old { self.cycle_max(e)? } else { None };
        self.g.set_weight(e, weight)?;
        if let Some(m) = heaviest.filter(|&m| self.g.key(m) > new) {
            self.apply_swap(m, e)?;
            return Ok(UpdateOutcome::Swapped {
                out: m,
                entering: e,
            });
        }
        self.twod.reweigh(&self.g, &self.part, &self.topo, e, old);
        Ok(UpdateOutcome::Unchanged)
    }

    /// Partition conditions and topology-tree shape.
    pub fn check(&self) -> std::result::Result<(), String> {
        if let PartitionVerdict::Fail {
            condition,
            clusters,
            reason,
        } = check_conditions(&self.g, &self.t, &self.part)
        {
            return Err(format!(
                "condition {condition} fails for {clusters:?}: {reason}"
            ));
        }
        self.topo.check(&self.g, &self.t, &self.part)
    }

    /// Per level, one line per node: id, vertices, degree and parent.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for level in 0..=self.topo.height() {
            let _ = writeln!(out, "level {level}");
            for (x, nd) in self.topo.nodes().iter().enumerate() {
                if nd.level != level {
                    continue;
                }
                let vs: Vec<String> = self
                    .topo
                    .vertices(&self.part, x)
                    .iter()
                    .map(|v| v.to_string())
                    .collect();
                let parent = nd.parent.map_or("-".to_string(), |p| p.to_string());
                let _ = writeln!(
                    out,
                    "  node {x} vertices=[{}] degree={} parent={parent}",
                    vs.join(","),
                    nd.degree
                );
            }
        }
        out
    }
}

/// [`TopologyHierarchy`] over the ternarized graph, reporting results on
/// the original edges.
#[derive(Clone, Debug)]
pub struct TopologyDmst {
    g: WeightedGraph,
    t: SpanningTree,
    map: TernaryMapping,
    h: TopologyHierarchy,
    fixed_z: Option<usize>,
    rebuilds: usize,
}

impl TopologyDmst {
    /// `z = None` picks `ceil(sqrt(m))` and rebuilds whenever that target
    /// drifts by more than a factor of two.
    pub fn new(g: WeightedGraph, z: Option<usize>) -> Result<Self> {
        let (map, h) = Self::build(&g, z)?;
        let t = SpanningTree::from_edges_unchecked(
            map.contract_edges(h.tree().edges().iter().copied()),
        );
        Ok(TopologyDmst {
            g,
            t,
            map,
            h,
            fixed_z: z,
            rebuilds: 0,
        })
    }

    fn build(g: &WeightedGraph, z: Option<usize>) -> Result<(TernaryMapping, TopologyHierarchy)> {
        let (expanded, map) = ternarize(g)?;
        let t = kruskal(&expanded)?;
        let z = z.unwrap_or_else(|| default_z(live_edges(g)));
        let h = TopologyHierarchy::new(expanded, t, z, map.internal_edges.clone())?;
        Ok((map, h))
    }

    pub fn hierarchy(&self) -> &TopologyHierarchy {
        &self.h
    }

    pub fn mapping(&self) -> &TernaryMapping {
        &self.map
    }

    /// Full rebuilds so far.
    pub fn rebuilds(&self) -> usize {
        self.rebuilds
    }

    fn rebuild(&mut self) -> Result<()> {
        let (map, h) = Self::build(&self.g, self.fixed_z)?;
        self.map = map;
        self.h = h;
        self.t = SpanningTree::from_edges_unchecked(
            self.map
                .contract_edges(self.h.tree().edges().iter().copied()),
        );
        self.rebuilds += 1;
        Ok(())
    }

    /// Heaviest weight of the chain edges; updates at or below it would
    /// reorder them against original edges.
    fn chain_ceiling(&self) -> Option<f64> {
        self.map
            .internal_edges
            .iter()
            .map(|&e| self.h.graph().weight(e))
            .max_by(f64::total_cmp)
    }
}

fn live_edges(g: &WeightedGraph) -> usize {
    g.edges().iter().filter(|e| e.weight.is_finite()).count()
}

impl DynamicMst for TopologyDmst {
    fn graph(&self) -> &WeightedGraph {
        &self.g
    }

    fn tree(&self) -> &SpanningTree {
        &self.t
    }

    fn set_weight(&mut self, e: EdgeId, weight: f64) -> Result<UpdateOutcome> {
        self.g.check_weight(e, weight)?;
        let outcome = if self.chain_ceiling().is_some_and(|c| weight <= c) {
            let before = self.t.clone();
            self.g.set_weight(e, weight)?;
            self.rebuild()?;
            match tree_difference(&before, &self.t) {
                (out, inn) if out.len() == 1 && inn.len() == 1 => UpdateOutcome::Swapped {
                    out: out[0],
                    entering: inn[0],
                },
                _ => UpdateOutcome::Unchanged,
            }
        } else {
            let outcome = self.h.set_weight(e, weight)?;
            self.g.set_weight(e, weight)?;
            if let UpdateOutcome::Swapped { out, entering } = outcome {
                self.t.swap(out, entering);
            }
            outcome
        };
        if self.fixed_z.is_none() {
            let target = default_z(live_edges(&self.g));
            let z = self.h.z();
            if target > 2 * z || 2 * target < z {
                self.rebuild()?;
            }
        }
        Ok(outcome)
    }
}
