//! Multi-level partition and its topology tree.
//!
//! Level 0 holds the basic clusters. Each higher level is a restricted
//! partition of order 2 of the level below: a node is either a single
//! child carried up, or the union of two adjacent children whose union
//! has degree at most 2.

use std::collections::{BTreeMap, BTreeSet};

use super::partition::{ClusterId, RestrictedPartition};
use crate::graph::{EdgeId, SpanningTree, Vertex, WeightedGraph};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopoNode {
    pub level: usize,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
    /// The basic cluster of a leaf.
    pub cluster: Option<ClusterId>,
    /// Number of neighbouring nodes on this node's level.
    pub degree: usize,
    /// Tree edge joining the two children, when there are two.
    pub link: Option<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyTree {
    nodes: Vec<TopoNode>,
    leaf_of: BTreeMap<ClusterId, NodeId>,
    root: NodeId,
    height: usize,
}

impl TopologyTree {
    pub fn build(g: &WeightedGraph, t: &SpanningTree, p: &RestrictedPartition) -> Self {
        let mut nodes = Vec::new();
        let mut leaf_of = BTreeMap::new();
        for c in p.ids() {
            leaf_of.insert(c, nodes.len());
            nodes.push(TopoNode {
                level: 0,
                children: Vec::new(),
                parent: None,
                cluster: Some(c),
                degree: 0,
                link: None,
            });
        }
        // tree edges between distinct nodes of the current level
        let mut links: Vec<(NodeId, NodeId, EdgeId)> = t
            .edges()
            .iter()
            .filter_map(|&e| {
                let (u, v) = g.endpoints(e);
                let (a, b) = (p.cluster_of(u), p.cluster_of(v));
                (a != b).then(|| (leaf_of[&a], leaf_of[&b], e))
            })
            .collect();
        let mut current: Vec<NodeId> = (0..nodes.len()).collect();
        let mut level = 0;
        while current.len() > 1 {
            let mut nbrs: BTreeMap<NodeId, BTreeMap<NodeId, EdgeId>> =
                current.iter().map(|&x| (x, BTreeMap::new())).collect();
            for &(a, b, e) in &links {
                nbrs.get_mut(&a).unwrap().insert(b, e);
                nbrs.get_mut(&b).unwrap().insert(a, e);
            }
            for &x in &current {
                nodes[x].degree = nbrs[&x].len();
            }
            let deg = |x: NodeId| nbrs[&x].len();
            let mut partner: BTreeMap<NodeId, (NodeId, EdgeId)> = BTreeMap::new();
            // leaves first, then any remaining adjacent pair
            for pass in 0..2 {
                for &x in &current {
                    if partner.contains_key(&x) || (pass == 0 && deg(x) != 1) {
                        continue;
                    }
                    let found = nbrs[&x]
                        .iter()
                        .find(|(&y, _)| !partner.contains_key(&y) && deg(x) + deg(y) <= 4)
                        .map(|(&y, &e)| (y, e));
                    if let Some((y, e)) = found {
                        partner.insert(x, (y, e));
                        partner.insert(y, (x, e));
                    }
                }
            }
            level += 1;
            let mut next = Vec::new();
            for &x in &current {
                let (children, link) = match partner.get(&x) {
                    Some(&(y, _)) if y < x => continue,
                    Some(&(y, e)) => (vec![x, y], Some(e)),
                    None => (vec![x], None),
                };
                let id = nodes.len();
                for &c in &children {
                    nodes[c].parent = Some(id);
                }
                nodes.push(TopoNode {
                    level,
                    children,
                    parent: None,
                    cluster: None,
                    degree: 0,
                    link,
                });
                next.push(id);
            }
            links = links
                .into_iter()
                .filter_map(|(a, b, e)| {
                    let (pa, pb) = (nodes[a].parent.unwrap(), nodes[b].parent.unwrap());
                    (pa != pb).then_some((pa, pb, e))
                })
                .collect();
            current = next;
        }
        TopologyTree {
            root: current[0],
            height: level,
            nodes,
            leaf_of,
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Level of the root.
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn node(&self, x: NodeId) -> &TopoNode {
        &self.nodes[x]
    }

    pub fn nodes(&self) -> &[TopoNode] {
        &self.nodes
    }

    pub fn leaf(&self, c: ClusterId) -> NodeId {
        self.leaf_of[&c]
    }

    /// The leaf and its ancestors, one per level up to the root.
    pub fn ancestors(&self, leaf: NodeId) -> Vec<NodeId> {
        let mut out = vec![leaf];
        let mut x = leaf;
        while let Some(p) = self.nodes[x].parent {
            out.push(p);
            x = p;
        }
        out
    }

    /// Basic clusters under `x`.
    pub fn clusters_under(&self, x: NodeId) -> Vec<ClusterId> {
        let mut out = Vec::new();
        let mut stack = vec![x];
        while let Some(y) = stack.pop() {
            match self.nodes[y].cluster {
                Some(c) => out.push(c),
                None => stack.extend(self.nodes[y].children.iter().copied()),
            }
        }
        out.sort_unstable();
        out
    }

    pub fn vertices(&self, p: &RestrictedPartition, x: NodeId) -> BTreeSet<Vertex> {
        self.clusters_under(x)
            .into_iter()
            .flat_map(|c| p.vertices(c).iter().copied())
            .collect()
    }

    /// Single root, at most two children per node, children one level
    /// down, and every pair of children adjacent with union degree ≤ 2.
    pub fn check(
        &self,
        g: &WeightedGraph,
        t: &SpanningTree,
        p: &RestrictedPartition,
    ) -> Result<(), String> {
        let roots: Vec<NodeId> = (0..self.nodes.len())
            .filter(|&x| self.nodes[x].parent.is_none())
            .collect();
        if roots != [self.root] {
            return Err(format!("roots {roots:?}"));
        }
        if self.nodes[self.root].level != self.height {
            return Err("root is not on the top level".into());
        }
        for (x, nd) in self.nodes.iter().enumerate() {
            if nd.children.len() > 2 || (nd.cluster.is_none() && nd.children.is_empty()) {
                return Err(format!("node {x} has {} children", nd.children.len()));
            }
            for &c in &nd.children {
                if self.nodes[c].level + 1 != nd.level || self.nodes[c].parent != Some(x) {
                    return Err(format!("node {x} has a malformed child {c}"));
                }
            }
            if let [a, b] = nd.children[..] {
                let (va, vb) = (self.vertices(p, a), self.vertices(p, b));
                let Some(e) = nd.link else {
                    return Err(format!("node {x} lacks a link edge"));
                };
                let (u, v) = g.endpoints(e);
                if !t.contains(e)
                    || !((va.contains(&u) && vb.contains(&v))
                        || (va.contains(&v) && vb.contains(&u)))
                {
                    return Err(format!("children of node {x} are not joined by their link"));
                }
                let union: BTreeSet<Vertex> = va.union(&vb).copied().collect();
                let degree = union
                    .iter()
                    .flat_map(|&w| g.incident(w).iter().map(move |&e| (w, e)))
                    .filter(|&(w, e)| t.contains(e) && !union.contains(&g.edge(e).other(w)))
                    .count();
                if degree > 2 {
                    return Err(format!("node {x} joins children into degree {degree}"));
                }
            }
        }
        Ok(())
    }
}
