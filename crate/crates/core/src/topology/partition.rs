//! Restricted partitions of order z over a spanning tree of max degree 3.
//!
//! A cluster is a set of vertices connected in the tree. Its external
//! degree is the number of tree edges with exactly one endpoint inside.
//! The conditions are:
//!
//! 1. every cluster is connected in the tree;
//! 2. a cluster of external degree 3 is a single vertex;
//! 3. a cluster of external degree below 3 has at most z vertices;
//! 4. no two adjacent clusters can be merged without breaking 1–3.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, SpanningTree, Vertex, WeightedGraph};

pub type ClusterId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedPartition {
    z: usize,
    cluster_of: Vec<ClusterId>,
    clusters: BTreeMap<ClusterId, BTreeSet<Vertex>>,
    next_id: ClusterId,
}

/// Outcome of [`check_conditions`]; a failure names the condition broken
/// and the clusters that witness it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionVerdict {
    Pass,
    Fail {
        condition: u8,
        clusters: Vec<ClusterId>,
        reason: String,
    },
}

impl PartitionVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, PartitionVerdict::Pass)
    }
}

fn tree_neighbours<'a>(
    g: &'a WeightedGraph,
    t: &'a SpanningTree,
    x: Vertex,
) -> impl Iterator<Item = (EdgeId, Vertex)> + 'a {
    g.incident(x)
        .iter()
        .filter(move |&&e| t.contains(e))
        .map(move |&e| (e, g.edge(e).other(x)))
}

/// Splits `vertices` into the components of the tree restricted to them.
fn components(
    g: &WeightedGraph,
    t: &SpanningTree,
    vertices: &BTreeSet<Vertex>,
) -> Vec<BTreeSet<Vertex>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &s in vertices {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = BTreeSet::from([s]);
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for (_, y) in tree_neighbours(g, t, x) {
                if vertices.contains(&y) && seen.insert(y) {
                    comp.insert(y);
                    q.push_back(y);
                }
            }
        }
        out.push(comp);
    }
    out
}

impl RestrictedPartition {
    /// Greedy construction: start from singletons and merge adjacent
    /// clusters across tree edges, in edge-id order, until no merge is
    /// possible.
    pub fn build(g: &WeightedGraph, t: &SpanningTree, z: usize) -> Result<Self> {
        if z == 0 {
            return Err(Error::InvalidParameter(
                "cluster order z must be at least 1".into(),
            ));
        }
        if let Some(v) = (0..g.n()).find(|&v| g.degree(v) > 3) {
            return Err(Error::DegreeTooHigh {
                vertex: v,
                degree: g.degree(v),
            });
        }
        let mut p = RestrictedPartition {
            z,
            cluster_of: (0..g.n()).collect(),
            clusters: (0..g.n()).map(|v| (v, BTreeSet::from([v]))).collect(),
            next_id: g.n(),
        };
        loop {
            let mut merged = false;
            for &e in t.edges() {
                let (u, v) = g.endpoints(e);
                let (a, b) = (p.cluster_of[u], p.cluster_of[v]);
                if a != b && p.can_merge(g, t, a, b) {
                    p.merge(a, b);
                    merged = true;
                }
            }
            if !merged {
                break;
            }
        }
        Ok(p)
    }

    /// Wraps explicit clusters without checking anything.
    pub fn from_clusters(n: usize, z: usize, clusters: Vec<BTreeSet<Vertex>>) -> Self {
        let mut cluster_of = vec![usize::MAX; n];
        let mut map = BTreeMap::new();
        for (id, c) in clusters.into_iter().enumerate() {
            for &v in &c {
                if v < n {
                    cluster_of[v] = id;
                }
            }
            map.insert(id, c);
        }
        RestrictedPartition {
            z,
            cluster_of,
            next_id: map.len(),
            clusters: map,
        }
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn cluster_of(&self, v: Vertex) -> ClusterId {
        self.cluster_of[v]
    }

    pub fn vertices(&self, c: ClusterId) -> &BTreeSet<Vertex> {
        &self.clusters[&c]
    }

    pub fn clusters(&self) -> &BTreeMap<ClusterId, BTreeSet<Vertex>> {
        &self.clusters
    }

    pub fn ids(&self) -> impl Iterator<Item = ClusterId> + '_ {
        self.clusters.keys().copied()
    }

    /// Tree edges with exactly one endpoint in `c`.
    pub fn boundary(&self, g: &WeightedGraph, t: &SpanningTree, c: ClusterId) -> Vec<EdgeId> {
        let mut out = Vec::new();
        for &x in &self.clusters[&c] {
            for (e, y) in tree_neighbours(g, t, x) {
                if self.cluster_of[y] != c {
                    out.push(e);
                }
            }
        }
        out
    }

    pub fn degree(&self, g: &WeightedGraph, t: &SpanningTree, c: ClusterId) -> usize {
        self.boundary(g, t, c).len()
    }

    /// Clusters joined to `c` by a tree edge.
    pub fn neighbours(
        &self,
        g: &WeightedGraph,
        t: &SpanningTree,
        c: ClusterId,
    ) -> BTreeSet<ClusterId> {
        self.boundary(g, t, c)
            .into_iter()
            .map(|e| {
                let (u, v) = g.endpoints(e);
                let o = self.cluster_of[u];
                if o == c {
                    self.cluster_of[v]
                } else {
                    o
                }
            })
            .collect()
    }

    /// Adjacent clusters `a` and `b` may merge iff the union has degree at
    /// most 2 and at most z vertices. They share exactly one tree edge.
    pub fn can_merge(
        &self,
        g: &WeightedGraph,
        t: &SpanningTree,
        a: ClusterId,
        b: ClusterId,
    ) -> bool {
        let size = self.clusters[&a].len() + self.clusters[&b].len();
        size <= self.z && self.degree(g, t, a) + self.degree(g, t, b) <= 4
    }

    /// Merges `a` and `b` into the smaller id and returns it.
    fn merge(&mut self, a: ClusterId, b: ClusterId) -> ClusterId {
        let (keep, gone) = (a.min(b), a.max(b));
        let moved = self.clusters.remove(&gone).expect("merged cluster exists");
        for &v in &moved {
            self.cluster_of[v] = keep;
        }
        self.clusters.get_mut(&keep).unwrap().extend(moved);
        keep
    }

    /// Replaces cluster `c` by `parts`; the part holding the lowest vertex
    /// keeps the id. Returns the ids of all parts.
    fn replace(&mut self, c: ClusterId, mut parts: Vec<BTreeSet<Vertex>>) -> Vec<ClusterId> {
        parts.sort_by_key(|p| *p.iter().next().unwrap());
        self.clusters.remove(&c);
        let mut ids = Vec::with_capacity(parts.len());
        for (i, part) in parts.into_iter().enumerate() {
            let id = if i == 0 {
                c
            } else {
                self.next_id += 1;
                self.next_id - 1
            };
            for &v in &part {
                self.cluster_of[v] = id;
            }
            self.clusters.insert(id, part);
            ids.push(id);
        }
        ids
    }

    /// Merges `c` with its lowest-id mergeable neighbour until none is
    /// left. Returns the surviving id and the number of merges.
    fn try_merge(
        &mut self,
        g: &WeightedGraph,
        t: &SpanningTree,
        mut c: ClusterId,
    ) -> (ClusterId, usize) {
        let mut merges = 0;
        loop {
            let partner = self
                .neighbours(g, t, c)
                .into_iter()
                .find(|&o| self.can_merge(g, t, c, o));
            match partner {
                Some(o) => {
                    c = self.merge(c, o);
                    merges += 1;
                }
                None => return (c, merges),
            }
        }
    }

    /// Splits a degree-3 cluster at the vertex where the tree paths between
    /// its three attachment points meet. That vertex becomes a singleton
    /// and every remaining component holds at most one attachment, so each
    /// piece has degree at most 2.
    fn split_at_median(
        &mut self,
        g: &WeightedGraph,
        t: &SpanningTree,
        c: ClusterId,
    ) -> Vec<ClusterId> {
        let members = self.clusters[&c].clone();
        let attach: Vec<Vertex> = members
            .iter()
            .flat_map(|&x| {
                tree_neighbours(g, t, x)
                    .filter(|(_, y)| !members.contains(y))
                    .map(move |_| x)
            })
            .collect();
        debug_assert_eq!(attach.len(), 3);
        // paths from attach[0] inside the cluster
        let mut parent: BTreeMap<Vertex, Vertex> = BTreeMap::new();
        let root = attach[0];
        let mut q = VecDeque::from([root]);
        parent.insert(root, root);
        while let Some(x) = q.pop_front() {
            for (_, y) in tree_neighbours(g, t, x) {
                if members.contains(&y) && !parent.contains_key(&y) {
                    parent.insert(y, x);
                    q.push_back(y);
                }
            }
        }
        let path = |mut x: Vertex| {
            let mut p = vec![x];
            while x != root {
                x = parent[&x];
                p.push(x);
            }
            p.reverse();
            p
        };
        let (p1, p2) = (path(attach[1]), path(attach[2]));
        let median = *p1
            .iter()
            .zip(&p2)
            .take_while(|(a, b)| a == b)
            .last()
            .map(|(a, _)| a)
            .unwrap();
        let mut rest = members;
        rest.remove(&median);
        let mut parts = components(g, t, &rest);
        parts.push(BTreeSet::from([median]));
        self.replace(c, parts)
    }

    /// Repairs the partition after the tree replaced `e` by `f`; `t` is the
    /// tree after the swap. Returns the number of basic-cluster touches:
    /// clusters split off, inspected for degree, or merged.
    pub fn apply_swap(
        &mut self,
        g: &WeightedGraph,
        t: &SpanningTree,
        e: EdgeId,
        f: EdgeId,
    ) -> usize {
        let mut touches = 0;
        let mut touched: BTreeSet<ClusterId> = BTreeSet::new();
        let (a, b) = g.endpoints(e);
        let ca = self.cluster_of[a];
        if ca == self.cluster_of[b] {
            let parts = components(g, t, &self.clusters[&ca]);
            let ids = self.replace(ca, parts);
            touches += ids.len();
            touched.extend(ids);
        }
        let (c, d) = g.endpoints(f);
        for x in [a, b, c, d] {
            touched.insert(self.cluster_of[x]);
        }
        let mut pieces = BTreeSet::new();
        for id in touched {
            touches += 1;
            if self.clusters[&id].len() > 1 && self.degree(g, t, id) == 3 {
                let ids = self.split_at_median(g, t, id);
                touches += ids.len();
                pieces.extend(ids);
            } else {
                pieces.insert(id);
            }
        }
        for id in pieces {
            if self.clusters.contains_key(&id) {
                let (_, merges) = self.try_merge(g, t, id);
                touches += merges;
            }
        }
        touches
    }
}

/// Checks conditions 1–4 exhaustively, including merge-maximality over
/// every adjacent pair.
pub fn check_conditions(
    g: &WeightedGraph,
    t: &SpanningTree,
    p: &RestrictedPartition,
) -> PartitionVerdict {
    let fail = |condition: u8, clusters: Vec<ClusterId>, reason: String| PartitionVerdict::Fail {
        condition,
        clusters,
        reason,
    };
    let mut owner = vec![None; g.n()];
    for (&id, vs) in p.clusters() {
        if vs.is_empty() {
            return fail(1, vec![id], "empty cluster".into());
        }
        for &v in vs {
            if v >= g.n() || owner[v].is_some() || p.cluster_of(v) != id {
                return fail(1, vec![id], format!("vertex {v} not owned exactly once"));
            }
            owner[v] = Some(id);
        }
    }
    if let Some(v) = owner.iter().position(Option::is_none) {
        return fail(1, vec![], format!("vertex {v} in no cluster"));
    }
    for (&id, vs) in p.clusters() {
        if components(g, t, vs).len() != 1 {
            return fail(1, vec![id], "cluster is not connected in the tree".into());
        }
        let d = p.degree(g, t, id);
        if d > 3 {
            return fail(2, vec![id], format!("external degree {d}"));
        }
        if d == 3 && vs.len() > 1 {
            return fail(2, vec![id], format!("degree 3 with {} vertices", vs.len()));
        }
        if d < 3 && vs.len() > p.z() {
            return fail(
                3,
                vec![id],
                format!("{} vertices exceed z = {}", vs.len(), p.z()),
            );
        }
    }
    for id in p.ids() {
        for o in p.neighbours(g, t, id) {
            if id < o && p.can_merge(g, t, id, o) {
                return fail(4, vec![id, o], "adjacent clusters can be merged".into());
            }
        }
    }
    PartitionVerdict::Pass
}
