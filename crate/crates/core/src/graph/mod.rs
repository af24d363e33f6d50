//! Undirected weighted graphs with the distinct-weight discipline, spanning
//! trees over them, and the structural utilities the MST algorithms share.

mod cycle;
mod io;
mod ternary;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

pub use cycle::{fundamental_cycle, verify_mst_properties, MstVerdict};
pub use io::{load_graph, save_graph};
pub use ternary::{ternarize, TernaryMapping};

pub type Vertex = usize;

/// Weight assigned to deleted edges. Compares above every finite weight.
pub const SENTINEL: f64 = f64::INFINITY;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

impl EdgeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Total order over edges: weight first, edge id second.
///
/// Finite weights are pairwise distinct, so the id only decides between
/// edges parked at [`SENTINEL`].
#[derive(Clone, Copy, Debug)]
pub struct EdgeKey {
    pub weight: f64,
    pub id: EdgeId,
}

impl PartialEq for EdgeKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for EdgeKey {}

impl PartialOrd for EdgeKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EdgeKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then(self.id.cmp(&other.id))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedEdge {
    pub id: EdgeId,
    pub label: String,
    pub u: Vertex,
    pub v: Vertex,
    pub weight: f64,
}

impl WeightedEdge {
    pub fn key(&self) -> EdgeKey {
        EdgeKey {
            weight: self.weight,
            id: self.id,
        }
    }

    /// The endpoint opposite `x`.
    pub fn other(&self, x: Vertex) -> Vertex {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

fn weight_bits(w: f64) -> u64 {
    // -0.0 and 0.0 are the same weight
    if w == 0.0 {
        0
    } else {
        w.to_bits()
    }
}

#[derive(Clone, Debug, Default)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<WeightedEdge>,
    adj: Vec<Vec<EdgeId>>,
    by_weight: HashMap<u64, EdgeId>,
    by_label: HashMap<String, EdgeId>,
}

impl PartialEq for WeightedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
            by_weight: HashMap::new(),
            by_label: HashMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Appends a vertex and returns its id.
    pub fn add_vertex(&mut self) -> Vertex {
        self.adj.push(Vec::new());
        self.n += 1;
        self.n - 1
    }

    /// Adds an edge. Finite weights must be distinct from every other finite
    /// weight; [`SENTINEL`] may be shared.
    pub fn add_edge(
        &mut self,
        u: Vertex,
        v: Vertex,
        weight: f64,
        label: impl Into<String>,
    ) -> Result<EdgeId> {
        let label = label.into();
        for x in [u, v] {
            if x >= self.n {
                return Err(Error::VertexOutOfRange {
                    vertex: x,
                    n: self.n,
                });
            }
        }
        if u == v {
            return Err(Error::SelfLoop { label, vertex: u });
        }
        if weight.is_nan() || weight == f64::NEG_INFINITY {
            return Err(Error::NonFiniteWeight { label });
        }
        if self.by_label.contains_key(&label) {
            return Err(Error::DuplicateLabel(label));
        }
        let id = EdgeId(self.edges.len());
        if weight.is_finite() {
            if let Some(&prev) = self.by_weight.get(&weight_bits(weight)) {
                return Err(Error::DuplicateWeight {
                    first: self.edges[prev.0].label.clone(),
                    second: label,
                    weight,
                });
            }
            self.by_weight.insert(weight_bits(weight), id);
        }
        self.by_label.insert(label.clone(), id);
        self.edges.push(WeightedEdge {
            id,
            label,
            u,
            v,
            weight,
        });
        self.adj[u].push(id);
        self.adj[v].push(id);
        Ok(id)
    }

    /// Changes the weight of `e`, keeping finite weights distinct.
    pub fn set_weight(&mut self, e: EdgeId, weight: f64) -> Result<()> {
        if e.0 >= self.edges.len() {
            return Err(Error::UnknownEdge(e.to_string()));
        }
        if weight.is_nan() || weight == f64::NEG_INFINITY {
            return Err(Error::NanWeight(e));
        }
        let old = self.edges[e.0].weight;
        if weight.is_finite() {
            if let Some(&prev) = self.by_weight.get(&weight_bits(weight)) {
                if prev != e {
                    return Err(Error::DuplicateWeight {
                        first: self.edges[prev.0].label.clone(),
                        second: self.edges[e.0].label.clone(),
                        weight,
                    });
                }
            }
        }
        if old.is_finite() {
            self.by_weight.remove(&weight_bits(old));
        }
        if weight.is_finite() {
            self.by_weight.insert(weight_bits(weight), e);
        }
        self.edges[e.0].weight = weight;
        Ok(())
    }

    /// Returns the error `set_weight(e, weight)` would raise, without applying it.
    pub fn check_weight(&self, e: EdgeId, weight: f64) -> Result<()> {
        if e.0 >= self.edges.len() {
            return Err(Error::UnknownEdge(e.to_string()));
        }
        if weight.is_nan() || weight == f64::NEG_INFINITY {
            return Err(Error::NanWeight(e));
        }
        if weight.is_finite() {
            if let Some(&prev) = self.by_weight.get(&weight_bits(weight)) {
                if prev != e {
                    return Err(Error::DuplicateWeight {
                        first: self.edges[prev.0].label.clone(),
                        second: self.edges[e.0].label.clone(),
                        weight,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn edge(&self, e: EdgeId) -> &WeightedEdge {
        &self.edges[e.0]
    }

    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn weight(&self, e: EdgeId) -> f64 {
        self.edges[e.0].weight
    }

    pub fn key(&self, e: EdgeId) -> EdgeKey {
        self.edges[e.0].key()
    }

    pub fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        let edge = &self.edges[e.0];
        (edge.u, edge.v)
    }

    pub fn incident(&self, v: Vertex) -> &[EdgeId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn find_label(&self, label: &str) -> Option<EdgeId> {
        self.by_label.get(label).copied()
    }

    pub fn label(&self, e: EdgeId) -> &str {
        &self.edges[e.0].label
    }

    /// Sum of the weights of `edges`.
    pub fn total_weight<'a>(&self, edges: impl IntoIterator<Item = &'a EdgeId>) -> f64 {
        edges.into_iter().map(|&e| self.weight(e)).sum()
    }

    /// Component label per vertex, counting only edges accepted by `keep`.
    pub fn components_by(&self, keep: impl Fn(EdgeId) -> bool) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                for &e in &self.adj[x] {
                    if !keep(e) {
                        continue;
                    }
                    let y = self.edges[e.0].other(x);
                    if comp[y] == usize::MAX {
                        comp[y] = next;
                        queue.push_back(y);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// `Ok` if connected, otherwise the first pair of vertices found in
    /// different components.
    pub fn check_connected(&self) -> Result<()> {
        let comp = self.components_by(|_| true);
        match comp.iter().position(|&c| c != 0) {
            Some(b) => Err(Error::Disconnected { a: 0, b }),
            None => Ok(()),
        }
    }
}

/// A spanning tree identified by the ids of its edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpanningTree {
    edges: BTreeSet<EdgeId>,
}

impl SpanningTree {
    /// Builds a tree from edge ids, checking that they span `g` acyclically.
    pub fn new(g: &WeightedGraph, edges: impl IntoIterator<Item = EdgeId>) -> Result<Self> {
        let tree = SpanningTree {
            edges: edges.into_iter().collect(),
        };
        tree.validate(g)?;
        Ok(tree)
    }

    /// Wraps edge ids without validation.
    pub fn from_edges_unchecked(edges: impl IntoIterator<Item = EdgeId>) -> Self {
        SpanningTree {
            edges: edges.into_iter().collect(),
        }
    }

    pub fn validate(&self, g: &WeightedGraph) -> Result<()> {
        if g.n() == 0 {
            return if self.edges.is_empty() {
                Ok(())
            } else {
                Err(Error::NotSpanning("empty graph with edges".into()))
            };
        }
        if let Some(e) = self.edges.iter().find(|e| e.0 >= g.m()) {
            return Err(Error::NotSpanning(format!("unknown edge {e}")));
        }
        if self.edges.len() != g.n() - 1 {
            return Err(Error::NotSpanning(format!(
                "{} edges for {} vertices",
                self.edges.len(),
                g.n()
            )));
        }
        let comp = g.components_by(|e| self.edges.contains(&e));
        if comp.iter().any(|&c| c != 0) {
            return Err(Error::NotSpanning(
                "edges do not connect every vertex".into(),
            ));
        }
        Ok(())
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }

    pub fn edges(&self) -> &BTreeSet<EdgeId> {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Replaces tree edge `out` by `entering` without validation.
    pub fn swap(&mut self, out: EdgeId, entering: EdgeId) {
        self.edges.remove(&out);
        self.edges.insert(entering);
    }

    pub fn weight(&self, g: &WeightedGraph) -> f64 {
        g.total_weight(&self.edges)
    }

    pub fn non_tree_edges<'a>(&'a self, g: &'a WeightedGraph) -> impl Iterator<Item = EdgeId> + 'a {
        g.edge_ids().filter(move |e| !self.edges.contains(e))
    }

    /// Tree rooted at vertex 0, for path queries.
    pub fn rooted(&self, g: &WeightedGraph) -> RootedTree {
        RootedTree::new(g, self, 0)
    }
}

/// Parent pointers and depths of a spanning tree hung from a root.
#[derive(Clone, Debug)]
pub struct RootedTree {
    parent: Vec<Option<(Vertex, EdgeId)>>,
    depth: Vec<usize>,
}

impl RootedTree {
    pub fn new(g: &WeightedGraph, t: &SpanningTree, root: Vertex) -> Self {
        let mut parent = vec![None; g.n()];
        let mut depth = vec![usize::MAX; g.n()];
        if g.n() == 0 {
            return RootedTree { parent, depth };
        }
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &e in g.incident(x) {
                if !t.contains(e) {
                    continue;
                }
                let y = g.edge(e).other(x);
                if depth[y] == usize::MAX {
                    depth[y] = depth[x] + 1;
                    parent[y] = Some((x, e));
                    queue.push_back(y);
                }
            }
        }
        RootedTree { parent, depth }
    }

    pub fn parent(&self, v: Vertex) -> Option<(Vertex, EdgeId)> {
        self.parent[v]
    }

    pub fn depth(&self, v: Vertex) -> usize {
        self.depth[v]
    }

    /// Tree edges on the path between `a` and `b`.
    pub fn path(&self, mut a: Vertex, mut b: Vertex) -> Vec<EdgeId> {
        let mut left = Vec::new();
        let mut right = Vec::new();
        while self.depth[a] > self.depth[b] {
            let (p, e) = self.parent[a].expect("vertex below root has a parent");
            left.push(e);
            a = p;
        }
        while self.depth[b] > self.depth[a] {
            let (p, e) = self.parent[b].expect("vertex below root has a parent");
            right.push(e);
            b = p;
        }
        while a != b {
            let (pa, ea) = self.parent[a].expect("vertex below root has a parent");
            let (pb, eb) = self.parent[b].expect("vertex below root has a parent");
            left.push(ea);
            right.push(eb);
            a = pa;
            b = pb;
        }
        left.extend(right.into_iter().rev());
        left
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn triangle() -> WeightedGraph {
        let mut g = WeightedGraph::new(3);
        g.add_edge(0, 1, 1.0, "e0").unwrap();
        g.add_edge(1, 2, 2.0, "e1").unwrap();
        g.add_edge(0, 2, 3.0, "e2").unwrap();
        g
    }

    #[test]
    fn duplicate_weights_rejected() {
        let mut g = WeightedGraph::new(3);
        g.add_edge(0, 1, 5.0, "a").unwrap();
        let err = g.add_edge(1, 2, 5.0, "b").unwrap_err();
        assert_eq!(
            err,
            Error::DuplicateWeight {
                first: "a".into(),
                second: "b".into(),
                weight: 5.0
            }
        );
    }

    #[test]
    fn sentinel_weights_may_repeat_and_order_by_id() {
        let mut g = triangle();
        g.set_weight(EdgeId(0), SENTINEL).unwrap();
        g.set_weight(EdgeId(1), SENTINEL).unwrap();
        assert!(g.key(EdgeId(0)) < g.key(EdgeId(1)));
        assert!(g.key(EdgeId(2)) < g.key(EdgeId(0)));
        // freed finite weight is reusable
        g.set_weight(EdgeId(2), 1.0).unwrap();
    }

    #[test]
    fn self_loop_and_range_errors() {
        let mut g = WeightedGraph::new(2);
        assert!(matches!(
            g.add_edge(1, 1, 1.0, "x"),
            Err(Error::SelfLoop { vertex: 1, .. })
        ));
        assert!(matches!(
            g.add_edge(0, 2, 1.0, "x"),
            Err(Error::VertexOutOfRange { vertex: 2, n: 2 })
        ));
    }

    #[test]
    fn spanning_tree_validation() {
        let g = triangle();
        assert!(SpanningTree::new(&g, [EdgeId(0), EdgeId(1)]).is_ok());
        assert!(SpanningTree::new(&g, [EdgeId(0)]).is_err());
        let mut g4 = WeightedGraph::new(4);
        g4.add_edge(0, 1, 1.0, "a").unwrap();
        g4.add_edge(1, 0, 2.0, "b").unwrap();
        g4.add_edge(2, 3, 3.0, "c").unwrap();
        assert!(SpanningTree::new(&g4, [EdgeId(0), EdgeId(1), EdgeId(2)]).is_err());
    }

    #[test]
    fn rooted_paths() {
        let g = triangle();
        let t = SpanningTree::new(&g, [EdgeId(0), EdgeId(1)]).unwrap();
        let r = t.rooted(&g);
        assert_eq!(r.path(0, 2), vec![EdgeId(0), EdgeId(1)]);
        assert_eq!(r.path(2, 0), vec![EdgeId(1), EdgeId(0)]);
        assert!(r.path(1, 1).is_empty());
    }
}
