//! Kruskal and Prim.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeKey, SpanningTree, Vertex, WeightedGraph};

/// Disjoint sets with path compression and union by rank.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
            components: n,
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Merges the sets of `a` and `b`; false if they were already one set.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

/// Binary min-heap over vertex ids with decrease-key.
#[derive(Clone, Debug)]
struct IndexedMinHeap {
    heap: Vec<Vertex>,
    pos: Vec<Option<usize>>,
    key: Vec<Option<EdgeKey>>,
}

impl IndexedMinHeap {
    fn new(n: usize) -> Self {
        IndexedMinHeap {
            heap: Vec::new(),
            pos: vec![None; n],
            key: vec![None; n],
        }
    }

    fn less(&self, a: usize, b: usize) -> bool {
        self.key[self.heap[a]] < self.key[self.heap[b]]
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.pos[self.heap[a]] = Some(a);
        self.pos[self.heap[b]] = Some(b);
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let p = (i - 1) / 2;
            if !self.less(i, p) {
                break;
            }
            self.swap(i, p);
            i = p;
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.heap.len() && self.less(l, best) {
                best = l;
            }
            if r < self.heap.len() && self.less(r, best) {
                best = r;
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }

    /// Inserts `v` or lowers its key; larger keys are ignored.
    fn push_or_decrease(&mut self, v: Vertex, k: EdgeKey) {
        match self.pos[v] {
            Some(i) => {
                if Some(k) < self.key[v] {
                    self.key[v] = Some(k);
                    self.sift_up(i);
                }
            }
            None => {
                self.key[v] = Some(k);
                self.heap.push(v);
                let i = self.heap.len() - 1;
                self.pos[v] = Some(i);
                self.sift_up(i);
            }
        }
    }

    fn pop(&mut self) -> Option<(Vertex, EdgeKey)> {
        if self.heap.is_empty() {
            return None;
        }
        let last = self.heap.len() - 1;
        self.swap(0, last);
        let v = self.heap.pop().unwrap();
        self.pos[v] = None;
        if !self.heap.is_empty() {
            self.sift_down(0);
        }
        Some((v, self.key[v].take().unwrap()))
    }
}

fn disconnected(uf: &mut UnionFind, n: usize) -> Error {
    let a = uf.find(0);
    let b = (0..n).map(|v| uf.find(v)).find(|&r| r != a).unwrap_or(a);
    Error::Disconnected { a, b }
}

/// Kruskal's algorithm. Returns the tree and the edges in the order they
/// were added.
pub fn kruskal_with_trace(g: &WeightedGraph) -> Result<(SpanningTree, Vec<EdgeId>)> {
    let mut order: Vec<EdgeKey> = g.edges().iter().map(|e| e.key()).collect();
    order.sort_unstable();
    let mut uf = UnionFind::new(g.n());
    let mut added = Vec::with_capacity(g.n().saturating_sub(1));
    for k in order {
        let (u, v) = g.endpoints(k.id);
        if uf.union(u, v) {
            added.push(k.id);
            if added.len() + 1 == g.n() {
                break;
            }
        }
    }
    if g.n() > 0 && uf.components() != 1 {
        return Err(disconnected(&mut uf, g.n()));
    }
    Ok((
        SpanningTree::from_edges_unchecked(added.iter().copied()),
        added,
    ))
}

pub fn kruskal(g: &WeightedGraph) -> Result<SpanningTree> {
    kruskal_with_trace(g).map(|(t, _)| t)
}

/// Prim's algorithm grown from `start`. Returns the tree and the edges in
/// the order they were added.
pub fn prim_with_trace(g: &WeightedGraph, start: Vertex) -> Result<(SpanningTree, Vec<EdgeId>)> {
    if start >= g.n() {
        return Err(Error::StartOutOfRange { start, n: g.n() });
    }
    let mut in_tree = vec![false; g.n()];
    let mut heap = IndexedMinHeap::new(g.n());
    let mut added = Vec::with_capacity(g.n() - 1);
    in_tree[start] = true;
    let relax = |heap: &mut IndexedMinHeap, in_tree: &[bool], x: Vertex| {
        for &e in g.incident(x) {
            let y = g.edge(e).other(x);
            if !in_tree[y] {
                heap.push_or_decrease(y, g.key(e));
            }
        }
    };
    relax(&mut heap, &in_tree, start);
    while let Some((v, k)) = heap.pop() {
        in_tree[v] = true;
        added.push(k.id);
        relax(&mut heap, &in_tree, v);
    }
    if added.len() + 1 != g.n() {
        let b = in_tree.iter().position(|&t| !t).unwrap_or(start);
        return Err(Error::Disconnected { a: start, b });
    }
    Ok((
        SpanningTree::from_edges_unchecked(added.iter().copied()),
        added,
    ))
}

pub fn prim(g: &WeightedGraph, start: Vertex) -> Result<SpanningTree> {
    prim_with_trace(g, start).map(|(t, _)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GraphKind};
    use crate::graph::{load_graph, verify_mst_properties};

    fn tri() -> WeightedGraph {
        load_graph("3 3\n0 1 1.0 e0\n1 2 2.0 e1\n0 2 3.0 e2\n").unwrap()
    }

    #[test]
    fn triangle_mst() {
        let g = tri();
        let want = SpanningTree::from_edges_unchecked([EdgeId(0), EdgeId(1)]);
        assert_eq!(kruskal(&g).unwrap(), want);
        for s in 0..3 {
            assert_eq!(prim(&g, s).unwrap(), want);
        }
    }

    #[test]
    fn two_vertices_and_path() {
        let g = load_graph("2 1\n0 1 4.5 only\n").unwrap();
        assert_eq!(prim(&g, 1).unwrap().len(), 1);
        let p = generate(GraphKind::Path, 9, 0, 4).unwrap();
        assert_eq!(kruskal(&p).unwrap().len(), 8);
    }

    #[test]
    fn errors() {
        let mut g = WeightedGraph::new(4);
        g.add_edge(0, 1, 1.0, "a").unwrap();
        g.add_edge(2, 3, 2.0, "b").unwrap();
        assert!(matches!(kruskal(&g), Err(Error::Disconnected { .. })));
        assert!(matches!(prim(&g, 0), Err(Error::Disconnected { .. })));
        assert!(matches!(
            prim(&g, 9),
            Err(Error::StartOutOfRange { start: 9, n: 4 })
        ));
    }

    #[test]
    fn union_find_counts_components() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(!uf.union(1, 0));
        assert_eq!(uf.find(1), uf.find(0));
        assert_eq!(uf.components(), 4);
    }

    /// Each added edge must be the lightest edge leaving some component of
    /// the forest built so far.
    fn check_greedy_trace(g: &WeightedGraph, added: &[EdgeId]) {
        let mut uf = UnionFind::new(g.n());
        for &e in added {
            let (u, v) = g.endpoints(e);
            let cu = uf.find(u);
            let lightest = g
                .edge_ids()
                .filter(|&f| {
                    let (a, b) = g.endpoints(f);
                    let (ra, rb) = (uf.find(a), uf.find(b));
                    ra != rb && (ra == cu || rb == cu)
                })
                .min_by_key(|&f| g.key(f))
                .unwrap();
            let cv = uf.find(v);
            let lightest_v = g
                .edge_ids()
                .filter(|&f| {
                    let (a, b) = g.endpoints(f);
                    let (ra, rb) = (uf.find(a), uf.find(b));
                    ra != rb && (ra == cv || rb == cv)
                })
                .min_by_key(|&f| g.key(f))
                .unwrap();
            assert!(lightest == e || lightest_v == e);
            uf.union(u, v);
        }
    }

    #[test]
    fn prim_matches_kruskal_and_is_greedy() {
        for seed in 0..60 {
            let n = 2 + (seed as usize % 20);
            let m = (n - 1 + seed as usize % 7).min(n * (n - 1) / 2);
            let g = generate(GraphKind::Random, n, m, seed).unwrap();
            let (k, ktrace) = kruskal_with_trace(&g).unwrap();
            assert!(verify_mst_properties(&g, &k).unwrap().is_pass());
            check_greedy_trace(&g, &ktrace);
            for s in 0..n {
                let (p, ptrace) = prim_with_trace(&g, s).unwrap();
                assert_eq!(p, k);
                check_greedy_trace(&g, &ptrace);
            }
        }
    }
}
