//! Brute-force oracles shared by the integration and acceptance tests.
//! None of them reuse the library's algorithms.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use dmst_core::{EdgeId, SpanningTree, Vertex, WeightedGraph, SENTINEL};
use rand::Rng;

/// Vertices reachable from `s` using the edges accepted by `keep`.
pub fn reach(g: &WeightedGraph, s: Vertex, keep: impl Fn(EdgeId) -> bool) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    seen[s] = true;
    let mut q = VecDeque::from([s]);
    while let Some(x) = q.pop_front() {
        for &e in g.incident(x) {
            if !keep(e) {
                continue;
            }
            let y = g.edge(e).other(x);
            if !seen[y] {
                seen[y] = true;
                q.push_back(y);
            }
        }
    }
    seen
}

/// MST by the cycle property: an edge belongs to it iff its endpoints are
/// not joined by strictly lighter edges.
pub fn brute_mst(g: &WeightedGraph) -> BTreeSet<EdgeId> {
    g.edge_ids()
        .filter(|&e| {
            let k = g.key(e);
            let (u, v) = g.endpoints(e);
            !reach(g, u, |f| g.key(f) < k)[v]
        })
        .collect()
}

/// Minimum total weight over every spanning tree, by backtracking.
pub fn enumerate_min_weight(g: &WeightedGraph) -> f64 {
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] == x {
            x
        } else {
            let r = find(p, p[x]);
            p[x] = r;
            r
        }
    }
    fn go(g: &WeightedGraph, i: usize, picked: usize, w: f64, parent: Vec<usize>, best: &mut f64) {
        if picked + 1 == g.n() {
            *best = best.min(w);
            return;
        }
        if i == g.m() || g.m() - i < g.n() - 1 - picked {
            return;
        }
        let (u, v) = g.endpoints(EdgeId(i));
        let mut p = parent.clone();
        let (ru, rv) = (find(&mut p, u), find(&mut p, v));
        if ru != rv {
            p[ru] = rv;
            go(g, i + 1, picked + 1, w + g.weight(EdgeId(i)), p, best);
        }
        go(g, i + 1, picked, w, parent, best);
    }
    let mut best = f64::INFINITY;
    go(g, 0, 0, 0.0, (0..g.n()).collect(), &mut best);
    best
}

/// Tree edges on the path between the endpoints of `f`, by search.
pub fn brute_cycle(g: &WeightedGraph, t: &SpanningTree, f: EdgeId) -> BTreeSet<EdgeId> {
    let (u, v) = g.endpoints(f);
    // an edge is on the path iff removing it separates u from v
    t.edges()
        .iter()
        .copied()
        .filter(|&e| !reach(g, u, |x| x != e && t.contains(x))[v])
        .collect()
}

/// Lightest non-tree edge across the cut left by removing tree edge `e`.
pub fn brute_replacement(g: &WeightedGraph, t: &SpanningTree, e: EdgeId) -> Option<EdgeId> {
    let (u, _) = g.endpoints(e);
    let side = reach(g, u, |x| x != e && t.contains(x));
    g.edge_ids()
        .filter(|&f| !t.contains(f))
        .filter(|&f| {
            let (a, b) = g.endpoints(f);
            side[a] != side[b]
        })
        .min_by_key(|&f| g.key(f))
}

/// A random weight change that keeps finite weights distinct: a fresh
/// finite weight, a deletion to the sentinel, or a reinsertion.
pub fn random_change(g: &WeightedGraph, rng: &mut impl Rng) -> (EdgeId, f64) {
    loop {
        let e = EdgeId(rng.gen_range(0..g.m()));
        let w = match rng.gen_range(0..10) {
            0 => SENTINEL,
            _ => rng.gen_range(1..200_000) as f64 / 64.0,
        };
        if g.check_weight(e, w).is_ok() && w != g.weight(e) {
            return (e, w);
        }
    }
}
