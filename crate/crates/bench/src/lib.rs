//! Fixtures shared by the benchmarks.

use dmst_core::{generate, ternarize, EdgeId, GraphKind, WeightedGraph, SENTINEL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Connected random graph with `n` vertices and `m` edges.
pub fn graph(n: usize, m: usize, seed: u64) -> WeightedGraph {
    generate(GraphKind::Random, n, m, seed).expect("feasible fixture")
}

/// Degree-three expansion of [`graph`].
pub fn cubic(n: usize, m: usize, seed: u64) -> WeightedGraph {
    ternarize(&graph(n, m, seed)).expect("ternarize").0
}

/// A replayable list of valid weight changes for `g`. Each change is valid
/// against the graph as left by the ones before it.
pub fn updates(g: &WeightedGraph, count: usize, seed: u64) -> Vec<(EdgeId, f64)> {
    let mut g = g.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let e = EdgeId(rng.gen_range(0..g.m()));
        let w = match rng.gen_range(0..10) {
            0 => SENTINEL,
            _ => rng.gen_range(1..200_000) as f64 / 64.0,
        };
        if w != g.weight(e) && g.check_weight(e, w).is_ok() {
            g.set_weight(e, w).expect("checked");
            out.push((e, w));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn updates_replay_cleanly() {
        let g = graph(30, 80, 1);
        let mut h = g.clone();
        for (e, w) in updates(&g, 200, 2) {
            h.set_weight(e, w).unwrap();
        }
    }
}
