mod common;

use std::collections::BTreeSet;

use common::{brute_mst, brute_replacement, random_change};
use dmst_core::topology::{check_conditions, default_z, TopologyHierarchy};
use dmst_core::{
    generate, kruskal, ternarize, DynamicMst, EdgeKey, GraphKind, TopologyDmst, WeightedGraph,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SWAP_TOUCH_LIMIT: usize = 24;

/// A connected graph of max degree 3 with `n` vertices.
fn cubic(n: usize, seed: u64) -> WeightedGraph {
    let g = generate(GraphKind::Random, n, 2 * n, seed).unwrap();
    ternarize(&g).unwrap().0
}

/// Compares every stored 2-d entry with a direct scan of the vertex sets,
/// and checks that no nonempty pair is missing.
fn check_two_dim(h: &TopologyHierarchy) {
    let (g, t, p, topo) = (h.graph(), h.tree(), h.partition(), h.topology());
    let verts: Vec<BTreeSet<usize>> = (0..topo.nodes().len())
        .map(|x| topo.vertices(p, x))
        .collect();
    let mut expected = Vec::new();
    for a in 0..topo.nodes().len() {
        for b in a..topo.nodes().len() {
            if topo.node(a).level != topo.node(b).level {
                continue;
            }
            let best: Option<EdgeKey> = t
                .non_tree_edges(g)
                .filter(|&f| {
                    let (x, y) = g.endpoints(f);
                    (verts[a].contains(&x) && verts[b].contains(&y))
                        || (verts[a].contains(&y) && verts[b].contains(&x))
                })
                .map(|f| g.key(f))
                .min();
            if let Some(k) = best {
                expected.push(((a, b), k));
            }
        }
    }
    assert_eq!(h.two_dim().entries(), expected);
}

fn check_queries(h: &TopologyHierarchy) {
    for &e in h.tree().edges() {
        assert_eq!(
            h.query_replacement(e).unwrap(),
            brute_replacement(h.graph(), h.tree(), e),
            "replacement of {e}"
        );
    }
}

#[test]
fn fresh_hierarchies_match_oracles() {
    for seed in 0..12u64 {
        let g = cubic(20, seed);
        let t = kruskal(&g).unwrap();
        for z in [1, 2, 3, 5, default_z(g.m()), g.n()] {
            let h = TopologyHierarchy::new(g.clone(), t.clone(), z, BTreeSet::new()).unwrap();
            h.check().unwrap();
            check_two_dim(&h);
            check_queries(&h);
        }
    }
}

#[test]
fn cluster_count_is_linear_in_n_over_z() {
    for seed in 0..10u64 {
        let g = cubic(60, seed);
        let t = kruskal(&g).unwrap();
        for z in 1..=12 {
            let h = TopologyHierarchy::new(g.clone(), t.clone(), z, BTreeSet::new()).unwrap();
            let bound = (6 * g.n()).div_ceil(z).max(1);
            assert!(
                h.partition().len() <= bound,
                "{} clusters for n = {}, z = {z}",
                h.partition().len(),
                g.n()
            );
        }
    }
}

#[test]
fn random_updates_keep_every_level_valid() {
    let mut worst = 0;
    for seed in 0..6u64 {
        let g = cubic(32, seed);
        let t = kruskal(&g).unwrap();
        for z in [1, 2, 4, default_z(g.m())] {
            let mut h = TopologyHierarchy::new(g.clone(), t.clone(), z, BTreeSet::new()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed * 31 + z as u64);
            for step in 0..60 {
                let (e, w) = random_change(h.graph(), &mut rng);
                h.set_weight(e, w).unwrap();
                assert_eq!(h.tree().edges(), &brute_mst(h.graph()), "step {step}");
                if let Err(msg) = h.check() {
                    panic!("seed {seed} z {z} step {step}: {msg}\n{}", h.dump());
                }
                check_two_dim(&h);
                if step % 10 == 0 {
                    check_queries(&h);
                }
            }
            worst = worst.max(h.max_touches());
        }
    }
    // a swap touches a constant number of basic clusters whatever z is;
    // 18 is the worst seen over this suite
    assert!(worst <= SWAP_TOUCH_LIMIT, "a swap touched {worst} clusters");
}

#[test]
fn partition_checker_matches_direct_evaluation() {
    for seed in 0..8u64 {
        let g = cubic(24, seed);
        let t = kruskal(&g).unwrap();
        let h = TopologyHierarchy::new(g.clone(), t.clone(), 4, BTreeSet::new()).unwrap();
        assert!(check_conditions(&g, &t, h.partition()).is_pass());
        // moving any single vertex to a neighbour's cluster must break a condition
        let clusters: Vec<BTreeSet<usize>> = h.partition().clusters().values().cloned().collect();
        for (i, c) in clusters.iter().enumerate() {
            if c.len() < 2 {
                continue;
            }
            let mut broken = clusters.clone();
            let v = *c.iter().next().unwrap();
            broken[i].remove(&v);
            broken.push(BTreeSet::from([v]));
            let p = dmst_core::topology::RestrictedPartition::from_clusters(g.n(), 4, broken);
            assert!(!check_conditions(&g, &t, &p).is_pass());
        }
    }
}

#[test]
fn dynamic_wrapper_tracks_kruskal_on_general_graphs() {
    for seed in 0..10u64 {
        let g = generate(GraphKind::Random, 24, 70, seed).unwrap();
        for z in [None, Some(3)] {
            let mut d = TopologyDmst::new(g.clone(), z).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
            for _ in 0..80 {
                let (e, w) = random_change(d.graph(), &mut rng);
                let before = d.tree().clone();
                let outcome = d.set_weight(e, w).unwrap();
                assert_eq!(d.tree().edges(), &brute_mst(d.graph()));
                let mut expect = before.clone();
                if let dmst_core::UpdateOutcome::Swapped { out, entering } = outcome {
                    expect.swap(out, entering);
                }
                assert_eq!(&expect, d.tree());
            }
        }
    }
}

#[test]
fn end_state_matches_kruskal_over_many_sequences() {
    for seed in 0..500u64 {
        let g = generate(GraphKind::Random, 10, 20, seed).unwrap();
        let mut d = TopologyDmst::new(g, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let (e, w) = random_change(d.graph(), &mut rng);
            d.set_weight(e, w).unwrap();
        }
        assert_eq!(d.tree(), &kruskal(d.graph()).unwrap(), "seed {seed}");
    }
}
