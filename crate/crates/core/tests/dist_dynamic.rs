mod common;

use std::collections::BTreeSet;

use common::{brute_mst, random_change};
use dmst_core::dist_dynamic::{DistConfig, DistDynamic, DistDynamicMst};
use dmst_core::sim::{DelayModel, TraceKind};
use dmst_core::topology::check_conditions;
use dmst_core::{generate, kruskal, ternarize, DynamicMst, EdgeKey, GraphKind, WeightedGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cubic(n: usize, seed: u64) -> WeightedGraph {
    let g = generate(GraphKind::Random, n, 2 * n, seed).unwrap();
    ternarize(&g).unwrap().0
}

/// Every stored minimum equals a direct scan of the two vertex sets.
fn check_overlay(d: &DistDynamic) {
    let h = d.overlay();
    let (g, t, p, topo) = (h.graph(), h.tree(), h.partition(), h.topology());
    let verts: Vec<BTreeSet<usize>> = (0..topo.nodes().len())
        .map(|x| topo.vertices(p, x))
        .collect();
    for ((a, b), k) in h.two_dim().entries() {
        let direct: Option<EdgeKey> = t
            .non_tree_edges(g)
            .filter(|&f| {
                let (x, y) = g.endpoints(f);
                (verts[a].contains(&x) && verts[b].contains(&y))
                    || (verts[a].contains(&y) && verts[b].contains(&x))
            })
            .map(|f| g.key(f))
            .min();
        assert_eq!(direct, Some(k), "entry ({a}, {b})");
    }
}

/// No merge request may name a combined size above z.
fn check_join_sizes(d: &DistDynamic, z: u64) {
    for r in d.trace() {
        if r.kind == TraceKind::Send && r.msg_type == "JoinReq" {
            let size: u64 = r
                .fields
                .split(' ')
                .find_map(|f| f.strip_prefix("size="))
                .unwrap()
                .parse()
                .unwrap();
            assert!(size <= z, "{r}");
        }
    }
}

#[test]
fn scenarios_track_the_oracle() {
    let z = 4;
    for scenario in 0..20u64 {
        let g = cubic(32, scenario);
        let t = kruskal(&g).unwrap();
        let cfg = DistConfig {
            trace: scenario < 3,
            ..DistConfig::new(z, DelayModel::Seeded(scenario))
        };
        let mut d = DistDynamic::new(g, t, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(scenario + 7);
        for step in 0..50 {
            let (e, w) = random_change(d.graph(), &mut rng);
            d.set_weight(e, w).unwrap();
            assert_eq!(
                d.tree().edges(),
                &brute_mst(d.graph()),
                "scenario {scenario} step {step}"
            );
            let p = d.partition(z);
            let verdict = check_conditions(d.graph(), d.tree(), &p);
            assert!(verdict.is_pass(), "scenario {scenario} step {step}: {verdict:?}");
            assert!(d.largest_cluster() <= z as u64);
            if step % 10 == 0 {
                check_overlay(&d);
            }
        }
        if cfg.trace {
            check_join_sizes(&d, z as u64);
        }
    }
}

#[test]
fn formation_matches_sequential_conditions_for_many_z() {
    for seed in 0..6u64 {
        let g = cubic(24, seed);
        let t = kruskal(&g).unwrap();
        for z in [1, 2, 3, 5, 8, g.n()] {
            let d = DistDynamic::new(g.clone(), t.clone(), &DistConfig::new(z, DelayModel::Unit))
                .unwrap();
            assert!(check_conditions(&g, &t, &d.partition(z)).is_pass());
            check_overlay(&d);
            if z >= g.n() {
                assert_eq!(d.partition(z).len(), 1);
            }
        }
    }
}

#[test]
fn general_graphs_via_expansion() {
    for seed in 0..6u64 {
        let g = generate(GraphKind::Random, 20, 60, seed).unwrap();
        let mut d = DistDynamicMst::new(g, Some(4), DelayModel::Seeded(seed), false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..30 {
            let (e, w) = random_change(d.graph(), &mut rng);
            d.set_weight(e, w).unwrap();
            assert_eq!(d.tree().edges(), &brute_mst(d.graph()));
        }
    }
}

#[test]
fn weights_below_the_chain_edges_are_refused() {
    let g = generate(GraphKind::Star, 8, 0, 1).unwrap();
    let mut d = DistDynamicMst::new(g, None, DelayModel::Unit, false).unwrap();
    assert!(d.set_weight(dmst_core::EdgeId(0), -50.0).is_err());
}
