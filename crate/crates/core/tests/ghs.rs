mod common;

use common::brute_mst;
use dmst_core::ghs::{
    level_time_bound, message_bound, run, run_chin_ting, run_ghs, GhsConfig, GhsOutcome, Variant,
};
use dmst_core::sim::{DelayModel, Wakeup};
use dmst_core::{generate, load_graph, GraphKind, UnionFind, WeightedGraph};

fn random_graph(seed: u64) -> WeightedGraph {
    let n = 2 + (seed as usize * 7) % 40;
    let max = n * (n - 1) / 2;
    let m = (n - 1 + (seed as usize * 13) % (3 * n)).min(max);
    generate(GraphKind::Random, n, m, seed).unwrap()
}

fn check_level_size(out: &GhsOutcome) {
    for r in &out.history {
        assert!(r.size >= 1 << r.level, "fragment {r:?} too small");
    }
}

fn check_level_ceiling(g: &WeightedGraph, out: &GhsOutcome) {
    let ceiling = (g.n() as f64).log2().ceil() as u32;
    assert!(out.max_level() <= ceiling);
}

/// Replays the trace: an edge turns Branch when a Connect crosses it, and
/// those edges must never close a cycle.
fn check_joins_acyclic(g: &WeightedGraph, trace: &str) {
    let mut uf = UnionFind::new(g.n());
    let mut seen = std::collections::BTreeSet::new();
    for line in trace.lines() {
        if !line.contains("kind=send") || !line.contains("type=Connect") {
            continue;
        }
        let ch: usize = line
            .split(' ')
            .find_map(|f| f.strip_prefix("ch="))
            .unwrap()
            .parse()
            .unwrap();
        if seen.insert(ch) {
            let (u, v) = g.endpoints(dmst_core::EdgeId(ch));
            assert!(uf.union(u, v), "Connect over edge {ch} closes a cycle");
        }
    }
}

#[test]
fn random_graphs_match_brute_force() {
    for seed in 0..40u64 {
        let g = random_graph(seed);
        for (delay, wake) in [
            (DelayModel::Seeded(seed), Wakeup::Lowest),
            (DelayModel::Seeded(seed + 1), Wakeup::All),
            (DelayModel::Unit, Wakeup::All),
        ] {
            let cfg = GhsConfig {
                wakeup: wake,
                trace: true,
                ..GhsConfig::new(Variant::Ghs, delay)
            };
            let out = run(&g, &cfg).unwrap();
            assert_eq!(out.tree.edges(), &brute_mst(&g), "seed {seed}");
            assert!(out.counters.total <= message_bound(g.n(), g.m()));
            check_level_size(&out);
            check_level_ceiling(&g, &out);
            check_joins_acyclic(&g, &out.trace);
        }
    }
}

#[test]
fn unit_delay_levels_arrive_in_time() {
    for seed in 0..40u64 {
        let g = random_graph(seed);
        let out = run_ghs(&g, DelayModel::Unit, Wakeup::All).unwrap();
        for (v, times) in out.level_times.iter().enumerate() {
            for (&l, &t) in times {
                if l >= 1 {
                    assert!(
                        t <= level_time_bound(l, g.n()),
                        "seed {seed}: node {v} reached level {l} at {t}"
                    );
                }
            }
        }
    }
}

#[test]
fn path_graph_uses_every_edge() {
    let g = generate(GraphKind::Path, 12, 0, 3).unwrap();
    let out = run_ghs(&g, DelayModel::Seeded(2), Wakeup::Lowest).unwrap();
    assert_eq!(out.tree.len(), 11);
    assert!(out.counters.total > 0);
}

#[test]
fn star_meets_time_bound() {
    let g = generate(GraphKind::Star, 17, 0, 5).unwrap();
    let out = run_ghs(&g, DelayModel::Unit, Wakeup::All).unwrap();
    let n = g.n() as f64;
    assert!(out.counters.completion_time() <= 5.0 * n * n.log2().ceil());
}

#[test]
fn chin_ting_matches_and_keeps_size_in_band() {
    for seed in 0..40u64 {
        let g = random_graph(seed);
        for (delay, wake) in [
            (DelayModel::Seeded(seed), Wakeup::Lowest),
            (DelayModel::Unit, Wakeup::All),
        ] {
            let out = run_chin_ting(&g, delay, wake).unwrap();
            assert_eq!(out.tree.edges(), &brute_mst(&g), "seed {seed}");
            check_level_size(&out);
            for s in &out.searches {
                assert!(1u64 << s.raised_to <= s.size && s.size < 1u64 << (s.raised_to + 1));
            }
        }
    }
}

#[test]
fn absorptions_force_a_root_level_increase() {
    // two stars joined by a heavy bridge; each star's leaves are absorbed
    // into its first combined pair while that pair is searching
    let mut text = String::from("12 11\n");
    for leaf in 1..=5 {
        text += &format!("0 {leaf} {leaf} a{leaf}\n");
    }
    for leaf in 7..=11 {
        text += &format!("6 {leaf} {} b{leaf}\n", leaf - 1);
    }
    text += "5 11 100 bridge\n";
    let g = load_graph(&text).unwrap();
    let out = run_chin_ting(&g, DelayModel::Unit, Wakeup::All).unwrap();
    assert_eq!(out.tree.edges(), &brute_mst(&g));
    let first = out
        .searches
        .iter()
        .find(|s| s.core == dmst_core::EdgeId(0))
        .unwrap();
    assert_eq!((first.level, first.raised_to, first.size), (1, 2, 6));
    // the repeated search runs at the raised level over the same six nodes
    assert!(out
        .history
        .iter()
        .any(|r| r.core == dmst_core::EdgeId(0) && r.level == 2 && r.size == 6));
    assert_eq!(out.max_level(), 3);
}

#[test]
fn golden_traces() {
    let two = load_graph("2 1\n0 1 1 a\n").unwrap();
    let tri = load_graph("3 3\n0 1 1 a\n1 2 2 b\n0 2 3 c\n").unwrap();
    let cfg = GhsConfig {
        wakeup: Wakeup::All,
        trace: true,
        ..GhsConfig::new(Variant::Ghs, DelayModel::Unit)
    };
    assert_eq!(
        run(&two, &cfg).unwrap().trace,
        include_str!("golden/ghs_two_node.trace")
    );
    assert_eq!(
        run(&tri, &cfg).unwrap().trace,
        include_str!("golden/ghs_triangle.trace")
    );
}

/// Dense head with a path handle whose weights grow away from the head:
/// the handle is absorbed one node at a time.
fn head_and_handle(head: usize, handle: usize) -> WeightedGraph {
    let n = head + handle;
    let mut edges = Vec::new();
    let mut w = 1.0;
    for a in 0..head {
        for b in a + 1..head {
            edges.push(format!("{a} {b} {w} h{}", edges.len()));
            w += 1.0;
        }
    }
    for i in 0..handle {
        let (a, b) = (if i == 0 { 0 } else { head + i - 1 }, head + i);
        edges.push(format!("{a} {b} {} p{i}", 1000.0 + i as f64));
    }
    load_graph(&format!("{n} {}\n{}\n", edges.len(), edges.join("\n"))).unwrap()
}

#[test]
fn handle_family_stays_correct_and_bounded() {
    for (head, handle) in [(4, 12), (8, 24), (16, 48)] {
        let g = head_and_handle(head, handle);
        let bound = message_bound(g.n(), g.m());
        for variant in [Variant::Ghs, Variant::ChinTing] {
            for delay in [DelayModel::Unit, DelayModel::Seeded(1), DelayModel::Seeded(2)] {
                let out = run(&g, &GhsConfig::new(variant, delay)).unwrap();
                assert_eq!(out.tree.edges(), &brute_mst(&g));
                assert!(out.counters.total <= bound);
                check_level_size(&out);
            }
        }
    }
}
