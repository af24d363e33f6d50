//! Cost of a batch of weight changes for each dynamic structure.

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use dmst_bench::{graph, updates};
use dmst_core::oracle::recompute_after;
use dmst_core::sim::DelayModel;
use dmst_core::{DistDynamicMst, DynamicMst, ResponsibilityDmst, TopologyDmst};

const BATCH: usize = 100;

fn replay(d: &mut dyn DynamicMst, ups: &[(dmst_core::EdgeId, f64)]) {
    for &(e, w) in ups {
        d.set_weight(e, w).unwrap();
    }
}

fn dynamic(c: &mut Criterion) {
    let mut group = c.benchmark_group("dynamic");
    group.sample_size(10);
    for n in [32, 128] {
        let g = graph(n, 3 * n, 4);
        let ups = updates(&g, BATCH, 5);

        group.bench_with_input(BenchmarkId::new("recompute", n), &ups, |b, ups| {
            b.iter_batched(
                || g.clone(),
                |mut h| {
                    for &(e, w) in ups {
                        recompute_after(&h, e, w).unwrap();
                        h.set_weight(e, w).unwrap();
                    }
                },
                BatchSize::SmallInput,
            )
        });
        group.bench_with_input(BenchmarkId::new("resp-dmst", n), &ups, |b, ups| {
            b.iter_batched(
                || ResponsibilityDmst::new(g.clone()).unwrap(),
                |mut d| replay(&mut d, ups),
                BatchSize::SmallInput,
            )
        });
        group.bench_with_input(BenchmarkId::new("topo-dmst", n), &ups, |b, ups| {
            b.iter_batched(
                || TopologyDmst::new(g.clone(), None).unwrap(),
                |mut d| replay(&mut d, ups),
                BatchSize::SmallInput,
            )
        });
        group.bench_with_input(BenchmarkId::new("dist-dynamic", n), &ups, |b, ups| {
            b.iter_batched(
                || DistDynamicMst::new(g.clone(), None, DelayModel::Unit, false).unwrap(),
                |mut d| replay(&mut d, ups),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, dynamic);
criterion_main!(benches);
