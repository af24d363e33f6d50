//! One run: an algorithm over a graph and an update script, with every
//! resulting tree checked against Kruskal and the cycle property.

use std::collections::BTreeMap;

use dmst_core::ghs::{message_bound, GhsConfig, Variant};
use dmst_core::sim::{Counters, DelayModel, Wakeup};
use dmst_core::{
    kruskal, prim, verify_mst_properties, DistDynamicMst, DynamicMst, EdgeId, ResponsibilityDmst,
    SpanningTree, TopologyDmst, UpdateOutcome, WeightedGraph,
};

use crate::args::Algo;
use crate::output::dot;
use crate::script::{resolve, Scripted};
use crate::CliResult;

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub algo: Algo,
    pub delay: DelayModel,
    pub wakeup: Wakeup,
    pub z: Option<usize>,
    pub trace: bool,
}

/// One CSV row; see [`crate::output::CSV_HEADER`].
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub seed: u64,
    pub algorithm: &'static str,
    pub n: usize,
    pub m: usize,
    pub delay: String,
    pub z: Option<usize>,
    pub updates: usize,
    pub swaps: usize,
    pub messages: Option<u64>,
    pub by_type: BTreeMap<&'static str, u64>,
    pub message_bound: Option<u64>,
    pub completion_time: Option<f64>,
    pub tree_weight: f64,
    pub oracle_weight: f64,
    pub oracle_match: bool,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub row: Row,
    pub trace: String,
    pub dot: String,
}

/// Message totals summed over several protocol runs.
#[derive(Default)]
struct Tally {
    total: u64,
    by_type: BTreeMap<&'static str, u64>,
    ticks: u64,
    bound: u64,
}

impl Tally {
    fn add(&mut self, c: &Counters) {
        self.total += c.total;
        for (k, v) in &c.by_type {
            *self.by_type.entry(k).or_insert(0) += v;
        }
        self.ticks += c.completion;
    }
}

fn matches_oracle(g: &WeightedGraph, t: &SpanningTree) -> CliResult<bool> {
    let k = kruskal(g)?;
    Ok(k.edges() == t.edges() && verify_mst_properties(g, t)?.is_pass())
}

enum Engine {
    Static(fn(&WeightedGraph) -> dmst_core::Result<SpanningTree>),
    Protocol(Variant),
    Dynamic(Box<dyn DynamicMst>),
    Dist(Box<DistDynamicMst>),
}

impl Engine {
    fn dynamic(&mut self) -> Option<&mut dyn DynamicMst> {
        match self {
            Engine::Dynamic(d) => Some(d.as_mut()),
            Engine::Dist(d) => Some(d.as_mut()),
            _ => None,
        }
    }
}

fn prim0(g: &WeightedGraph) -> dmst_core::Result<SpanningTree> {
    prim(g, 0)
}

pub fn run_one(
    g: WeightedGraph,
    updates: &[Scripted],
    cfg: &RunConfig,
    seed: u64,
) -> CliResult<RunReport> {
    let (n, m) = (g.n(), g.m());
    let mut tally = Tally::default();
    let mut trace = String::new();
    let mut ok = true;
    let mut swaps = 0;
    let mut last_swap = None;

    let ghs_cfg = |v| GhsConfig {
        wakeup: cfg.wakeup.clone(),
        trace: cfg.trace,
        ..GhsConfig::new(v, cfg.delay)
    };
    let protocol_run = |g: &WeightedGraph, v, tally: &mut Tally, trace: &mut String| {
        let out = dmst_core::ghs::run(g, &ghs_cfg(v))?;
        tally.add(&out.counters);
        tally.bound += message_bound(g.n(), g.m());
        trace.push_str(&out.trace);
        CliResult::Ok(out.tree)
    };

    let mut engine = match cfg.algo {
        Algo::Kruskal => Engine::Static(kruskal),
        Algo::Prim => Engine::Static(prim0),
        Algo::Ghs => Engine::Protocol(Variant::Ghs),
        Algo::ChinTing => Engine::Protocol(Variant::ChinTing),
        Algo::RespDmst => Engine::Dynamic(Box::new(ResponsibilityDmst::new(g.clone())?)),
        Algo::TopoDmst => Engine::Dynamic(Box::new(TopologyDmst::new(g.clone(), cfg.z)?)),
        Algo::DistDynamic => Engine::Dist(Box::new(DistDynamicMst::new(
            g.clone(),
            cfg.z,
            cfg.delay,
            cfg.trace,
        )?)),
    };

    let mut g = g;
    let mut t = match &mut engine {
        Engine::Static(f) => f(&g)?,
        Engine::Protocol(v) => protocol_run(&g, *v, &mut tally, &mut trace)?,
        Engine::Dynamic(d) => d.tree().clone(),
        Engine::Dist(d) => d.tree().clone(),
    };
    ok &= matches_oracle(&g, &t)?;

    for s in updates {
        let (e, w) = resolve(&g, s)?;
        g.set_weight(e, w)?;
        let before = t.clone();
        t = if let Some(d) = engine.dynamic() {
            if let UpdateOutcome::Swapped { out, entering } = d.set_weight(e, w)? {
                last_swap = Some((out, entering));
            }
            d.tree().clone()
        } else {
            let t = match &engine {
                Engine::Static(f) => f(&g)?,
                Engine::Protocol(v) => protocol_run(&g, *v, &mut tally, &mut trace)?,
                _ => unreachable!(),
            };
            if let Some(swap) = single_swap(&before, &t) {
                last_swap = Some(swap);
            }
            t
        };
        if before != t {
            swaps += 1;
        }
        ok &= matches_oracle(&g, &t)?;
    }

    if let Engine::Dist(d) = &engine {
        tally.add(d.inner().counters());
        trace = d.inner().trace_text();
    }

    let distributed = cfg.algo.is_distributed();
    let oracle_weight = kruskal(&g)?.weight(&g);
    let row = Row {
        seed,
        algorithm: cfg.algo.name(),
        n,
        m,
        delay: if distributed {
            cfg.delay.to_string()
        } else {
            String::new()
        },
        z: cfg.z.filter(|_| matches!(cfg.algo, Algo::TopoDmst | Algo::DistDynamic)),
        updates: updates.len(),
        swaps,
        messages: distributed.then_some(tally.total),
        by_type: tally.by_type,
        message_bound: matches!(cfg.algo, Algo::Ghs | Algo::ChinTing).then_some(tally.bound),
        completion_time: distributed
            .then(|| tally.ticks as f64 / dmst_core::sim::TICKS_PER_UNIT as f64),
        tree_weight: t.weight(&g),
        oracle_weight,
        oracle_match: ok,
    };
    Ok(RunReport {
        dot: dot(&g, &t, last_swap),
        row,
        trace,
    })
}

fn single_swap(a: &SpanningTree, b: &SpanningTree) -> Option<(EdgeId, EdgeId)> {
    let (out, inn) = dmst_core::oracle::tree_difference(a, b);
    (out.len() == 1 && inn.len() == 1).then(|| (out[0], inn[0]))
}
