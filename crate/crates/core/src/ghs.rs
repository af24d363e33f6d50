//! The Gallager–Humblet–Spira distributed MST protocol, and the Chin–Ting
//! variant that keeps a fragment's level in step with its size.
//!
//! Each vertex runs a [`GhsNode`]. Messages that cannot be answered yet
//! (a Test from a higher level, a Connect on a Basic edge at equal level,
//! a core Report while still searching) wait in the node's pending queue,
//! which is re-examined after every event. Termination: a core node that
//! finds both halves reporting ∞ broadcasts `Halt` over its branches.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeKey, SpanningTree, WeightedGraph};
use crate::sim::{
    Counters, Ctx, DelayModel, Handled, LocalView, Payload, Protocol, Simulation, Wakeup,
    TICKS_PER_UNIT,
};

/// Report weight meaning "no outgoing edge".
pub const INFINITE: EdgeKey = EdgeKey {
    weight: f64::INFINITY,
    id: EdgeId(usize::MAX),
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Ghs,
    ChinTing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sleeping,
    Find,
    Found,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeState {
    Basic,
    Branch,
    Rejected,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GhsMsg {
    Connect {
        level: u32,
    },
    Initiate {
        core: EdgeKey,
        level: u32,
        find: bool,
    },
    Test {
        core: EdgeKey,
        level: u32,
    },
    Accept,
    Reject,
    /// `count` is the Chin–Ting size counter; absent in plain GHS.
    Report {
        best: EdgeKey,
        count: Option<u64>,
    },
    ChangeCore,
    Halt,
}

fn fmt_key(k: EdgeKey) -> String {
    if k == INFINITE {
        "inf".into()
    } else {
        format!("{}", k.weight)
    }
}

impl Payload for GhsMsg {
    fn name(&self) -> &'static str {
        match self {
            GhsMsg::Connect { .. } => "Connect",
            GhsMsg::Initiate { .. } => "Initiate",
            GhsMsg::Test { .. } => "Test",
            GhsMsg::Accept => "Accept",
            GhsMsg::Reject => "Reject",
            GhsMsg::Report { .. } => "Report",
            GhsMsg::ChangeCore => "ChangeCore",
            GhsMsg::Halt => "Halt",
        }
    }

    fn fields(&self) -> String {
        match self {
            GhsMsg::Connect { level } => format!("L={level}"),
            GhsMsg::Initiate { core, level, find } => format!(
                "w={} L={level} s={}",
                fmt_key(*core),
                if *find { "Find" } else { "Found" }
            ),
            GhsMsg::Test { core, level } => format!("w={} L={level}", fmt_key(*core)),
            GhsMsg::Report { best, count } => match count {
                Some(c) => format!("w={} count={c}", fmt_key(*best)),
                None => format!("w={}", fmt_key(*best)),
            },
            _ => String::new(),
        }
    }

    fn is_control(&self) -> bool {
        matches!(self, GhsMsg::Halt)
    }
}

/// One completed search as seen by a core node: the level it ran at, the
/// level after any root level increase, and the counted fragment size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SearchRecord {
    pub core: EdgeId,
    pub level: u32,
    pub raised_to: u32,
    pub size: u64,
    /// Index of this search among those of the same core on this node.
    pub round: u32,
}

#[derive(Clone, Debug)]
pub struct GhsNode {
    variant: Variant,
    ports: Vec<EdgeKey>,
    se: Vec<EdgeState>,
    mode: Mode,
    level: u32,
    core: Option<EdgeKey>,
    in_branch: Option<usize>,
    best_edge: Option<usize>,
    best_wt: EdgeKey,
    test_edge: Option<usize>,
    find_count: usize,
    /// Nodes counted below and including this one in the current search.
    count: u64,
    pending: VecDeque<(usize, GhsMsg)>,
    /// (time, level, core) each time this node adopts a fragment identity.
    adoptions: Vec<(u64, u32, Option<EdgeKey>)>,
    searches: Vec<SearchRecord>,
    halted: bool,
}

impl GhsNode {
    pub fn new(view: LocalView, variant: Variant) -> Self {
        let d = view.ports.len();
        GhsNode {
            variant,
            ports: view.ports,
            se: vec![EdgeState::Basic; d],
            mode: Mode::Sleeping,
            level: 0,
            core: None,
            in_branch: None,
            best_edge: None,
            best_wt: INFINITE,
            test_edge: None,
            find_count: 0,
            count: 0,
            pending: VecDeque::new(),
            adoptions: Vec::new(),
            searches: Vec::new(),
            halted: false,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn core(&self) -> Option<EdgeKey> {
        self.core
    }

    pub fn edge_states(&self) -> impl Iterator<Item = (EdgeId, EdgeState)> + '_ {
        self.ports.iter().map(|k| k.id).zip(self.se.iter().copied())
    }

    pub fn adoptions(&self) -> &[(u64, u32, Option<EdgeKey>)] {
        &self.adoptions
    }

    pub fn searches(&self) -> &[SearchRecord] {
        &self.searches
    }

    pub fn is_halted(&self) -> bool {
        self.halted
    }

    fn adopt(&mut self, now: u64) {
        self.adoptions.push((now, self.level, self.core));
    }

    fn wakeup(&mut self, ctx: &mut Ctx<'_, GhsMsg>) {
        if self.mode != Mode::Sleeping {
            return;
        }
        self.level = 0;
        self.mode = Mode::Found;
        self.find_count = 0;
        self.adopt(ctx.now());
        let Some(m) = (0..self.ports.len()).min_by_key(|&p| self.ports[p]) else {
            // a lone vertex is already its own spanning tree
            self.halted = true;
            ctx.halt();
            return;
        };
        self.se[m] = EdgeState::Branch;
        ctx.send(m, GhsMsg::Connect { level: 0 });
    }

    fn branches_except(&self, skip: Option<usize>) -> Vec<usize> {
        (0..self.ports.len())
            .filter(|&p| Some(p) != skip && self.se[p] == EdgeState::Branch)
            .collect()
    }

    /// Starts a search at the current identity: broadcast, then test.
    fn start_search(&mut self, ctx: &mut Ctx<'_, GhsMsg>, find: bool) {
        self.best_edge = None;
        self.best_wt = INFINITE;
        self.count = 1;
        let core = self.core.expect("search needs a core");
        for p in self.branches_except(self.in_branch) {
            ctx.send(
                p,
                GhsMsg::Initiate {
                    core,
                    level: self.level,
                    find,
                },
            );
            if find {
                self.find_count += 1;
            }
        }
        if find {
            self.test(ctx);
        }
    }

    fn test(&mut self, ctx: &mut Ctx<'_, GhsMsg>) {
        let basic = (0..self.ports.len())
            .filter(|&p| self.se[p] == EdgeState::Basic)
            .min_by_key(|&p| self.ports[p]);
        match basic {
            Some(p) => {
                self.test_edge = Some(p);
                ctx.send(
                    p,
                    GhsMsg::Test {
                        core: self.core.expect("tester has a core"),
                        level: self.level,
                    },
                );
            }
            None => {
                self.test_edge = None;
                self.report(ctx);
            }
        }
    }

    fn report(&mut self, ctx: &mut Ctx<'_, GhsMsg>) {
        if self.find_count == 0 && self.test_edge.is_none() && self.mode == Mode::Find {
            self.mode = Mode::Found;
            let count = (self.variant == Variant::ChinTing).then_some(self.count);
            let p = self.in_branch.expect("reporting node has a parent");
            ctx.send(
                p,
                GhsMsg::Report {
                    best: self.best_wt,
                    count,
                },
            );
        }
    }

    fn change_core(&mut self, ctx: &mut Ctx<'_, GhsMsg>) -> Handled {
        let b = self.best_edge.ok_or("change of core without a best edge")?;
        if self.se[b] == EdgeState::Branch {
            ctx.send(b, GhsMsg::ChangeCore);
        } else {
            ctx.send(b, GhsMsg::Connect { level: self.level });
            self.se[b] = EdgeState::Branch;
        }
        Ok(())
    }

    fn halt(&mut self, ctx: &mut Ctx<'_, GhsMsg>, from: Option<usize>) {
        for p in self.branches_except(from) {
            ctx.send(p, GhsMsg::Halt);
        }
        self.halted = true;
        ctx.halt();
    }

    /// Handles one message; `Ok(false)` means it must wait.
    fn handle(&mut self, j: usize, msg: GhsMsg, ctx: &mut Ctx<'_, GhsMsg>) -> Result<bool, String> {
        match msg {
            GhsMsg::Connect { level } => {
                self.wakeup(ctx);
                if self.se[j] == EdgeState::Rejected {
                    return Err(format!("Connect on rejected port {j}"));
                }
                if level < self.level {
                    // absorb
                    self.se[j] = EdgeState::Branch;
                    let find = self.mode == Mode::Find;
                    ctx.send(
                        j,
                        GhsMsg::Initiate {
                            core: self.core.expect("absorbing node has a core"),
                            level: self.level,
                            find,
                        },
                    );
                    if find {
                        self.find_count += 1;
                    }
                } else if self.se[j] == EdgeState::Basic {
                    return Ok(false);
                } else {
                    // combine along the common MOE
                    ctx.send(
                        j,
                        GhsMsg::Initiate {
                            core: self.ports[j],
                            level: self.level + 1,
                            find: true,
                        },
                    );
                }
            }
            GhsMsg::Initiate { core, level, find } => {
                self.level = level;
                self.core = Some(core);
                self.mode = if find { Mode::Find } else { Mode::Found };
                self.in_branch = Some(j);
                self.adopt(ctx.now());
                self.start_search(ctx, find);
            }
            GhsMsg::Test { core, level } => {
                self.wakeup(ctx);
                if level > self.level {
                    return Ok(false);
                }
                if Some(core) != self.core {
                    ctx.send(j, GhsMsg::Accept);
                } else {
                    if self.se[j] == EdgeState::Basic {
                        self.se[j] = EdgeState::Rejected;
                    }
                    if self.test_edge != Some(j) {
                        ctx.send(j, GhsMsg::Reject);
                    } else {
                        self.test(ctx);
                    }
                }
            }
            GhsMsg::Accept => {
                if self.test_edge != Some(j) {
                    return Err(format!("Accept on port {j} that was not tested"));
                }
                self.test_edge = None;
                if self.ports[j] < self.best_wt {
                    self.best_edge = Some(j);
                    self.best_wt = self.ports[j];
                }
                self.report(ctx);
            }
            GhsMsg::Reject => {
                if self.test_edge != Some(j) {
                    return Err(format!("Reject on port {j} that was not tested"));
                }
                if self.se[j] == EdgeState::Basic {
                    self.se[j] = EdgeState::Rejected;
                }
                self.test(ctx);
            }
            GhsMsg::Report { best, count } => {
                if self.se[j] != EdgeState::Branch {
                    return Err(format!("Report on non-branch port {j}"));
                }
                if Some(j) != self.in_branch {
                    if self.find_count == 0 {
                        return Err(format!("unexpected Report on port {j}"));
                    }
                    self.find_count -= 1;
                    self.count += count.unwrap_or(0);
                    if best < self.best_wt {
                        self.best_wt = best;
                        self.best_edge = Some(j);
                    }
                    self.report(ctx);
                } else if self.mode == Mode::Find {
                    return Ok(false);
                } else {
                    self.core_decision(j, best, count, ctx)?;
                }
            }
            GhsMsg::ChangeCore => {
                if self.se[j] != EdgeState::Branch {
                    return Err(format!("ChangeCore on non-branch port {j}"));
                }
                self.change_core(ctx)?;
            }
            GhsMsg::Halt => {
                self.halt(ctx, Some(j));
            }
        }
        Ok(true)
    }

    /// A core node has both halves' reports.
    fn core_decision(
        &mut self,
        j: usize,
        best: EdgeKey,
        count: Option<u64>,
        ctx: &mut Ctx<'_, GhsMsg>,
    ) -> Handled {
        if self.variant == Variant::ChinTing {
            let size = self.count + count.unwrap_or(0);
            let before = self.level;
            let mut raised = before;
            while size >= 1u64 << (raised + 1) {
                raised += 1;
            }
            let core = self.core.expect("core node has a core");
            let round = self.searches.iter().filter(|s| s.core == core.id).count() as u32;
            self.searches.push(SearchRecord {
                core: core.id,
                level: before,
                raised_to: raised,
                size,
                round,
            });
            if raised != before {
                self.level = raised;
                if best == INFINITE && self.best_wt == INFINITE {
                    self.halt(ctx, Some(j));
                    return Ok(());
                }
                // root level increase: search again at the new level
                self.mode = Mode::Find;
                self.adopt(ctx.now());
                self.start_search(ctx, true);
                return Ok(());
            }
        }
        if best > self.best_wt {
            self.change_core(ctx)?;
        } else if best == INFINITE && self.best_wt == INFINITE {
            self.halt(ctx, Some(j));
        }
        Ok(())
    }

    /// Retries waiting messages until none makes progress.
    fn drain(&mut self, ctx: &mut Ctx<'_, GhsMsg>) -> Handled {
        loop {
            let mut progressed = false;
            for _ in 0..self.pending.len() {
                let (j, msg) = self.pending.pop_front().unwrap();
                if self.handle(j, msg.clone(), ctx)? {
                    progressed = true;
                } else {
                    self.pending.push_back((j, msg));
                }
            }
            if !progressed {
                return Ok(());
            }
        }
    }
}

impl Protocol for GhsNode {
    type Msg = GhsMsg;

    fn wake(&mut self, ctx: &mut Ctx<'_, GhsMsg>) -> Handled {
        self.wakeup(ctx);
        self.drain(ctx)
    }

    fn receive(&mut self, port: usize, msg: GhsMsg, ctx: &mut Ctx<'_, GhsMsg>) -> Handled {
        if self.halted {
            return Err(format!("{} after halting", msg.name()));
        }
        if !self.handle(port, msg.clone(), ctx)? {
            self.pending.push_back((port, msg));
            return Ok(());
        }
        self.drain(ctx)
    }
}

/// A fragment identity and how many nodes ever adopted it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelRecord {
    pub core: EdgeId,
    pub level: u32,
    pub size: usize,
    /// First adoption, in ticks.
    pub created: u64,
}

#[derive(Clone, Debug)]
pub struct GhsOutcome {
    pub tree: SpanningTree,
    pub counters: Counters,
    /// Fragments of level ≥ 1, ordered by creation.
    pub history: Vec<LevelRecord>,
    /// Per node, the first time (in ticks) it reached each level.
    pub level_times: Vec<BTreeMap<u32, u64>>,
    /// Chin–Ting searches, deduplicated across the two core nodes.
    pub searches: Vec<SearchRecord>,
    pub trace: String,
}

impl GhsOutcome {
    pub fn max_level(&self) -> u32 {
        self.history.iter().map(|r| r.level).max().unwrap_or(0)
    }
}

/// 2m + 5n(⌊log2 n⌋ + 1).
pub fn message_bound(n: usize, m: usize) -> u64 {
    let log = if n <= 1 { 0 } else { n.ilog2() as u64 };
    2 * m as u64 + 5 * n as u64 * (log + 1)
}

/// 5lN − 3N units, in ticks: when every node should be at level `l` under
/// unit delays and simultaneous wakeup.
pub fn level_time_bound(l: u32, n: usize) -> u64 {
    (5 * l as u64 * n as u64).saturating_sub(3 * n as u64) * TICKS_PER_UNIT
}

#[derive(Clone, Debug)]
pub struct GhsConfig {
    pub variant: Variant,
    pub delay: DelayModel,
    pub wakeup: Wakeup,
    pub trace: bool,
}

impl GhsConfig {
    pub fn new(variant: Variant, delay: DelayModel) -> Self {
        GhsConfig {
            variant,
            delay,
            wakeup: Wakeup::Lowest,
            trace: false,
        }
    }
}

pub fn run(g: &WeightedGraph, cfg: &GhsConfig) -> Result<GhsOutcome> {
    g.check_connected()?;
    let variant = cfg.variant;
    let mut sim = Simulation::new(g, cfg.delay, |v| GhsNode::new(v, variant)).with_trace(cfg.trace);
    sim.run(&cfg.wakeup)?;
    collect(g, &sim)
}

pub fn run_ghs(g: &WeightedGraph, delay: DelayModel, wakeup: Wakeup) -> Result<GhsOutcome> {
    run(
        g,
        &GhsConfig {
            wakeup,
            ..GhsConfig::new(Variant::Ghs, delay)
        },
    )
}

pub fn run_chin_ting(g: &WeightedGraph, delay: DelayModel, wakeup: Wakeup) -> Result<GhsOutcome> {
    run(
        g,
        &GhsConfig {
            wakeup,
            ..GhsConfig::new(Variant::ChinTing, delay)
        },
    )
}

fn collect(g: &WeightedGraph, sim: &Simulation<GhsNode>) -> Result<GhsOutcome> {
    let mut marks: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for node in sim.processes() {
        for (e, s) in node.edge_states() {
            if s == EdgeState::Branch {
                *marks.entry(e).or_insert(0) += 1;
            }
        }
    }
    if let Some((&e, _)) = marks.iter().find(|(_, &c)| c != 2) {
        return Err(Error::ProtocolViolation {
            event: sim.trace().len(),
            msg: format!("edge {e} is a branch at one end only"),
        });
    }
    let tree = SpanningTree::new(g, marks.into_keys())?;

    let mut fragments: BTreeMap<(EdgeId, u32), (BTreeSet<usize>, u64)> = BTreeMap::new();
    let mut level_times = Vec::with_capacity(g.n());
    for (v, node) in sim.processes().iter().enumerate() {
        let mut first: BTreeMap<u32, u64> = BTreeMap::new();
        for &(t, level, core) in node.adoptions() {
            first.entry(level).or_insert(t);
            if let Some(c) = core {
                let f = fragments
                    .entry((c.id, level))
                    .or_insert((BTreeSet::new(), t));
                f.0.insert(v);
                f.1 = f.1.min(t);
            }
        }
        // a node that skipped a level reached it at the same moment
        let top = first.keys().max().copied().unwrap_or(0);
        for l in (0..top).rev() {
            if !first.contains_key(&l) {
                let t = first[&(l + 1)];
                first.insert(l, t);
            }
        }
        level_times.push(first);
    }
    let mut history: Vec<LevelRecord> = fragments
        .into_iter()
        .map(|((core, level), (members, created))| LevelRecord {
            core,
            level,
            size: members.len(),
            created,
        })
        .collect();
    history.sort_by_key(|r| (r.created, r.core, r.level));
    let searches: BTreeSet<SearchRecord> = sim
        .processes()
        .iter()
        .flat_map(|p| p.searches().iter().copied())
        .collect();
    Ok(GhsOutcome {
        tree,
        counters: sim.counters().clone(),
        history,
        level_times,
        searches: searches.into_iter().collect(),
        trace: sim.trace_text(),
    })
}
