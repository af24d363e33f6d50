//! Distributed MST maintenance under weight changes, on a graph of max
//! degree 3 whose MST is already known.
//!
//! Every process starts as a one-vertex cluster. Formation rounds merge
//! adjacent clusters by mutual proposal while the merged size stays within
//! z and the merged tree degree within 2. Leaders then report their
//! clusters and the per-pair non-tree minima to a coordinator (process 0),
//! which holds the upper levels and the 2-d minima. A weight change travels
//! from its endpoint to the coordinator; the coordinator floods either a
//! swap or a no-op. After a swap the clusters it touched are dissolved and
//! formation runs again.
//!
//! Phases are separated by quiescence. The driver starts each phase with
//! an injected message; those injections are control traffic.

use std::collections::{BTreeMap, BTreeSet};

use crate::dynamic::{DynamicMst, UpdateOutcome};
use crate::error::{Error, Result};
use crate::ghs::{GhsConfig, Variant};
use crate::graph::{ternarize, EdgeId, EdgeKey, SpanningTree, TernaryMapping, Vertex, WeightedGraph};
use crate::sim::{
    Counters, Ctx, DelayModel, Handled, LocalView, Payload, ProcessId, Protocol, Simulation,
    TraceRecord,
};
use crate::topology::{RestrictedPartition, TopologyHierarchy};

pub const COORDINATOR: ProcessId = 0;

/// Largest summed tree degree of two clusters that may merge: the result
/// then has degree at most 2.
const MERGE_DEGREE: u64 = 4;

/// One port of a reporting vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct PortInfo {
    pub edge: EdgeId,
    pub other: Vertex,
    pub other_cluster: Vertex,
    pub key: EdgeKey,
    pub tree: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MemberInfo {
    pub vertex: Vertex,
    pub cluster: Vertex,
    pub ports: Vec<PortInfo>,
}

/// A non-tree edge as a leader reports it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairEdge {
    pub edge: EdgeId,
    pub u: Vertex,
    pub v: Vertex,
    pub key: EdgeKey,
}

#[derive(Clone, Debug)]
pub enum DynMsg {
    // from the driver
    Round,
    Collect,
    Finish,
    Split,
    Change { edge: EdgeId, key: EdgeKey },
    // cluster formation
    SizeProbe,
    SizeReport { count: u64 },
    DegreeReport { degree: u64 },
    Info { cluster: Vertex, size: u64, degree: u64 },
    Test { cluster: Vertex, size: u64, degree: u64 },
    Accept { cluster: Vertex, size: u64 },
    Reject { cluster: Vertex },
    NbrReport { best: Option<(Vertex, EdgeId, u64)> },
    Propose { edge: EdgeId },
    JoinReq { cluster: Vertex, size: u64 },
    Adopt { cluster: Vertex },
    Ack { cluster: Vertex },
    // overlay reports
    Orient,
    Hello { id: Vertex, cluster: Vertex },
    MemberReport { members: Vec<MemberInfo> },
    ClusterReport { cluster: Vertex, members: Vec<MemberInfo> },
    MinReport {
        low: Vertex,
        high: Vertex,
        edges: Vec<PairEdge>,
        min: Option<EdgeKey>,
        full: bool,
    },
    // updates
    ChangeReport {
        edge: EdgeId,
        key: EdgeKey,
        other_cluster: Vertex,
        to_leader: bool,
    },
    SwapCmd { out: EdgeId, entering: EdgeId },
    NoOp { edge: EdgeId },
    SplitCmd { clusters: Vec<Vertex> },
}

fn key_text(k: &Option<EdgeKey>) -> String {
    match k {
        Some(k) => format!("{}/{}", k.weight, k.id.0),
        None => "none".into(),
    }
}

impl Payload for DynMsg {
    fn name(&self) -> &'static str {
        use DynMsg::*;
        match self {
            Round => "Round",
            Collect => "Collect",
            Finish => "Finish",
            Split => "Split",
            Change { .. } => "Change",
            SizeProbe => "SizeProbe",
            SizeReport { .. } => "SizeReport",
            DegreeReport { .. } => "DegreeReport",
            Info { .. } => "Info",
            Test { .. } => "Test",
            Accept { .. } => "Accept",
            Reject { .. } => "Reject",
            NbrReport { .. } => "NbrReport",
            Propose { .. } => "Propose",
            JoinReq { .. } => "JoinReq",
            Adopt { .. } => "Adopt",
            Ack { .. } => "Ack",
            Orient => "Orient",
            Hello { .. } => "Hello",
            MemberReport { .. } => "MemberReport",
            ClusterReport { .. } => "ClusterReport",
            MinReport { .. } => "MinReport",
            ChangeReport { .. } => "ChangeReport",
            SwapCmd { .. } => "SwapCmd",
            NoOp { .. } => "NoOp",
            SplitCmd { .. } => "SplitCmd",
        }
    }

    fn fields(&self) -> String {
        use DynMsg::*;
        match self {
            Change { edge, key } => format!("e={} w={}", edge.0, key.weight),
            SizeReport { count } => format!("count={count}"),
            DegreeReport { degree } => format!("degree={degree}"),
            Info {
                cluster,
                size,
                degree,
            }
            | Test {
                cluster,
                size,
                degree,
            } => format!("c={cluster} size={size} degree={degree}"),
            Accept { cluster, size } => format!("c={cluster} size={size}"),
            Reject { cluster } | Adopt { cluster } | Ack { cluster } => format!("c={cluster}"),
            NbrReport { best } => match best {
                Some((c, e, s)) => format!("c={c} e={} size={s}", e.0),
                None => "c=none".into(),
            },
            Propose { edge } | NoOp { edge } => format!("e={}", edge.0),
            JoinReq { cluster, size } => format!("c={cluster} size={size}"),
            Hello { id, cluster } => format!("id={id} c={cluster}"),
            MemberReport { members } => format!("members={}", members.len()),
            ClusterReport { cluster, members } => {
                format!("c={cluster} members={}", members.len())
            }
            MinReport {
                low,
                high,
                edges,
                min,
                full,
            } => format!(
                "pair={low}:{high} edges={} min={} full={full}",
                edges.len(),
                key_text(min)
            ),
            ChangeReport { edge, key, .. } => format!("e={} w={}", edge.0, key.weight),
            SwapCmd { out, entering } => format!("out={} in={}", out.0, entering.0),
            SplitCmd { clusters } => format!("clusters={clusters:?}").replace(' ', ""),
            _ => String::new(),
        }
    }

    fn is_control(&self) -> bool {
        matches!(
            self,
            DynMsg::Round | DynMsg::Collect | DynMsg::Finish | DynMsg::Split | DynMsg::Change { .. }
        )
    }
}

#[derive(Clone, Debug, Default)]
struct RoundState {
    probed: bool,
    sized: bool,
    wait_size: usize,
    wait_degree: usize,
    size: u64,
    degree: u64,
    info: Option<(Vertex, u64, u64)>,
    deferred: Vec<(usize, u64, u64)>,
    wait_replies: usize,
    wait_nbr: usize,
    /// Least mergeable neighbour cluster seen: (cluster, edge, its size, port).
    best: Option<(Vertex, EdgeId, u64, usize)>,
    reported: bool,
    /// Leader only: `Some` once decided.
    choice: Option<Option<Vertex>>,
    joins: Vec<Vertex>,
    join_path: BTreeMap<Vertex, usize>,
}

#[derive(Clone, Debug, Default)]
struct CollectState {
    oriented: bool,
    hellos: usize,
    wait_members: usize,
    members: Vec<MemberInfo>,
    sent: bool,
}

/// Coordinator-only state: the mirror of the clustered tree with its 2-d
/// minima, rebuilt from leader reports.
#[derive(Clone, Debug, Default)]
struct Coordinator {
    z: usize,
    members: Vec<MemberInfo>,
    claims: Vec<(Vertex, Vertex, Vec<PairEdge>, Option<EdgeKey>)>,
    mirror: Option<TopologyHierarchy>,
    leader_of: Vec<Vertex>,
    decision: Option<UpdateOutcome>,
    pending_split: Vec<Vertex>,
    stale: Option<String>,
}

/// One process of the distributed dynamic protocol.
#[derive(Clone, Debug)]
pub struct DynNode {
    id: Vertex,
    z: u64,
    ports: Vec<EdgeKey>,
    tree: Vec<bool>,
    in_cluster: Vec<bool>,
    cluster: Vertex,
    cparent: Option<usize>,
    up: Option<usize>,
    nbr: Vec<Option<(Vertex, Vertex)>>,
    round: RoundState,
    collect: CollectState,
    /// Leader only: owned pairs, by the other cluster.
    pairs: BTreeMap<Vertex, BTreeMap<EdgeId, PairEdge>>,
    largest: u64,
    coord: Option<Coordinator>,
}

impl DynNode {
    fn new(view: LocalView, tree: Vec<bool>, z: usize) -> Self {
        let d = view.ports.len();
        DynNode {
            id: view.id,
            z: z as u64,
            ports: view.ports,
            tree,
            in_cluster: vec![false; d],
            cluster: view.id,
            cparent: None,
            up: None,
            nbr: vec![None; d],
            round: RoundState::default(),
            collect: CollectState::default(),
            pairs: BTreeMap::new(),
            largest: 1,
            coord: (view.id == COORDINATOR).then(|| Coordinator {
                z,
                ..Coordinator::default()
            }),
        }
    }

    pub fn cluster(&self) -> Vertex {
        self.cluster
    }

    pub fn is_leader(&self) -> bool {
        self.cparent.is_none()
    }

    /// Incident tree edges as this process sees them.
    pub fn tree_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.ports
            .iter()
            .zip(&self.tree)
            .filter(|(_, &t)| t)
            .map(|(k, _)| k.id)
    }

    /// Largest cluster size this process counted while leading.
    pub fn largest(&self) -> u64 {
        self.largest
    }

    fn children(&self) -> Vec<usize> {
        (0..self.ports.len())
            .filter(|&p| self.in_cluster[p] && Some(p) != self.cparent)
            .collect()
    }

    fn boundary(&self) -> Vec<usize> {
        (0..self.ports.len())
            .filter(|&p| self.tree[p] && !self.in_cluster[p])
            .collect()
    }

    fn tree_ports(&self) -> Vec<usize> {
        (0..self.ports.len()).filter(|&p| self.tree[p]).collect()
    }

    fn port_of(&self, e: EdgeId) -> std::result::Result<usize, String> {
        self.ports
            .iter()
            .position(|k| k.id == e)
            .ok_or_else(|| format!("edge {e} is not incident"))
    }

    // ---- formation ----

    fn start_size(&mut self, ctx: &mut Ctx<'_, DynMsg>) {
        let kids = self.children();
        self.round.probed = true;
        self.round.wait_size = kids.len();
        self.round.wait_degree = kids.len();
        self.round.size = 1;
        self.round.degree = self.boundary().len() as u64;
        for p in kids {
            ctx.send(p, DynMsg::SizeProbe);
        }
        self.size_done(ctx);
    }

    fn size_done(&mut self, ctx: &mut Ctx<'_, DynMsg>) {
        let r = &mut self.round;
        if !r.probed || r.sized || r.wait_size > 0 || r.wait_degree > 0 {
            return;
        }
        r.sized = true;
        let (size, degree) = (r.size, r.degree);
        match self.cparent {
            None => {
                self.largest = self.largest.max(size);
                self.take_info(self.id, size, degree, ctx);
            }
            Some(p) => {
                ctx.send(p, DynMsg::SizeReport { count: size });
                ctx.send(p, DynMsg::DegreeReport { degree });
            }
        }
    }

    fn take_info(&mut self, cluster: Vertex, size: u64, degree: u64, ctx: &mut Ctx<'_, DynMsg>) {
        self.round.info = Some((cluster, size, degree));
        let kids = self.children();
        for &p in &kids {
            ctx.send(
                p,
                DynMsg::Info {
                    cluster,
                    size,
                    degree,
                },
            );
        }
        let bound = self.boundary();
        for &p in &bound {
            ctx.send(
                p,
                DynMsg::Test {
                    cluster,
                    size,
                    degree,
                },
            );
        }
        self.round.wait_replies = bound.len();
        self.round.wait_nbr = kids.len();
        for (p, s, d) in std::mem::take(&mut self.round.deferred) {
            self.answer(p, s, d, ctx);
        }
        self.check_nbr(ctx);
    }

    fn answer(&self, port: usize, size: u64, degree: u64, ctx: &mut Ctx<'_, DynMsg>) {
        let (c, s, d) = self.round.info.expect("answer before info");
        if s + size <= self.z && d + degree <= MERGE_DEGREE {
            ctx.send(port, DynMsg::Accept { cluster: c, size: s });
        } else {
            ctx.send(port, DynMsg::Reject { cluster: c });
        }
    }

    fn consider(&mut self, cluster: Vertex, edge: EdgeId, size: u64, port: usize) {
        if self.round.best.is_none_or(|b| cluster < b.0) {
            self.round.best = Some((cluster, edge, size, port));
        }
    }

    fn check_nbr(&mut self, ctx: &mut Ctx<'_, DynMsg>) {
        let r = &self.round;
        if r.info.is_none() || r.reported || r.wait_replies > 0 || r.wait_nbr > 0 {
            return;
        }
        self.round.reported = true;
        match self.cparent {
            Some(p) => {
                let best = self.round.best.map(|(c, e, s, _)| (c, e, s));
                ctx.send(p, DynMsg::NbrReport { best });
            }
            None => {
                let choice = self.round.best.map(|b| b.0);
                self.round.choice = Some(choice);
                if let Some((_, e, _, _)) = self.round.best {
                    self.route_propose(e, ctx);
                }
                for c in std::mem::take(&mut self.round.joins) {
                    self.leader_join(c, ctx);
                }
            }
        }
    }

    fn route_propose(&mut self, e: EdgeId, ctx: &mut Ctx<'_, DynMsg>) {
        let Some((_, edge, other, p)) = self.round.best else {
            return;
        };
        debug_assert_eq!(edge, e);
        if self.tree[p] && !self.in_cluster[p] {
            let own = self.round.info.map_or(0, |i| i.1);
            ctx.send(
                p,
                DynMsg::JoinReq {
                    cluster: self.cluster,
                    size: own + other,
                },
            );
        } else {
            ctx.send(p, DynMsg::Propose { edge });
        }
    }

    fn leader_join(&mut self, c: Vertex, ctx: &mut Ctx<'_, DynMsg>) {
        match self.round.choice {
            None => self.round.joins.push(c),
            Some(Some(x)) if x == c && self.id > c => self.adopt(c, ctx),
            Some(_) => {}
        }
    }

    /// Joins cluster `a`, reversing parent pointers along the path to the
    /// merging edge.
    fn adopt(&mut self, a: Vertex, ctx: &mut Ctx<'_, DynMsg>) {
        let kids = self.children();
        let toward = self.round.join_path.get(&a).copied();
        self.cluster = a;
        for p in kids {
            if Some(p) != toward {
                ctx.send(p, DynMsg::Adopt { cluster: a });
            }
        }
        if let Some(p) = toward {
            if self.in_cluster[p] {
                ctx.send(p, DynMsg::Adopt { cluster: a });
            } else {
                self.in_cluster[p] = true;
                ctx.send(p, DynMsg::Ack { cluster: a });
            }
            self.cparent = Some(p);
        }
    }

    fn dissolve(&mut self) {
        self.cluster = self.id;
        self.cparent = None;
        self.in_cluster.iter_mut().for_each(|x| *x = false);
    }

    // ---- reports ----

    fn start_collect(&mut self) {
        self.collect = CollectState {
            wait_members: self.children().len(),
            ..CollectState::default()
        };
        self.nbr.iter_mut().for_each(|x| *x = None);
        self.pairs.clear();
    }

    fn orient(&mut self, from: Option<usize>, ctx: &mut Ctx<'_, DynMsg>) -> Handled {
        self.up = from;
        for p in self.tree_ports() {
            if Some(p) != from {
                ctx.send(p, DynMsg::Orient);
            }
        }
        for p in 0..self.ports.len() {
            ctx.send(
                p,
                DynMsg::Hello {
                    id: self.id,
                    cluster: self.cluster,
                },
            );
        }
        self.collect.oriented = true;
        self.check_collect(ctx)
    }

    fn check_collect(&mut self, ctx: &mut Ctx<'_, DynMsg>) -> Handled {
        let c = &self.collect;
        if !c.oriented || c.sent || c.hellos < self.ports.len() || c.wait_members > 0 {
            return Ok(());
        }
        self.collect.sent = true;
        let mut ports = Vec::with_capacity(self.ports.len());
        for (p, k) in self.ports.iter().enumerate() {
            let (other, other_cluster) = self.nbr[p].ok_or("missing hello")?;
            ports.push(PortInfo {
                edge: k.id,
                other,
                other_cluster,
                key: *k,
                tree: self.tree[p],
            });
        }
        let mut members = std::mem::take(&mut self.collect.members);
        members.push(MemberInfo {
            vertex: self.id,
            cluster: self.cluster,
            ports,
        });
        match self.cparent {
            Some(p) => {
                ctx.send(p, DynMsg::MemberReport { members });
                Ok(())
            }
            None => self.leader_report(members, ctx),
        }
    }

    fn leader_report(&mut self, members: Vec<MemberInfo>, ctx: &mut Ctx<'_, DynMsg>) -> Handled {
        let own = self.cluster;
        for m in &members {
            for p in m.ports.iter().filter(|p| !p.tree && own <= p.other_cluster) {
                self.pairs.entry(p.other_cluster).or_default().insert(
                    p.edge,
                    PairEdge {
                        edge: p.edge,
                        u: m.vertex,
                        v: p.other,
                        key: p.key,
                    },
                );
            }
        }
        let mut out = vec![DynMsg::ClusterReport {
            cluster: own,
            members,
        }];
        for (&j, set) in &self.pairs {
            out.push(DynMsg::MinReport {
                low: own,
                high: j,
                edges: set.values().copied().collect(),
                min: set.values().map(|x| x.key).min(),
                full: true,
            });
        }
        for msg in out {
            self.to_coordinator(msg, ctx)?;
        }
        Ok(())
    }

    fn to_coordinator(&mut self, msg: DynMsg, ctx: &mut Ctx<'_, DynMsg>) -> Handled {
        match (self.up, self.coord.is_some()) {
            (_, true) => self.coordinate(msg, ctx),
            (Some(p), false) => {
                ctx.send(p, msg);
                Ok(())
            }
            (None, false) => Err("no route to the coordinator".into()),
        }
    }

    fn change(&mut self, edge: EdgeId, key: EdgeKey, ctx: &mut Ctx<'_, DynMsg>) -> Handled {
        let p = self.port_of(edge)?;
        self.ports[p] = key;
        let (other, other_cluster) = self.nbr[p].ok_or("change before hello")?;
        if self.tree[p] {
            if self.id < other {
                let msg = DynMsg::ChangeReport {
                    edge,
                    key,
                    other_cluster,
                    to_leader: false,
                };
                self.to_coordinator(msg, ctx)?;
            }
            return Ok(());
        }
        // the endpoint in the owning (lower) cluster acts; the lower id
        // breaks the tie inside one cluster
        let acts = match self.cluster.cmp(&other_cluster) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => self.id < other,
        };
        if acts {
            let msg = DynMsg::ChangeReport {
                edge,
                key,
                other_cluster,
                to_leader: true,
            };
            match self.cparent {
                Some(p) => ctx.send(p, msg),
                None => self.leader_change(edge, key, other_cluster, ctx)?,
            }
        }
        Ok(())
    }

    fn leader_change(
        &mut self,
        edge: EdgeId,
        key: EdgeKey,
        other: Vertex,
        ctx: &mut Ctx<'_, DynMsg>,
    ) -> Handled {
        let set = self
            .pairs
            .get_mut(&other)
            .ok_or_else(|| format!("no pair with cluster {other}"))?;
        let entry = set
            .get_mut(&edge)
            .ok_or_else(|| format!("edge {edge} not in pair with {other}"))?;
        entry.key = key;
        let changed = *entry;
        let min = set.values().map(|x| x.key).min();
        let msg = DynMsg::MinReport {
            low: self.cluster,
            high: other,
            edges: vec![changed],
            min,
            full: false,
        };
        self.to_coordinator(msg, ctx)
    }

    fn flood(&mut self, from: Option<usize>, msg: &DynMsg, ctx: &mut Ctx<'_, DynMsg>) {
        for p in self.tree_ports() {
            if Some(p) != from {
                ctx.send(p, msg.clone());
            }
        }
    }

    fn apply_swap(&mut self, out: EdgeId, entering: EdgeId) {
        for (p, k) in self.ports.iter().enumerate() {
            if k.id == out {
                self.tree[p] = false;
            } else if k.id == entering {
                self.tree[p] = true;
            }
        }
    }

    fn split(&mut self, from: Option<usize>, clusters: Vec<Vertex>, ctx: &mut Ctx<'_, DynMsg>) {
        let msg = DynMsg::SplitCmd {
            clusters: clusters.clone(),
        };
        self.flood(from, &msg, ctx);
        if clusters.contains(&self.cluster) {
            self.dissolve();
        }
    }

    // ---- coordinator ----

    fn coordinate(&mut self, msg: DynMsg, ctx: &mut Ctx<'_, DynMsg>) -> Handled {
        let co = self.coord.as_mut().ok_or("not the coordinator")?;
        match msg {
            DynMsg::ClusterReport { members, .. } => co.members.extend(members),
            DynMsg::MinReport {
                low,
                high,
                edges,
                min,
                full: true,
            } => co.claims.push((low, high, edges, min)),
            DynMsg::MinReport {
                low,
                high,
                edges,
                min,
                full: false,
            } => {
                let [changed] = edges[..] else {
                    return Err("update report must carry one edge".into());
                };
                if let Err(s) = co.check_update_claim(low, high, changed, min) {
                    co.stale = Some(s);
                    return Ok(());
                }
                self.decide(changed.edge, changed.key, ctx)?;
            }
            DynMsg::ChangeReport { edge, key, .. } => self.decide(edge, key, ctx)?,
            other => return Err(format!("coordinator cannot handle {}", other.name())),
        }
        Ok(())
    }

    fn decide(&mut self, e: EdgeId, key: EdgeKey, ctx: &mut Ctx<'_, DynMsg>) -> Handled {
        let co = self.coord.as_mut().ok_or("not the coordinator")?;
        let mirror = co.mirror.as_mut().ok_or("no overlay yet")?;
        let outcome = mirror
            .set_weight(e, key.weight)
            .map_err(|err| err.to_string())?;
        co.decision = Some(outcome);
        let msg = match outcome {
            UpdateOutcome::Swapped { out, entering } => {
                let g = mirror.graph();
                let (a, b) = g.endpoints(out);
                let (c, d) = g.endpoints(entering);
                let touched: BTreeSet<Vertex> =
                    [a, b, c, d].into_iter().map(|x| co.leader_of[x]).collect();
                co.pending_split = touched.into_iter().collect();
                DynMsg::SwapCmd { out, entering }
            }
            UpdateOutcome::Unchanged => DynMsg::NoOp { edge: e },
        };
        // flood over the old tree, then switch
        self.flood(None, &msg, ctx);
        if let DynMsg::SwapCmd { out, entering } = msg {
            self.apply_swap(out, entering);
        }
        Ok(())
    }
}

impl Coordinator {
    /// The changed edge must belong to the claimed pair, and the claimed
    /// minimum must agree with the overlay's copy of that pair.
    fn check_update_claim(
        &self,
        low: Vertex,
        high: Vertex,
        changed: PairEdge,
        min: Option<EdgeKey>,
    ) -> std::result::Result<(), String> {
        let mirror = self.mirror.as_ref().ok_or("no overlay")?;
        let (a, b) = (self.leader_of[changed.u], self.leader_of[changed.v]);
        if (a.min(b), a.max(b)) != (low, high) {
            return Err(format!(
                "edge {} reported for pair {low}:{high}, overlay has {}:{}",
                changed.edge,
                a.min(b),
                a.max(b)
            ));
        }
        let p = mirror.partition();
        let set = mirror
            .two_dim()
            .leaf_set(p.cluster_of(changed.u), p.cluster_of(changed.v))
            .ok_or_else(|| format!("pair {low}:{high} missing from overlay"))?;
        let old = mirror.graph().key(changed.edge);
        let mut set = set.clone();
        if !set.remove(&old) {
            return Err(format!("edge {} missing from pair {low}:{high}", changed.edge));
        }
        set.insert(changed.key);
        if set.first().copied() != min {
            return Err(format!(
                "pair {low}:{high} claims minimum {}, overlay has {}",
                key_text(&min),
                key_text(&set.first().copied())
            ));
        }
        Ok(())
    }

    /// Rebuilds the overlay from the reports of one collection phase.
    fn rebuild(&mut self) -> std::result::Result<(), String> {
        let mut members = std::mem::take(&mut self.members);
        let claims = std::mem::take(&mut self.claims);
        members.sort_by_key(|m| m.vertex);
        let n = members.len();
        if members.iter().enumerate().any(|(i, m)| m.vertex != i) {
            return Err("reports do not cover every vertex exactly once".into());
        }
        let mut edges: BTreeMap<EdgeId, (Vertex, Vertex, EdgeKey, bool)> = BTreeMap::new();
        for m in &members {
            for p in &m.ports {
                let (u, v) = (m.vertex.min(p.other), m.vertex.max(p.other));
                let entry = (u, v, p.key, p.tree);
                if let Some(prev) = edges.insert(p.edge, entry) {
                    if prev != entry {
                        return Err(format!("endpoints disagree on edge {}", p.edge));
                    }
                }
            }
        }
        let mut g = WeightedGraph::new(n);
        for (i, (&e, &(u, v, k, _))) in edges.iter().enumerate() {
            if e.0 != i {
                return Err(format!("edge ids are not contiguous at {e}"));
            }
            g.add_edge(u, v, k.weight, format!("e{}", e.0))
                .map_err(|err| err.to_string())?;
        }
        let t = SpanningTree::from_edges_unchecked(
            edges.iter().filter(|(_, x)| x.3).map(|(&e, _)| e),
        );
        if let Some(old) = &self.mirror {
            if old.tree() != &t {
                return Err("reported tree differs from the overlay's".into());
            }
        }
        let mut by_cluster: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
        for m in &members {
            by_cluster.entry(m.cluster).or_default().insert(m.vertex);
        }
        self.leader_of = members.iter().map(|m| m.cluster).collect();
        let part = RestrictedPartition::from_clusters(n, self.z, by_cluster.into_values().collect());
        let mirror = TopologyHierarchy::with_partition(g, t, part, BTreeSet::new())
            .map_err(|err| err.to_string())?;
        // every leader's pair minima must match the overlay leaves
        let p = mirror.partition();
        let mut claimed = 0;
        for (low, high, list, min) in claims {
            let (u, v) = list
                .first()
                .map(|x| (x.u, x.v))
                .ok_or("empty pair report")?;
            let set = mirror
                .two_dim()
                .leaf_set(p.cluster_of(u), p.cluster_of(v))
                .ok_or_else(|| format!("pair {low}:{high} missing from overlay"))?;
            let keys: BTreeSet<EdgeKey> = list.iter().map(|x| x.key).collect();
            if &keys != set || set.first().copied() != min {
                return Err(format!("pair {low}:{high} disagrees with the overlay"));
            }
            claimed += 1;
        }
        if claimed != mirror.two_dim().leaf_count() {
            return Err("some overlay pairs were never reported".into());
        }
        self.mirror = Some(mirror);
        Ok(())
    }
}

impl Protocol for DynNode {
    type Msg = DynMsg;

    fn wake(&mut self, _: &mut Ctx<'_, DynMsg>) -> Handled {
        Ok(())
    }

    fn inject(&mut self, msg: DynMsg, ctx: &mut Ctx<'_, DynMsg>) -> Handled {
        match msg {
            DynMsg::Round => {
                self.round = RoundState::default();
                if self.is_leader() {
                    self.start_size(ctx);
                }
            }
            DynMsg::Collect => {
                self.start_collect();
                if self.coord.is_some() {
                    self.orient(None, ctx)?;
                }
            }
            DynMsg::Finish => {
                let co = self.coord.as_mut().ok_or("finish at a non-coordinator")?;
                if let Err(s) = co.rebuild() {
                    co.stale = Some(s);
                }
            }
            DynMsg::Split => {
                let co = self.coord.as_mut().ok_or("split at a non-coordinator")?;
                let clusters = std::mem::take(&mut co.pending_split);
                self.split(None, clusters, ctx);
            }
            DynMsg::Change { edge, key } => self.change(edge, key, ctx)?,
            other => return Err(format!("unexpected injected {}", other.name())),
        }
        Ok(())
    }

    fn receive(&mut self, port: usize, msg: DynMsg, ctx: &mut Ctx<'_, DynMsg>) -> Handled {
        use DynMsg::*;
        match msg {
            SizeProbe => self.start_size(ctx),
            SizeReport { count } => {
                self.round.size += count;
                self.round.wait_size -= 1;
                self.size_done(ctx);
            }
            DegreeReport { degree } => {
                self.round.degree += degree;
                self.round.wait_degree -= 1;
                self.size_done(ctx);
            }
            Info {
                cluster,
                size,
                degree,
            } => self.take_info(cluster, size, degree, ctx),
            Test { size, degree, .. } => {
                if self.round.info.is_some() {
                    self.answer(port, size, degree, ctx);
                } else {
                    self.round.deferred.push((port, size, degree));
                }
            }
            Accept { cluster, size } => {
                self.consider(cluster, self.ports[port].id, size, port);
                self.round.wait_replies -= 1;
                self.check_nbr(ctx);
            }
            Reject { .. } => {
                self.round.wait_replies -= 1;
                self.check_nbr(ctx);
            }
            NbrReport { best } => {
                if let Some((c, e, s)) = best {
                    self.consider(c, e, s, port);
                }
                self.round.wait_nbr -= 1;
                self.check_nbr(ctx);
            }
            Propose { edge } => self.route_propose(edge, ctx),
            JoinReq { cluster, size } => {
                self.round.join_path.insert(cluster, port);
                match self.cparent {
                    Some(p) => ctx.send(p, JoinReq { cluster, size }),
                    None => self.leader_join(cluster, ctx),
                }
            }
            Adopt { cluster } => self.adopt(cluster, ctx),
            Ack { .. } => self.in_cluster[port] = true,
            Orient => self.orient(Some(port), ctx)?,
            Hello { id, cluster } => {
                self.nbr[port] = Some((id, cluster));
                self.collect.hellos += 1;
                self.check_collect(ctx)?;
            }
            MemberReport { members } => {
                self.collect.members.extend(members);
                self.collect.wait_members -= 1;
                self.check_collect(ctx)?;
            }
            m @ (ClusterReport { .. } | MinReport { .. }) => self.to_coordinator(m, ctx)?,
            ChangeReport {
                edge,
                key,
                other_cluster,
                to_leader: true,
            } => match self.cparent {
                Some(p) => ctx.send(
                    p,
                    ChangeReport {
                        edge,
                        key,
                        other_cluster,
                        to_leader: true,
                    },
                ),
                None => self.leader_change(edge, key, other_cluster, ctx)?,
            },
            m @ ChangeReport { .. } => self.to_coordinator(m, ctx)?,
            m @ SwapCmd { out, entering } => {
                self.flood(Some(port), &m, ctx);
                self.apply_swap(out, entering);
            }
            m @ NoOp { .. } => self.flood(Some(port), &m, ctx),
            SplitCmd { clusters } => self.split(Some(port), clusters, ctx),
            other => return Err(format!("unexpected {} from a neighbour", other.name())),
        }
        Ok(())
    }
}

/// Parameters of a distributed dynamic run.
#[derive(Clone, Debug)]
pub struct DistConfig {
    pub z: usize,
    pub delay: DelayModel,
    pub trace: bool,
}

impl DistConfig {
    pub fn new(z: usize, delay: DelayModel) -> Self {
        DistConfig {
            z,
            delay,
            trace: false,
        }
    }
}

/// Driver for [`DynNode`] processes over a graph of max degree 3.
pub struct DistDynamic {
    sim: Simulation<DynNode>,
    g: WeightedGraph,
    t: SpanningTree,
    rounds: usize,
}

impl std::fmt::Debug for DistDynamic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DistDynamic")
            .field("n", &self.g.n())
            .field("rounds", &self.rounds)
            .finish()
    }
}

impl DistDynamic {
    /// Starts from a known MST `t`: forms clusters and builds the overlay.
    pub fn new(g: WeightedGraph, t: SpanningTree, cfg: &DistConfig) -> Result<Self> {
        if cfg.z == 0 {
            return Err(Error::InvalidParameter("z must be at least 1".into()));
        }
        if let Some(v) = (0..g.n()).find(|&v| g.degree(v) > 3) {
            return Err(Error::DegreeTooHigh {
                vertex: v,
                degree: g.degree(v),
            });
        }
        t.validate(&g)?;
        let sim = Simulation::new(&g, cfg.delay, |view| {
            let tree = view.ports.iter().map(|k| t.contains(k.id)).collect();
            DynNode::new(view, tree, cfg.z)
        })
        .with_trace(cfg.trace);
        let mut d = DistDynamic {
            sim,
            g,
            t,
            rounds: 0,
        };
        d.form()?;
        d.collect()?;
        Ok(d)
    }

    /// Computes the starting MST with GHS under the same delay model.
    pub fn from_ghs(g: WeightedGraph, cfg: &DistConfig) -> Result<Self> {
        let ghs = crate::ghs::run(&g, &GhsConfig::new(Variant::Ghs, cfg.delay))?;
        Self::new(g, ghs.tree, cfg)
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.g
    }

    /// The tree as the driver last read it from the processes.
    pub fn tree(&self) -> &SpanningTree {
        &self.t
    }

    pub fn counters(&self) -> &Counters {
        self.sim.counters()
    }

    pub fn trace(&self) -> &[TraceRecord] {
        self.sim.trace()
    }

    pub fn trace_text(&self) -> String {
        self.sim.trace_text()
    }

    /// Formation rounds run so far.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn node(&self, v: Vertex) -> &DynNode {
        self.sim.process(v)
    }

    /// The coordinator's overlay.
    pub fn overlay(&self) -> &TopologyHierarchy {
        self.sim
            .process(COORDINATOR)
            .coord
            .as_ref()
            .and_then(|c| c.mirror.as_ref())
            .expect("overlay is built on construction")
    }

    /// Current clusters, read from the processes.
    pub fn partition(&self, z: usize) -> RestrictedPartition {
        let mut by: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
        for (v, node) in self.sim.processes().iter().enumerate() {
            by.entry(node.cluster).or_default().insert(v);
        }
        RestrictedPartition::from_clusters(self.g.n(), z, by.into_values().collect())
    }

    /// Largest cluster any leader has counted.
    pub fn largest_cluster(&self) -> u64 {
        self.sim.processes().iter().map(|p| p.largest).max().unwrap_or(0)
    }

    fn phase(&mut self) -> Result<()> {
        self.sim.run_to_quiescence()?;
        let co = self.sim.process_mut(COORDINATOR).coord.as_mut();
        match co.and_then(|c| c.stale.take()) {
            Some(s) => Err(Error::StaleOverlay(s)),
            None => Ok(()),
        }
    }

    fn form(&mut self) -> Result<()> {
        loop {
            let before = self.sim.counters().count("Ack");
            for v in 0..self.g.n() {
                self.sim.inject(v, DynMsg::Round);
            }
            self.phase()?;
            self.rounds += 1;
            if self.sim.counters().count("Ack") == before {
                return Ok(());
            }
        }
    }

    fn collect(&mut self) -> Result<()> {
        for v in 0..self.g.n() {
            self.sim.inject(v, DynMsg::Collect);
        }
        self.phase()?;
        self.sim.inject(COORDINATOR, DynMsg::Finish);
        self.phase()?;
        self.t = self.read_tree()?;
        Ok(())
    }

    /// Both endpoints of every edge must agree on whether it is in the tree.
    fn read_tree(&self) -> Result<SpanningTree> {
        let mut marks: BTreeMap<EdgeId, usize> = BTreeMap::new();
        for p in self.sim.processes() {
            for e in p.tree_edges() {
                *marks.entry(e).or_insert(0) += 1;
            }
        }
        if let Some((&e, _)) = marks.iter().find(|(_, &c)| c != 2) {
            return Err(Error::ProtocolViolation {
                event: self.sim.trace().len(),
                msg: format!("edge {e} is a tree edge at one end only"),
            });
        }
        Ok(SpanningTree::from_edges_unchecked(marks.into_keys()))
    }

    /// Changes the weight of `e` and lets the processes repair the tree.
    pub fn set_weight(&mut self, e: EdgeId, weight: f64) -> Result<UpdateOutcome> {
        self.g.check_weight(e, weight)?;
        self.g.set_weight(e, weight)?;
        let key = self.g.key(e);
        let (u, v) = self.g.endpoints(e);
        self.sim.inject(u, DynMsg::Change { edge: e, key });
        self.sim.inject(v, DynMsg::Change { edge: e, key });
        self.phase()?;
        let outcome = self
            .sim
            .process_mut(COORDINATOR)
            .coord
            .as_mut()
            .and_then(|c| c.decision.take())
            .ok_or_else(|| Error::ProtocolViolation {
                event: self.sim.trace().len(),
                msg: format!("no decision for the change of {e}"),
            })?;
        if outcome.is_swap() {
            self.sim.inject(COORDINATOR, DynMsg::Split);
            self.phase()?;
            self.form()?;
            self.collect()?;
        } else {
            self.t = self.read_tree()?;
        }
        Ok(outcome)
    }
}

/// [`DistDynamic`] over an arbitrary graph, run on its degree-3 expansion.
///
/// Chain edges sit below every original weight; a change to a weight at or
/// below the heaviest chain edge is refused.
#[derive(Debug)]
pub struct DistDynamicMst {
    g: WeightedGraph,
    t: SpanningTree,
    map: TernaryMapping,
    inner: DistDynamic,
}

impl DistDynamicMst {
    /// Expands `g`, computes its MST with GHS, then forms clusters. `z`
    /// defaults to `ceil(sqrt(m))` of the expanded graph.
    pub fn new(g: WeightedGraph, z: Option<usize>, delay: DelayModel, trace: bool) -> Result<Self> {
        g.check_connected()?;
        let (x, map) = ternarize(&g)?;
        let cfg = DistConfig {
            z: z.unwrap_or_else(|| crate::topology::default_z(x.m())),
            delay,
            trace,
        };
        let ghs = crate::ghs::run(&x, &GhsConfig::new(Variant::Ghs, delay))?;
        let inner = DistDynamic::new(x, ghs.tree, &cfg)?;
        let t = SpanningTree::from_edges_unchecked(
            map.contract_edges(inner.tree().edges().iter().copied()),
        );
        Ok(DistDynamicMst { g, t, map, inner })
    }

    pub fn inner(&self) -> &DistDynamic {
        &self.inner
    }

    pub fn mapping(&self) -> &TernaryMapping {
        &self.map
    }

    fn chain_ceiling(&self) -> Option<f64> {
        self.map
            .internal_edges
            .iter()
            .map(|&e| self.inner.graph().weight(e))
            .max_by(f64::total_cmp)
    }
}

impl DynamicMst for DistDynamicMst {
    fn graph(&self) -> &WeightedGraph {
        &self.g
    }

    fn tree(&self) -> &SpanningTree {
        &self.t
    }

    fn set_weight(&mut self, e: EdgeId, weight: f64) -> Result<UpdateOutcome> {
        self.g.check_weight(e, weight)?;
        if let Some(c) = self.chain_ceiling().filter(|&c| weight <= c) {
            return Err(Error::InvalidParameter(format!(
                "weight {weight} is not above the expansion's chain weights ({c})"
            )));
        }
        let outcome = self.inner.set_weight(e, weight)?;
        self.g.set_weight(e, weight)?;
        if let UpdateOutcome::Swapped { out, entering } = outcome {
            self.t.swap(out, entering);
        }
        Ok(outcome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_graph;
    use crate::static_mst::kruskal;
    use crate::topology::check_conditions;

    fn start(g: &WeightedGraph, z: usize) -> DistDynamic {
        let t = kruskal(g).unwrap();
        DistDynamic::new(g.clone(), t, &DistConfig::new(z, DelayModel::Seeded(3))).unwrap()
    }

    fn path(n: usize) -> WeightedGraph {
        let mut text = format!("{n} {}\n", n - 1);
        for i in 0..n - 1 {
            text += &format!("{i} {} {} p{i}\n", i + 1, i + 1);
        }
        load_graph(&text).unwrap()
    }

    #[test]
    fn large_z_gives_one_cluster() {
        let g = path(7);
        let d = start(&g, 7);
        assert_eq!(d.partition(7).len(), 1);
        assert_eq!(d.largest_cluster(), 7);
    }

    #[test]
    fn z_one_gives_singletons() {
        let g = path(5);
        let d = start(&g, 1);
        assert_eq!(d.partition(1).len(), 5);
        assert_eq!(d.rounds(), 1);
    }

    #[test]
    fn path_of_six_pairs_up() {
        let g = path(6);
        let d = start(&g, 2);
        let p = d.partition(2);
        let got: Vec<BTreeSet<Vertex>> = p.clusters().values().cloned().collect();
        let want: Vec<BTreeSet<Vertex>> =
            vec![[0, 1].into(), [2, 3].into(), [4, 5].into()];
        assert_eq!(got, want);
        assert!(check_conditions(&g, d.tree(), &p).is_pass());
    }

    #[test]
    fn non_tree_increase_is_a_no_op() {
        let g = load_graph("3 3\n0 1 1 a\n1 2 2 b\n0 2 3 c\n").unwrap();
        let mut d = start(&g, 2);
        let before = d.counters().count("SwapCmd");
        assert_eq!(
            d.set_weight(EdgeId(2), 9.0).unwrap(),
            UpdateOutcome::Unchanged
        );
        assert_eq!(d.counters().count("SwapCmd"), before);
        assert!(d.counters().count("NoOp") > 0);
    }

    #[test]
    fn triangle_swap() {
        let g = load_graph("3 3\n0 1 1 a\n1 2 2 b\n0 2 3 c\n").unwrap();
        let mut d = start(&g, 2);
        assert_eq!(
            d.set_weight(EdgeId(1), 5.0).unwrap(),
            UpdateOutcome::Swapped {
                out: EdgeId(1),
                entering: EdgeId(2)
            }
        );
        assert_eq!(d.tree(), &kruskal(d.graph()).unwrap());
        assert!(check_conditions(d.graph(), d.tree(), &d.partition(2)).is_pass());
    }

    #[test]
    fn rejects_high_degree() {
        let g = load_graph("5 4\n0 1 1 a\n0 2 2 b\n0 3 3 c\n0 4 4 d\n").unwrap();
        let t = kruskal(&g).unwrap();
        assert!(matches!(
            DistDynamic::new(g, t, &DistConfig::new(2, DelayModel::Unit)),
            Err(Error::DegreeTooHigh { vertex: 0, .. })
        ));
    }

    #[test]
    fn wrong_pair_claim_is_stale() {
        let g = load_graph("4 4\n0 1 1 a\n1 2 2 b\n2 3 3 c\n0 3 9 d\n").unwrap();
        let mut d = start(&g, 2);
        // the coordinator forgets which cluster vertex 3 is in
        let co = d.sim.process_mut(COORDINATOR).coord.as_mut().unwrap();
        co.leader_of[3] = 1;
        assert!(matches!(
            d.set_weight(EdgeId(3), 8.0),
            Err(Error::StaleOverlay(_))
        ));
    }
}
