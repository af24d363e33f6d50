//! Deterministic discrete-event simulation of asynchronous processes
//! talking over FIFO channels, one process per vertex and one channel per
//! edge.
//!
//! Time is kept in integer ticks, [`TICKS_PER_UNIT`] to the unit, so every
//! delay is an exact rational in (0, 1]. Events at the same instant are
//! ordered by (sender, channel, per-sender sequence number), which makes a
//! run a pure function of the graph, the protocol, the delay model and the
//! wakeup set.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeKey, Vertex, WeightedGraph};

pub type ProcessId = Vertex;

pub const TICKS_PER_UNIT: u64 = 1024;

/// Default bound on processed events before a run is declared runaway.
pub const DEFAULT_EVENT_CEILING: usize = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DelayModel {
    /// Every message takes exactly one unit.
    Unit,
    /// Delays drawn uniformly from 1..=1024 ticks by ChaCha8 with this seed.
    Seeded(u64),
}

impl fmt::Display for DelayModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DelayModel::Unit => write!(f, "unit"),
            DelayModel::Seeded(s) => write!(f, "seeded:{s}"),
        }
    }
}

/// Which processes wake spontaneously at time 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Wakeup {
    /// Only process 0.
    #[default]
    Lowest,
    All,
    Set(Vec<ProcessId>),
}

impl Wakeup {
    fn members(&self, n: usize) -> Vec<ProcessId> {
        match self {
            Wakeup::Lowest => vec![0],
            Wakeup::All => (0..n).collect(),
            Wakeup::Set(v) => v.clone(),
        }
    }
}

/// A message type that can be traced and counted.
pub trait Payload: Clone + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Space-separated `key=value` fields, in a fixed order.
    fn fields(&self) -> String {
        String::new()
    }

    /// Control messages are counted apart from the protocol total.
    fn is_control(&self) -> bool {
        false
    }
}

/// What a process knows at start: its id and the keys of its incident
/// edges, indexed by port.
#[derive(Clone, Debug)]
pub struct LocalView {
    pub id: ProcessId,
    pub ports: Vec<EdgeKey>,
}

/// Handle passed to a process while it handles one event.
pub struct Ctx<'a, M> {
    id: ProcessId,
    now: u64,
    ports: &'a [EdgeId],
    out: Vec<(usize, M)>,
    halt: bool,
}

impl<M> Ctx<'_, M> {
    pub fn id(&self) -> ProcessId {
        self.id
    }

    /// Current time in ticks.
    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn degree(&self) -> usize {
        self.ports.len()
    }

    pub fn send(&mut self, port: usize, msg: M) {
        assert!(port < self.ports.len(), "port {port} out of range");
        self.out.push((port, msg));
    }

    pub fn halt(&mut self) {
        self.halt = true;
    }
}

pub type Handled = std::result::Result<(), String>;

/// A process: a transition function over wakeups, deliveries and
/// harness injections. An `Err` aborts the run as a protocol violation.
pub trait Protocol {
    type Msg: Payload;

    fn wake(&mut self, ctx: &mut Ctx<'_, Self::Msg>) -> Handled;

    fn receive(&mut self, port: usize, msg: Self::Msg, ctx: &mut Ctx<'_, Self::Msg>) -> Handled;

    /// A message from the harness rather than a neighbour.
    fn inject(&mut self, msg: Self::Msg, _ctx: &mut Ctx<'_, Self::Msg>) -> Handled {
        Err(format!("unexpected injected {}", msg.name()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceKind {
    Send,
    Deliver,
    Wakeup,
    Inject,
    Halt,
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceKind::Send => "send",
            TraceKind::Deliver => "deliver",
            TraceKind::Wakeup => "wakeup",
            TraceKind::Inject => "inject",
            TraceKind::Halt => "halt",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRecord {
    pub time: u64,
    pub kind: TraceKind,
    pub src: ProcessId,
    pub dst: ProcessId,
    pub msg_type: &'static str,
    pub channel: Option<EdgeId>,
    /// Sender's sequence number of the message; 0 for halts.
    pub seq: u64,
    pub fields: String,
}

/// Formats ticks as a decimal number of units; exact since the tick count
/// is a power of two.
pub fn format_time(ticks: u64) -> String {
    format!("{}", ticks as f64 / TICKS_PER_UNIT as f64)
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t={} kind={} src={} dst={} type={} ch={} seq={}",
            format_time(self.time),
            self.kind,
            self.src,
            self.dst,
            self.msg_type,
            self.channel.map_or("-".to_string(), |e| e.0.to_string()),
            self.seq
        )?;
        if !self.fields.is_empty() {
            write!(f, " {}", self.fields)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    /// Protocol messages sent, by type.
    pub by_type: BTreeMap<&'static str, u64>,
    /// Control messages sent, by type; not part of `total`.
    pub control: BTreeMap<&'static str, u64>,
    pub total: u64,
    /// Time of the last processed event, in ticks.
    pub completion: u64,
}

impl Counters {
    pub fn completion_time(&self) -> f64 {
        self.completion as f64 / TICKS_PER_UNIT as f64
    }

    pub fn count(&self, name: &str) -> u64 {
        self.by_type
            .get(name)
            .or_else(|| self.control.get(name))
            .copied()
            .unwrap_or(0)
    }
}

#[derive(Debug)]
enum EventKind<M> {
    Wakeup,
    Deliver { port: usize, msg: M },
    Inject { msg: M },
}

#[derive(Debug)]
struct Event<M> {
    /// (time, sender, channel, sequence)
    key: (u64, ProcessId, usize, u64),
    dst: ProcessId,
    kind: EventKind<M>,
}

impl<M> PartialEq for Event<M> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl<M> Eq for Event<M> {}

impl<M> PartialOrd for Event<M> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<M> Ord for Event<M> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key.cmp(&other.key)
    }
}

const NO_CHANNEL: usize = usize::MAX;

pub struct Simulation<P: Protocol> {
    procs: Vec<P>,
    /// Edge behind each port of each process.
    ports: Vec<Vec<EdgeId>>,
    /// For each edge: (u, port at u, v, port at v).
    ends: Vec<(ProcessId, usize, ProcessId, usize)>,
    queue: BinaryHeap<Reverse<Event<P::Msg>>>,
    now: u64,
    seq: Vec<u64>,
    /// Latest scheduled delivery per (sender, edge), for FIFO order.
    last_delivery: HashMap<(ProcessId, EdgeId), u64>,
    delay: DelayModel,
    rng: ChaCha8Rng,
    counters: Counters,
    trace: Option<Vec<TraceRecord>>,
    halted: Vec<bool>,
    events: usize,
    ceiling: usize,
}

impl<P: Protocol> fmt::Debug for Simulation<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Simulation")
            .field("processes", &self.procs.len())
            .field("channels", &self.ends.len())
            .field("now", &self.now)
            .field("pending", &self.queue.len())
            .finish()
    }
}

impl<P: Protocol> Simulation<P> {
    /// One process per vertex, built by `factory` from its local view.
    pub fn new(
        g: &WeightedGraph,
        delay: DelayModel,
        mut factory: impl FnMut(LocalView) -> P,
    ) -> Self {
        let mut ends = Vec::with_capacity(g.m());
        let mut ports: Vec<Vec<EdgeId>> = vec![Vec::new(); g.n()];
        for e in g.edges() {
            let pu = ports[e.u].len();
            ports[e.u].push(e.id);
            let pv = ports[e.v].len();
            ports[e.v].push(e.id);
            ends.push((e.u, pu, e.v, pv));
        }
        let procs = (0..g.n())
            .map(|id| {
                factory(LocalView {
                    id,
                    ports: ports[id].iter().map(|&e| g.key(e)).collect(),
                })
            })
            .collect();
        let seed = match delay {
            DelayModel::Unit => 0,
            DelayModel::Seeded(s) => s,
        };
        Simulation {
            procs,
            ports,
            ends,
            queue: BinaryHeap::new(),
            now: 0,
            seq: vec![0; g.n()],
            last_delivery: HashMap::new(),
            delay,
            rng: ChaCha8Rng::seed_from_u64(seed),
            counters: Counters::default(),
            trace: Some(Vec::new()),
            halted: vec![false; g.n()],
            events: 0,
            ceiling: DEFAULT_EVENT_CEILING,
        }
    }

    /// Turns trace recording on or off; on by default.
    pub fn with_trace(mut self, on: bool) -> Self {
        self.trace = on.then(Vec::new);
        self
    }

    pub fn with_ceiling(mut self, ceiling: usize) -> Self {
        self.ceiling = ceiling;
        self
    }

    pub fn n_processes(&self) -> usize {
        self.procs.len()
    }

    pub fn n_channels(&self) -> usize {
        self.ends.len()
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn processes(&self) -> &[P] {
        &self.procs
    }

    pub fn process(&self, id: ProcessId) -> &P {
        &self.procs[id]
    }

    pub fn process_mut(&mut self, id: ProcessId) -> &mut P {
        &mut self.procs[id]
    }

    pub fn is_halted(&self, id: ProcessId) -> bool {
        self.halted[id]
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    pub fn reset_counters(&mut self) {
        self.counters = Counters {
            completion: self.now,
            ..Counters::default()
        };
    }

    pub fn trace(&self) -> &[TraceRecord] {
        self.trace.as_deref().unwrap_or(&[])
    }

    /// The trace, one line per record.
    pub fn trace_text(&self) -> String {
        let mut s = String::new();
        for r in self.trace() {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }

    fn next_seq(&mut self, p: ProcessId) -> u64 {
        self.seq[p] += 1;
        self.seq[p] - 1
    }

    /// Schedules wakeups at the current time.
    pub fn wake(&mut self, who: &Wakeup) {
        for p in who.members(self.procs.len()) {
            let s = self.next_seq(p);
            self.queue.push(Reverse(Event {
                key: (self.now, p, NO_CHANNEL, s),
                dst: p,
                kind: EventKind::Wakeup,
            }));
        }
    }

    /// Hands `msg` to process `dst` at the current time, from outside.
    pub fn inject(&mut self, dst: ProcessId, msg: P::Msg) {
        let s = self.next_seq(dst);
        self.queue.push(Reverse(Event {
            key: (self.now, dst, NO_CHANNEL, s),
            dst,
            kind: EventKind::Inject { msg },
        }));
    }

    fn record(&mut self, r: TraceRecord) {
        if let Some(t) = &mut self.trace {
            t.push(r);
        }
    }

    fn draw_delay(&mut self) -> u64 {
        match self.delay {
            DelayModel::Unit => TICKS_PER_UNIT,
            DelayModel::Seeded(_) => self.rng.gen_range(1..=TICKS_PER_UNIT),
        }
    }

    /// Processes events until none is pending.
    pub fn run_to_quiescence(&mut self) -> Result<()> {
        while let Some(Reverse(ev)) = self.queue.pop() {
            self.events += 1;
            if self.events > self.ceiling {
                return Err(Error::EventCeiling {
                    ceiling: self.ceiling,
                    time: ev.key.0 as f64 / TICKS_PER_UNIT as f64,
                });
            }
            let (time, src, ch, seq) = ev.key;
            self.now = time;
            self.counters.completion = time;
            let dst = ev.dst;
            let mut ctx = Ctx {
                id: dst,
                now: time,
                ports: &self.ports[dst],
                out: Vec::new(),
                halt: false,
            };
            let (record, outcome) = match ev.kind {
                EventKind::Wakeup => (
                    TraceRecord {
                        time,
                        kind: TraceKind::Wakeup,
                        src,
                        dst,
                        msg_type: "-",
                        channel: None,
                        seq,
                        fields: String::new(),
                    },
                    self.procs[dst].wake(&mut ctx),
                ),
                EventKind::Deliver { port, msg } => (
                    TraceRecord {
                        time,
                        kind: TraceKind::Deliver,
                        src,
                        dst,
                        msg_type: msg.name(),
                        channel: Some(EdgeId(ch)),
                        seq,
                        fields: msg.fields(),
                    },
                    self.procs[dst].receive(port, msg, &mut ctx),
                ),
                EventKind::Inject { msg } => (
                    TraceRecord {
                        time,
                        kind: TraceKind::Inject,
                        src,
                        dst,
                        msg_type: msg.name(),
                        channel: None,
                        seq,
                        fields: msg.fields(),
                    },
                    self.procs[dst].inject(msg, &mut ctx),
                ),
            };
            let Ctx { out, halt, .. } = ctx;
            self.record(record);
            if let Err(msg) = outcome {
                return Err(Error::ProtocolViolation {
                    event: self.events - 1,
                    msg: format!("process {dst} at t={}: {msg}", format_time(time)),
                });
            }
            for (port, msg) in out {
                self.send(dst, port, msg);
            }
            if halt && !self.halted[dst] {
                self.halted[dst] = true;
                self.record(TraceRecord {
                    time,
                    kind: TraceKind::Halt,
                    src: dst,
                    dst,
                    msg_type: "-",
                    channel: None,
                    seq: 0,
                    fields: String::new(),
                });
            }
        }
        Ok(())
    }

    fn send(&mut self, src: ProcessId, port: usize, msg: P::Msg) {
        let e = self.ports[src][port];
        let (u, pu, v, pv) = self.ends[e.0];
        let (dst, dst_port) = if u == src { (v, pv) } else { (u, pu) };
        let seq = self.next_seq(src);
        let d = self.draw_delay();
        let last = self.last_delivery.entry((src, e)).or_insert(0);
        let at = (self.now + d).max(*last);
        *last = at;
        let name = msg.name();
        if msg.is_control() {
            *self.counters.control.entry(name).or_insert(0) += 1;
        } else {
            *self.counters.by_type.entry(name).or_insert(0) += 1;
            self.counters.total += 1;
        }
        if self.trace.is_some() {
            self.record(TraceRecord {
                time: self.now,
                kind: TraceKind::Send,
                src,
                dst,
                msg_type: name,
                channel: Some(e),
                seq,
                fields: msg.fields(),
            });
        }
        self.queue.push(Reverse(Event {
            key: (at, src, e.0, seq),
            dst,
            kind: EventKind::Deliver {
                port: dst_port,
                msg,
            },
        }));
    }

    /// Wakes `who`, runs to quiescence, and requires every process to have
    /// halted.
    pub fn run(&mut self, who: &Wakeup) -> Result<&Counters> {
        self.wake(who);
        self.run_to_quiescence()?;
        let running = self.halted.iter().filter(|h| !**h).count();
        if running > 0 {
            return Err(Error::NotHalted { running });
        }
        Ok(&self.counters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GraphKind};
    use crate::graph::load_graph;

    #[derive(Clone, Debug)]
    struct Token(u32);

    impl Payload for Token {
        fn name(&self) -> &'static str {
            "Token"
        }
        fn fields(&self) -> String {
            format!("hops={}", self.0)
        }
    }

    /// Halts at once.
    struct Idle;

    impl Protocol for Idle {
        type Msg = Token;
        fn wake(&mut self, ctx: &mut Ctx<'_, Token>) -> Handled {
            ctx.halt();
            Ok(())
        }
        fn receive(&mut self, _: usize, _: Token, _: &mut Ctx<'_, Token>) -> Handled {
            Err("idle process got a message".into())
        }
    }

    /// Flooding: the first token received (or the wakeup) is forwarded on
    /// every port, and the process halts.
    struct Flood {
        done: bool,
        got: Vec<(usize, u32)>,
    }

    impl Protocol for Flood {
        type Msg = Token;
        fn wake(&mut self, ctx: &mut Ctx<'_, Token>) -> Handled {
            if !self.done {
                self.done = true;
                for p in 0..ctx.degree() {
                    ctx.send(p, Token(1));
                }
                ctx.halt();
            }
            Ok(())
        }
        fn receive(&mut self, port: usize, t: Token, ctx: &mut Ctx<'_, Token>) -> Handled {
            self.got.push((port, t.0));
            if !self.done {
                self.done = true;
                for p in 0..ctx.degree() {
                    ctx.send(p, Token(t.0 + 1));
                }
                ctx.halt();
            }
            Ok(())
        }
    }

    fn flood(g: &WeightedGraph, delay: DelayModel) -> Simulation<Flood> {
        Simulation::new(g, delay, |_| Flood {
            done: false,
            got: Vec::new(),
        })
    }

    #[test]
    fn network_shape() {
        let g = load_graph("2 1\n0 1 1 a\n").unwrap();
        let s = flood(&g, DelayModel::Unit);
        assert_eq!((s.n_processes(), s.n_channels()), (2, 1));
        let g = load_graph("3 3\n0 1 1 a\n1 2 2 b\n0 2 3 c\n").unwrap();
        let s = flood(&g, DelayModel::Unit);
        assert_eq!((s.n_processes(), s.n_channels()), (3, 3));
        let g = generate(GraphKind::Random, 64, 200, 3).unwrap();
        let s = flood(&g, DelayModel::Seeded(1));
        assert_eq!((s.n_processes(), s.n_channels(), s.pending()), (64, 200, 0));
    }

    #[test]
    fn idle_protocol_sends_nothing() {
        let g = generate(GraphKind::Path, 5, 0, 0).unwrap();
        let mut s = Simulation::new(&g, DelayModel::Unit, |_| Idle);
        let c = s.run(&Wakeup::All).unwrap().clone();
        assert_eq!(c.total, 0);
        assert_eq!(c.completion, 0);
    }

    #[test]
    fn unhalted_processes_are_reported() {
        let g = generate(GraphKind::Path, 3, 0, 0).unwrap();
        let mut s = Simulation::new(&g, DelayModel::Unit, |_| Idle);
        assert_eq!(
            s.run(&Wakeup::Set(vec![1])).unwrap_err(),
            Error::NotHalted { running: 2 }
        );
    }

    #[test]
    fn violation_carries_position() {
        let g = load_graph("2 1\n0 1 1 a\n").unwrap();
        let mut s = Simulation::new(&g, DelayModel::Unit, |v| {
            if v.id == 0 {
                Box::new(Flood {
                    done: false,
                    got: Vec::new(),
                }) as Box<dyn Protocol<Msg = Token>>
            } else {
                Box::new(Idle)
            }
        });
        s.wake(&Wakeup::Lowest);
        match s.run_to_quiescence() {
            Err(Error::ProtocolViolation { event, .. }) => assert_eq!(event, 1),
            other => panic!("{other:?}"),
        }
    }

    impl<M: Payload> Protocol for Box<dyn Protocol<Msg = M>> {
        type Msg = M;
        fn wake(&mut self, ctx: &mut Ctx<'_, M>) -> Handled {
            (**self).wake(ctx)
        }
        fn receive(&mut self, port: usize, msg: M, ctx: &mut Ctx<'_, M>) -> Handled {
            (**self).receive(port, msg, ctx)
        }
    }

    #[test]
    fn ceiling_stops_runaway() {
        struct PingPong;
        impl Protocol for PingPong {
            type Msg = Token;
            fn wake(&mut self, ctx: &mut Ctx<'_, Token>) -> Handled {
                ctx.send(0, Token(0));
                Ok(())
            }
            fn receive(&mut self, port: usize, t: Token, ctx: &mut Ctx<'_, Token>) -> Handled {
                ctx.send(port, Token(t.0 + 1));
                Ok(())
            }
        }
        let g = load_graph("2 1\n0 1 1 a\n").unwrap();
        let mut s = Simulation::new(&g, DelayModel::Unit, |_| PingPong).with_ceiling(100);
        assert!(matches!(
            s.run(&Wakeup::Lowest),
            Err(Error::EventCeiling { ceiling: 100, .. })
        ));
    }

    #[test]
    fn same_seed_same_trace() {
        let g = generate(GraphKind::Random, 30, 80, 9).unwrap();
        let mut a = flood(&g, DelayModel::Seeded(5));
        let mut b = flood(&g, DelayModel::Seeded(5));
        a.run(&Wakeup::Lowest).unwrap();
        b.run(&Wakeup::Lowest).unwrap();
        assert_eq!(a.trace_text(), b.trace_text());
        let mut c = flood(&g, DelayModel::Seeded(6));
        c.run(&Wakeup::Lowest).unwrap();
        assert_ne!(a.trace_text(), c.trace_text());
    }

    #[test]
    fn flood_counts_two_per_edge() {
        let g = generate(GraphKind::Random, 20, 50, 2).unwrap();
        let mut s = flood(&g, DelayModel::Seeded(3));
        let c = s.run(&Wakeup::Lowest).unwrap();
        assert_eq!(c.total, 100);
        assert_eq!(c.count("Token"), 100);
        assert!(s.processes().iter().all(|p| p.done));
    }

    #[test]
    fn trace_line_format() {
        let g = load_graph("2 1\n0 1 1 a\n").unwrap();
        let mut s = flood(&g, DelayModel::Unit);
        s.run(&Wakeup::Lowest).unwrap();
        let text = s.trace_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t=0 kind=wakeup src=0 dst=0 type=- ch=- seq=0");
        assert_eq!(
            lines[1],
            "t=0 kind=send src=0 dst=1 type=Token ch=0 seq=1 hops=1"
        );
        assert_eq!(lines[2], "t=0 kind=halt src=0 dst=0 type=- ch=- seq=0");
        assert_eq!(
            lines[3],
            "t=1 kind=deliver src=0 dst=1 type=Token ch=0 seq=1 hops=1"
        );
    }
}
