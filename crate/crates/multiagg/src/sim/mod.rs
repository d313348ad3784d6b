//! Deterministic synchronous round engine for the CONGEST message-passing
//! model.
//!
//! The contract per round: every node may send at most one bounded-size
//! message per incident edge per direction; a message sent in round `t`
//! sits in the receiver's inbox in round `t + 1`. Node step functions may
//! only touch their own state and inbox, so executing them in any order
//! within a round is observably identical.

mod bits;
mod trace;

pub use bits::{ceil_log2, BitReader, Bits};
pub use trace::{RoundTrace, TraceEntry, TraceSummary};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, NodeId, Weight};

pub type Round = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MessageKind {
    DlgWave,
    AggWave,
    Control,
}

/// One CONGEST message. Wave messages carry the root they belong to;
/// DLG waves additionally carry a distance.
#[derive(Clone, Debug)]
pub struct Message {
    pub kind: MessageKind,
    pub root: NodeId,
    pub dist: Option<Weight>,
    pub payload: Bits,
}

impl Message {
    pub fn dlg_wave(root: NodeId, dist: Weight, payload: Bits) -> Message {
        Message {
            kind: MessageKind::DlgWave,
            root,
            dist: Some(dist),
            payload,
        }
    }

    pub fn agg_wave(root: NodeId, payload: Bits) -> Message {
        Message {
            kind: MessageKind::AggWave,
            root,
            dist: None,
            payload,
        }
    }

    pub fn control(payload: Bits) -> Message {
        Message {
            kind: MessageKind::Control,
            root: NodeId(1),
            dist: None,
            payload,
        }
    }
}

/// Fixed field widths for a graph: ids take ceil(log2 n) bits, distances
/// ceil(log2(n*W_max + 1)) bits.
#[derive(Clone, Copy, Debug)]
pub struct WireFormat {
    pub id_bits: usize,
    pub dist_bits: usize,
}

impl WireFormat {
    pub fn for_graph(g: &Graph) -> WireFormat {
        WireFormat {
            id_bits: ceil_log2(g.n() as u64),
            dist_bits: ceil_log2(g.n() as u64 * g.max_weight() + 1),
        }
    }

    /// Encoded size: kind tag (2) + root id + dist (DLG waves only) +
    /// payload length.
    pub fn bits_of(&self, m: &Message) -> usize {
        let dist = match m.kind {
            MessageKind::DlgWave => self.dist_bits,
            _ => 0,
        };
        2 + self.id_bits + dist + m.payload.len()
    }

    /// Smallest budget that fits a DLG wave header.
    pub fn min_budget(&self) -> usize {
        2 + self.id_bits + self.dist_bits
    }
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    /// Bits allowed per message.
    pub bit_budget: usize,
    /// Failsafe cap on engine rounds.
    pub max_rounds: Round,
    pub seed: u64,
    /// Error out on over-budget messages instead of counting them.
    pub strict_bits: bool,
    /// Keep the per-message log (summaries are always kept).
    pub record_edges: bool,
    /// Shuffle node execution order each round (testing aid; results must
    /// not depend on it).
    pub permute_seed: Option<u64>,
}

impl SimConfig {
    /// Defaults for a graph: budget `8 * ceil(log2 n)`, generous round cap.
    pub fn for_graph(g: &Graph) -> SimConfig {
        SimConfig {
            bit_budget: 8 * ceil_log2(g.n() as u64),
            max_rounds: (4 * g.distance_bound() + 4 * g.n() as Weight + 64) as Round,
            seed: 0,
            strict_bits: true,
            record_edges: true,
            permute_seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> SimConfig {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, bits: usize) -> SimConfig {
        self.bit_budget = bits;
        self
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("round {round}: message of {bits} bits from {from} exceeds budget {budget}")]
    BitBudgetExceeded {
        round: Round,
        from: NodeId,
        bits: usize,
        budget: usize,
    },
    #[error("round {round}: node {from} sent twice on port {port}")]
    DuplicateSendOnEdge {
        round: Round,
        from: NodeId,
        port: usize,
    },
    #[error("exceeded max_rounds = {0}")]
    MaxRoundsExceeded(Round),
}

/// Immutable per-node view handed to programs.
pub struct NodeCtx<'a> {
    pub id: NodeId,
    pub n: usize,
    /// Neighbors with edge weights, sorted by neighbor ID. The index into
    /// this slice is the port number.
    pub ports: &'a [(NodeId, Weight)],
    /// Run seed; combine with the node id for local randomness.
    pub seed: u64,
}

impl NodeCtx<'_> {
    /// Node-local RNG: global seed XOR node id.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ self.id.0 as u64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Active,
    Done,
}

/// Staged sends of one node in one round.
pub struct Outbox {
    sends: Vec<(usize, Message)>,
    progress: bool,
    resets: u64,
}

impl Outbox {
    fn new() -> Outbox {
        Outbox {
            sends: Vec::new(),
            progress: false,
            resets: 0,
        }
    }

    pub fn send(&mut self, port: usize, msg: Message) {
        self.sends.push((port, msg));
    }

    /// Mark that this node made algorithmic progress this round; the last
    /// marked round becomes the trace's completion_round.
    pub fn mark_progress(&mut self) {
        self.progress = true;
    }

    /// Report a protocol-violation reset (counted in the trace).
    pub fn note_reset(&mut self) {
        self.resets += 1;
    }
}

pub trait NodeProgram {
    type State;

    fn init(&self, ctx: &NodeCtx) -> Self::State;

    /// Execute one round: consume this round's inbox (indexed by port,
    /// holding messages sent by neighbors last round) and stage sends.
    fn step(
        &self,
        state: &mut Self::State,
        ctx: &NodeCtx,
        round: Round,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Status;
}

#[derive(Debug)]
pub struct RunResult<S> {
    pub states: Vec<S>,
    pub trace: RoundTrace,
}

/// Run a program on every node until all nodes are done or `max_rounds`
/// is hit. Identical inputs produce bit-identical traces.
pub fn run<P: NodeProgram>(
    g: &Graph,
    prog: &P,
    cfg: &SimConfig,
) -> Result<RunResult<P::State>, SimError> {
    let states: Vec<P::State> = g
        .nodes()
        .map(|u| {
            prog.init(&NodeCtx {
                id: u,
                n: g.n(),
                ports: g.ports(u),
                seed: cfg.seed,
            })
        })
        .collect();
    run_from(g, prog, cfg, states)
}

/// Like [`run`], but resume from externally prepared per-node states
/// (used by multi-phase protocols that carry state between phases).
pub fn run_from<P: NodeProgram>(
    g: &Graph,
    prog: &P,
    cfg: &SimConfig,
    states: Vec<P::State>,
) -> Result<RunResult<P::State>, SimError> {
    let n = g.n();
    let wire = WireFormat::for_graph(g);
    // port of u in v's adjacency, for every (u, port) -> v
    let rev_port: Vec<Vec<usize>> = g
        .nodes()
        .map(|u| {
            g.ports(u)
                .iter()
                .map(|&(v, _)| {
                    g.ports(v)
                        .iter()
                        .position(|&(x, _)| x == u)
                        .expect("symmetric adjacency")
                })
                .collect()
        })
        .collect();

    let mut states = states;
    assert_eq!(states.len(), n, "one state per node");

    let mut inboxes: Vec<Vec<Option<Message>>> =
        g.nodes().map(|u| vec![None; g.degree(u)]).collect();
    let mut trace = RoundTrace::default();
    let mut order: Vec<usize> = (0..n).collect();
    let mut perm_rng = cfg.permute_seed.map(ChaCha8Rng::seed_from_u64);

    let mut round: Round = 0;
    loop {
        if round > cfg.max_rounds {
            return Err(SimError::MaxRoundsExceeded(cfg.max_rounds));
        }
        if let Some(rng) = perm_rng.as_mut() {
            use rand::seq::SliceRandom;
            order.shuffle(rng);
        }

        let mut next: Vec<Vec<Option<Message>>> =
            g.nodes().map(|u| vec![None; g.degree(u)]).collect();
        let mut all_done = true;
        let mut round_entries: Vec<TraceEntry> = Vec::new();
        let mut staged = 0u64;

        for &ui in &order {
            let u = NodeId::from_idx(ui);
            let ctx = NodeCtx {
                id: u,
                n,
                ports: g.ports(u),
                seed: cfg.seed,
            };
            let mut out = Outbox::new();
            let status = prog.step(&mut states[ui], &ctx, round, &inboxes[ui], &mut out);
            if status == Status::Active {
                all_done = false;
            }
            if out.progress {
                trace.completion_round = round;
            }
            trace.resets += out.resets;

            let mut used = vec![false; g.degree(u)];
            for (port, msg) in out.sends {
                if used[port] {
                    return Err(SimError::DuplicateSendOnEdge {
                        round,
                        from: u,
                        port,
                    });
                }
                used[port] = true;
                let bits = wire.bits_of(&msg);
                if bits > cfg.bit_budget {
                    if cfg.strict_bits {
                        return Err(SimError::BitBudgetExceeded {
                            round,
                            from: u,
                            bits,
                            budget: cfg.bit_budget,
                        });
                    }
                    trace.budget_violations += 1;
                }
                trace.max_bits = trace.max_bits.max(bits);
                trace.total_messages += 1;
                staged += 1;
                let (v, _) = g.ports(u)[port];
                if cfg.record_edges {
                    round_entries.push(TraceEntry {
                        round,
                        from: u,
                        to: v,
                        bits,
                        kind: msg.kind,
                    });
                }
                next[v.idx()][rev_port[ui][port]] = Some(msg);
            }
        }

        // canonical order regardless of execution order
        round_entries.sort_by_key(|e| (e.from, e.to));
        trace.entries.extend(round_entries);
        trace.rounds_executed = round + 1;

        if all_done {
            trace.dropped_in_flight = staged;
            break;
        }
        inboxes = next;
        round += 1;
    }
    Ok(RunResult { states, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_random_connected, Graph};
    use crate::oracle;

    /// Flood from node 1; every node records the round it first hears.
    struct Flood;

    impl NodeProgram for Flood {
        type State = (Option<Round>, bool);

        fn init(&self, ctx: &NodeCtx) -> Self::State {
            (if ctx.id == NodeId(1) { Some(0) } else { None }, false)
        }

        fn step(
            &self,
            st: &mut Self::State,
            ctx: &NodeCtx,
            round: Round,
            inbox: &[Option<Message>],
            out: &mut Outbox,
        ) -> Status {
            if st.0.is_none() && inbox.iter().any(|m| m.is_some()) {
                st.0 = Some(round);
                out.mark_progress();
            }
            if st.0.is_some() && !st.1 {
                st.1 = true;
                for port in 0..ctx.ports.len() {
                    out.send(port, Message::control(Bits::new()));
                }
                return Status::Active;
            }
            if round > ctx.n as Round {
                Status::Done
            } else {
                Status::Active
            }
        }
    }

    #[test]
    fn flood_arrival_equals_bfs_depth() {
        let g = gen_random_connected(20, 0.2, 1, 3);
        let cfg = SimConfig::for_graph(&g);
        let res = run(&g, &Flood, &cfg).unwrap();
        let d = oracle::sssp(&g, NodeId(1));
        for v in g.nodes() {
            assert_eq!(
                res.states[v.idx()].0.map(|r| r as Weight),
                d.dist[v.idx()],
                "node {v}"
            );
        }
    }

    struct Silent;
    impl NodeProgram for Silent {
        type State = ();
        fn init(&self, _: &NodeCtx) -> Self::State {}
        fn step(
            &self,
            _: &mut Self::State,
            _: &NodeCtx,
            _: Round,
            _: &[Option<Message>],
            _: &mut Outbox,
        ) -> Status {
            Status::Done
        }
    }

    #[test]
    fn silent_program_completes_in_one_round() {
        let g = Graph::new(2, &[(1, 2, 1)]).unwrap();
        let res = run(&g, &Silent, &SimConfig::for_graph(&g)).unwrap();
        assert_eq!(res.trace.rounds_executed, 1);
        assert!(res.trace.entries.is_empty());
    }

    /// Both endpoints of one edge send to each other in round 0.
    struct CrossTalk;
    impl NodeProgram for CrossTalk {
        type State = u32;
        fn init(&self, _: &NodeCtx) -> Self::State {
            0
        }
        fn step(
            &self,
            got: &mut Self::State,
            _: &NodeCtx,
            round: Round,
            inbox: &[Option<Message>],
            out: &mut Outbox,
        ) -> Status {
            *got += inbox.iter().flatten().count() as u32;
            if round == 0 {
                out.send(0, Message::control(Bits::new()));
                Status::Active
            } else {
                Status::Done
            }
        }
    }

    #[test]
    fn full_duplex_delivery() {
        let g = Graph::new(2, &[(1, 2, 1)]).unwrap();
        let res = run(&g, &CrossTalk, &SimConfig::for_graph(&g)).unwrap();
        assert_eq!(res.states, vec![1, 1]);
        assert_eq!(res.trace.entries.len(), 2);
        assert_eq!(res.trace.entries[0].round, 0);
    }

    #[test]
    fn determinism_and_order_independence() {
        let g = gen_random_connected(15, 0.25, 3, 7);
        let cfg = SimConfig::for_graph(&g);
        let a = run(&g, &Flood, &cfg).unwrap().trace.hash();
        let b = run(&g, &Flood, &cfg).unwrap().trace.hash();
        assert_eq!(a, b);
        for pseed in [1u64, 2, 3] {
            let mut cfg2 = cfg.clone();
            cfg2.permute_seed = Some(pseed);
            assert_eq!(run(&g, &Flood, &cfg2).unwrap().trace.hash(), a);
        }
    }

    #[test]
    fn duplicate_send_is_an_error() {
        struct Dup;
        impl NodeProgram for Dup {
            type State = ();
            fn init(&self, _: &NodeCtx) -> Self::State {}
            fn step(
                &self,
                _: &mut Self::State,
                _: &NodeCtx,
                _: Round,
                _: &[Option<Message>],
                out: &mut Outbox,
            ) -> Status {
                out.send(0, Message::control(Bits::new()));
                out.send(0, Message::control(Bits::new()));
                Status::Done
            }
        }
        let g = Graph::new(2, &[(1, 2, 1)]).unwrap();
        let err = run(&g, &Dup, &SimConfig::for_graph(&g)).unwrap_err();
        assert!(matches!(err, SimError::DuplicateSendOnEdge { .. }));
    }

    #[test]
    fn wire_sizes_match_formula() {
        let g16 = {
            let raw: Vec<(u32, u32, Weight)> = (1..16u32).map(|i| (i, i + 1, 1)).collect();
            Graph::new(16, &raw).unwrap()
        };
        let wire = WireFormat::for_graph(&g16);
        let ctrl = Message::control(Bits::new());
        assert_eq!(wire.bits_of(&ctrl), 6);
        let wave = Message::dlg_wave(NodeId(3), 5, Bits::new());
        assert_eq!(wire.bits_of(&wave), 11);
        // payload of 3 * ceil(log2 n) bits fits the default budget
        let mut payload = Bits::new();
        payload.push_uint(0, 3 * wire.id_bits);
        let big = Message::dlg_wave(NodeId(3), 5, payload);
        assert!(wire.bits_of(&big) <= SimConfig::for_graph(&g16).bit_budget);
    }

    #[test]
    fn budget_enforcement() {
        struct Fat;
        impl NodeProgram for Fat {
            type State = ();
            fn init(&self, _: &NodeCtx) -> Self::State {}
            fn step(
                &self,
                _: &mut Self::State,
                _: &NodeCtx,
                round: Round,
                _: &[Option<Message>],
                out: &mut Outbox,
            ) -> Status {
                if round == 0 {
                    let mut p = Bits::new();
                    p.push_uint(0, 64);
                    out.send(0, Message::control(p));
                }
                if round > 0 { Status::Done } else { Status::Active }
            }
        }
        let g = Graph::new(2, &[(1, 2, 1)]).unwrap();
        let mut cfg = SimConfig::for_graph(&g);
        cfg.bit_budget = 8;
        let err = run(&g, &Fat, &cfg).unwrap_err();
        assert!(matches!(err, SimError::BitBudgetExceeded { .. }));
        cfg.strict_bits = false;
        let res = run(&g, &Fat, &cfg).unwrap();
        // both endpoints send one oversized message
        assert_eq!(res.trace.budget_violations, 2);
    }
}
