//! Parallel construction of |S| directed leveled graphs (DLGs) and
//! schedule-reversed aggregation through them.
//!
//! Every root in `S` floods a wave that grows its shortest-path DAG up to
//! depth `k`. Waves contend for edges under an ID-priority discipline
//! (smaller root IDs go first, larger ones wait), which caps the total
//! delay of any wave at about |S| and lets all |S| constructions finish
//! within |S| + k rounds. The arrival schedule each node records during
//! construction is replayed backwards to aggregate values from the leaves
//! to each root: a node that heard root `r` at round `tau` reports for `r`
//! at round `|S| + k - tau`, after its own children have reported.
//!
//! Aggregation state is held as raw per-port payload contributions and
//! recombined on demand. When congestion makes a contribution arrive late
//! (or a shorter path shows up after a record was made), the affected node
//! re-floods the corrected value; receivers treat identical copies as
//! no-ops, so the repair traffic dies out once values stabilize. The
//! shipped state is validated against exact sequential oracles.
//!
//! The tree variant keeps a single parent per (node, root) — the first
//! valid arrival, lowest port on ties — yielding |S| shortest-path trees.

mod program;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::graph::{Graph, NodeId, Weight};
use crate::sim::{self, Bits, Round, RoundTrace, SimConfig, SimError, WireFormat};

pub type PortIdx = usize;

/// DAG construction records all valid parents; the tree variant keeps
/// exactly one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Dlg,
    Tree,
}

/// Static per-node facts available to aggregation hooks.
pub struct NodeInfo<'a> {
    pub id: NodeId,
    pub n: usize,
    /// Whether this node is a root (member of S).
    pub is_root: bool,
    pub s_size: usize,
    /// Neighbors with edge weights, sorted by neighbor ID. Indexes into
    /// this slice are port numbers.
    pub ports: &'a [(NodeId, Weight)],
    pub seed: u64,
}

/// Aggregation hooks: pure combiners over stored payload contributions.
///
/// `child_msg` shapes the wave payload forwarded towards children during
/// construction (the down pass); `parent_msg` shapes the report sent to
/// parents during aggregation (the up pass). Both must be deterministic
/// functions of their inputs and fit the declared width.
pub trait AggHooks {
    type State;

    fn init(&self, info: &NodeInfo) -> Self::State;

    /// Declared upper bound on payload size in bits.
    fn max_payload_bits(&self) -> usize;

    /// Down-pass payload for `root`, combined from the payloads received
    /// from this node's recorded parents (empty at the root itself).
    fn child_msg(
        &self,
        st: &Self::State,
        root: NodeId,
        parents: &[(PortIdx, &Bits)],
        info: &NodeInfo,
    ) -> Bits;

    /// Up-pass payload for `root`, combined from the reports received from
    /// children (and, when needed, the parent payloads of the down pass).
    fn parent_msg(
        &self,
        st: &Self::State,
        root: NodeId,
        children: &[(PortIdx, &Bits)],
        parents: &[(PortIdx, &Bits)],
        info: &NodeInfo,
    ) -> Bits;
}

/// Hook-less construction (distance computation only).
pub struct NoAgg;

impl AggHooks for NoAgg {
    type State = ();
    fn init(&self, _: &NodeInfo) -> Self::State {}
    fn max_payload_bits(&self) -> usize {
        0
    }
    fn child_msg(&self, _: &(), _: NodeId, _: &[(PortIdx, &Bits)], _: &NodeInfo) -> Bits {
        Bits::new()
    }
    fn parent_msg(
        &self,
        _: &(),
        _: NodeId,
        _: &[(PortIdx, &Bits)],
        _: &[(PortIdx, &Bits)],
        _: &NodeInfo,
    ) -> Bits {
        Bits::new()
    }
}

/// What one node knows about one root after construction.
#[derive(Clone, Debug)]
pub struct RootRecord {
    /// Shortest distance to the root seen so far (exact at the end).
    pub omega: Weight,
    /// Round the current distance was first received (0 for the root
    /// itself); anchors the weighted send-eligibility rule.
    pub first_seen: Round,
    /// Per parent port: arrival round of the first valid message from it
    /// and the latest payload it delivered. Empty for the root itself and
    /// for nodes beyond depth k.
    pub contribs: BTreeMap<PortIdx, (Round, Bits)>,
}

impl RootRecord {
    /// Parent payloads in port order, for the combiners.
    pub fn parent_payloads(&self) -> Vec<(PortIdx, &Bits)> {
        self.contribs.iter().map(|(&p, (_, b))| (p, b)).collect()
    }
}

/// Per-node construction state: known roots plus transmission bookkeeping.
#[derive(Clone, Debug, Default)]
pub struct DlgNodeState {
    pub records: BTreeMap<NodeId, RootRecord>,
    /// Ports still owed the current value of a root, per port.
    pending: Vec<BTreeSet<NodeId>>,
    /// Roots currently delayed at this node (ID-priority queue).
    delayed: BTreeSet<NodeId>,
    /// Last (distance, payload) actually sent per (port, root); identical
    /// re-sends are suppressed.
    sent: Vec<BTreeMap<NodeId, (Weight, Bits)>>,
}

impl DlgNodeState {
    fn new(deg: usize) -> DlgNodeState {
        DlgNodeState {
            records: BTreeMap::new(),
            pending: vec![BTreeSet::new(); deg],
            delayed: BTreeSet::new(),
            sent: vec![BTreeMap::new(); deg],
        }
    }

    /// Recorded distance to `root`, if any wave arrived.
    pub fn omega(&self, root: NodeId) -> Option<Weight> {
        self.records.get(&root).map(|r| r.omega)
    }

    /// Parent count (sp) for `root`.
    pub fn sp(&self, root: NodeId) -> usize {
        self.records.get(&root).map_or(0, |r| r.contribs.len())
    }

    /// Recorded parent ports for `root`.
    pub fn parent_ports(&self, root: NodeId) -> Vec<PortIdx> {
        self.records
            .get(&root)
            .map_or(Vec::new(), |r| r.contribs.keys().copied().collect())
    }

    /// Recorded parent node IDs for `root`, resolved through the port list.
    pub fn parent_nodes(&self, g: &Graph, me: NodeId, root: NodeId) -> Vec<NodeId> {
        self.parent_ports(root)
            .into_iter()
            .map(|p| g.ports(me)[p].0)
            .collect()
    }

    /// Arrival rounds (tau) recorded for `root`, one per parent port.
    pub fn taus(&self, root: NodeId) -> Vec<Round> {
        self.records
            .get(&root)
            .map_or(Vec::new(), |r| r.contribs.values().map(|&(t, _)| t).collect())
    }
}

/// Debug dump row (one per node and known root).
#[derive(Serialize)]
pub struct DlgDumpRow {
    pub node: u32,
    pub root: u32,
    pub omega: Weight,
    pub parents: Vec<u32>,
    pub tau: Vec<Round>,
}

/// Per-node aggregation-pass state: reports received from children.
#[derive(Clone, Debug, Default)]
pub struct AgrNodeState {
    /// Per root: latest report per child port.
    pub child_contribs: BTreeMap<NodeId, BTreeMap<PortIdx, Bits>>,
}

impl AgrNodeState {
    pub fn child_payloads(&self, root: NodeId) -> Vec<(PortIdx, &Bits)> {
        self.child_contribs
            .get(&root)
            .map_or(Vec::new(), |m| m.iter().map(|(&p, b)| (p, b)).collect())
    }
}

/// Result of a construction pass; the aggregation pass extends it.
pub struct DlgRun<AS> {
    pub nodes: Vec<DlgNodeState>,
    pub agg: Vec<AS>,
    pub agr: Vec<AgrNodeState>,
    pub comp_trace: RoundTrace,
    pub agr_trace: Option<RoundTrace>,
    pub roots: BTreeSet<NodeId>,
    pub k: Weight,
    pub horizon: Round,
    pub variant: Variant,
}

impl<AS> DlgRun<AS> {
    /// JSON dump of every (node, root) record, for debugging.
    pub fn dump_json(&self, g: &Graph) -> String {
        let mut rows = Vec::new();
        for (i, st) in self.nodes.iter().enumerate() {
            let me = NodeId::from_idx(i);
            for (&root, rec) in &st.records {
                rows.push(DlgDumpRow {
                    node: me.0,
                    root: root.0,
                    omega: rec.omega,
                    parents: st.parent_nodes(g, me, root).iter().map(|p| p.0).collect(),
                    tau: rec.contribs.values().map(|&(t, _)| t).collect(),
                });
            }
        }
        serde_json::to_string_pretty(&rows).expect("dump serializes")
    }

    /// Combined down-pass value at a node (what it forwards for `root`).
    pub fn down_value<A: AggHooks<State = AS>>(
        &self,
        g: &Graph,
        agg: &A,
        u: NodeId,
        root: NodeId,
        seed: u64,
    ) -> Option<Bits> {
        let rec = self.nodes[u.idx()].records.get(&root)?;
        if rec.omega > self.k {
            return None;
        }
        let info = NodeInfo {
            id: u,
            n: g.n(),
            is_root: self.roots.contains(&u),
            s_size: self.roots.len(),
            ports: g.ports(u),
            seed,
        };
        Some(agg.child_msg(&self.agg[u.idx()], root, &rec.parent_payloads(), &info))
    }

    /// Combined up-pass value at a node (what it reports for `root`).
    pub fn up_value<A: AggHooks<State = AS>>(
        &self,
        g: &Graph,
        agg: &A,
        u: NodeId,
        root: NodeId,
        seed: u64,
    ) -> Option<Bits> {
        let rec = self.nodes[u.idx()].records.get(&root)?;
        if rec.omega > self.k {
            return None;
        }
        let info = NodeInfo {
            id: u,
            n: g.n(),
            is_root: self.roots.contains(&u),
            s_size: self.roots.len(),
            ports: g.ports(u),
            seed,
        };
        Some(agg.parent_msg(
            &self.agg[u.idx()],
            root,
            &self.agr[u.idx()].child_payloads(root),
            &rec.parent_payloads(),
            &info,
        ))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FrameworkError {
    #[error("root set must not be empty")]
    EmptyRootSet,
    #[error("root {0} is not a node of the graph")]
    BadRoot(NodeId),
    #[error(
        "bit budget {budget} cannot fit a wave header of {header} bits plus {payload} payload bits"
    )]
    BudgetTooSmall {
        budget: usize,
        header: usize,
        payload: usize,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
}

fn validate<A: AggHooks>(
    g: &Graph,
    roots: &BTreeSet<NodeId>,
    agg: &A,
    cfg: &SimConfig,
) -> Result<(), FrameworkError> {
    if roots.is_empty() {
        return Err(FrameworkError::EmptyRootSet);
    }
    for &r in roots {
        if r.0 < 1 || r.0 as usize > g.n() {
            return Err(FrameworkError::BadRoot(r));
        }
    }
    if cfg.strict_bits {
        let wire = WireFormat::for_graph(g);
        let header = wire.min_budget();
        let payload = agg.max_payload_bits();
        if header + payload > cfg.bit_budget {
            return Err(FrameworkError::BudgetTooSmall {
                budget: cfg.bit_budget,
                header,
                payload,
            });
        }
    }
    Ok(())
}

fn horizon_for(g: &Graph, roots: &BTreeSet<NodeId>, k: Weight) -> Round {
    let k_eff = k.min(g.distance_bound());
    let h = roots.len() as u64 + k_eff;
    debug_assert!(h <= u32::MAX as u64);
    h as Round
}

fn comp<A: AggHooks>(
    g: &Graph,
    roots: &BTreeSet<NodeId>,
    k: Weight,
    agg: &A,
    cfg: &SimConfig,
    variant: Variant,
) -> Result<DlgRun<A::State>, FrameworkError> {
    validate(g, roots, agg, cfg)?;
    let horizon = horizon_for(g, roots, k);
    let mut cfg = cfg.clone();
    cfg.max_rounds = cfg.max_rounds.max(horizon + 2);
    let prog = program::CompProgram {
        roots,
        k,
        horizon,
        agg,
        variant,
    };
    let res = sim::run(g, &prog, &cfg)?;
    let (nodes, agg_states) = res.states.into_iter().unzip();
    Ok(DlgRun {
        nodes,
        agg: agg_states,
        agr: vec![AgrNodeState::default(); g.n()],
        comp_trace: res.trace,
        agr_trace: None,
        roots: roots.clone(),
        k,
        horizon,
        variant,
    })
}

/// Build the |S| shortest-path DAGs rooted in `roots`, restricted to depth
/// `k`, carrying `agg`'s down payloads along the waves.
///
/// Postconditions (validated against the oracle by the test suites): for
/// every root r and node u with distance(r, u) <= k, the recorded distance
/// and parent set match the true shortest-path DAG, and construction
/// completes within |S| + k rounds. Waves whose carried distance exceeds
/// `k` are still forwarded (they keep the delay discipline intact) but are
/// never recorded.
pub fn dlg_comp<A: AggHooks>(
    g: &Graph,
    roots: &BTreeSet<NodeId>,
    k: Weight,
    agg: &A,
    cfg: &SimConfig,
) -> Result<DlgRun<A::State>, FrameworkError> {
    comp(g, roots, k, agg, cfg, Variant::Dlg)
}

/// Tree variant of [`dlg_comp`]: one parent per (node, root).
pub fn tree_comp<A: AggHooks>(
    g: &Graph,
    roots: &BTreeSet<NodeId>,
    k: Weight,
    agg: &A,
    cfg: &SimConfig,
) -> Result<DlgRun<A::State>, FrameworkError> {
    comp(g, roots, k, agg, cfg, Variant::Tree)
}

/// Aggregate through the structures built by a previous construction pass,
/// replaying the recorded schedule in reverse. Fills `run.agr`; read the
/// results with [`DlgRun::up_value`].
pub fn dlg_agr<A: AggHooks>(
    g: &Graph,
    run: &mut DlgRun<A::State>,
    agg: &A,
    cfg: &SimConfig,
) -> Result<(), FrameworkError> {
    validate(g, &run.roots, agg, cfg)?;
    let horizon = run.horizon;
    let mut cfg = cfg.clone();
    cfg.max_rounds = cfg.max_rounds.max(horizon + 2);
    let prog = program::AgrProgram {
        roots: &run.roots,
        horizon,
        agg,
    };
    let nodes = std::mem::take(&mut run.nodes);
    let aggs = std::mem::take(&mut run.agg);
    let states: Vec<program::AgrState<A::State>> = nodes
        .into_iter()
        .zip(aggs)
        .map(|(dlg, a)| program::AgrState::new(dlg, a, horizon))
        .collect();
    let res = sim::run_from(g, &prog, &cfg, states)?;
    run.agr.clear();
    for st in res.states {
        let (dlg, a, agr) = st.into_parts();
        run.nodes.push(dlg);
        run.agg.push(a);
        run.agr.push(agr);
    }
    run.agr_trace = Some(res.trace);
    Ok(())
}

/// `dlg_agr` with the tree schedule; identical mechanics, single parent.
pub fn tree_agr<A: AggHooks>(
    g: &Graph,
    run: &mut DlgRun<A::State>,
    agg: &A,
    cfg: &SimConfig,
) -> Result<(), FrameworkError> {
    dlg_agr(g, run, agg, cfg)
}
