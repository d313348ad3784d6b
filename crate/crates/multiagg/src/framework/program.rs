//! Node programs for the construction and aggregation passes.

use std::collections::{BTreeMap, BTreeSet};

use super::{AggHooks, DlgNodeState, NodeInfo, PortIdx, RootRecord, Variant};
use crate::graph::{NodeId, Weight};
use crate::sim::{Message, MessageKind, NodeCtx, Outbox, Round, Status};

pub(super) struct CompProgram<'a, A: AggHooks> {
    pub roots: &'a BTreeSet<NodeId>,
    pub k: Weight,
    pub horizon: Round,
    pub agg: &'a A,
    pub variant: Variant,
}

impl<A: AggHooks> CompProgram<'_, A> {
    fn info<'c>(&self, ctx: &NodeCtx<'c>) -> NodeInfo<'c> {
        NodeInfo {
            id: ctx.id,
            n: ctx.n,
            is_root: self.roots.contains(&ctx.id),
            s_size: self.roots.len(),
            ports: ctx.ports,
            seed: ctx.seed,
        }
    }
}

impl<A: AggHooks> crate::sim::NodeProgram for CompProgram<'_, A> {
    type State = (DlgNodeState, A::State);

    fn init(&self, ctx: &NodeCtx) -> Self::State {
        let mut dlg = DlgNodeState::new(ctx.ports.len());
        if self.roots.contains(&ctx.id) {
            dlg.records.insert(
                ctx.id,
                RootRecord {
                    omega: 0,
                    first_seen: 0,
                    entries: Vec::new(),
                    first_sent: None,
                },
            );
            for p in &mut dlg.pending {
                p.insert(ctx.id);
            }
        }
        let agg = self.agg.init(&self.info(ctx));
        (dlg, agg)
    }

    fn step(
        &self,
        state: &mut Self::State,
        ctx: &NodeCtx,
        round: Round,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Status {
        let (dlg, agg_state) = state;
        let info = self.info(ctx);
        let deg = ctx.ports.len();

        // -- receive phase -------------------------------------------------
        // Edges are full duplex: every arrival is processed. All of a
        // round's arrivals land in the same time slot, so they are handled
        // in ascending carried distance: the shortest copy of a root
        // defines its record and longer copies are classified against it.
        let mut arrivals: Vec<(PortIdx, NodeId, Weight, &Message)> = Vec::new();
        for (port, slot) in inbox.iter().enumerate() {
            let Some(msg) = slot else { continue };
            debug_assert_eq!(msg.kind, MessageKind::DlgWave);
            arrivals.push((port, msg.root, msg.dist.expect("wave carries dist"), msg));
        }
        arrivals.sort_by_key(|&(port, root, dist, _)| (dist, root, port));

        // Newly heard roots compete for this round's single activation
        // slot; all but the smallest join the delay queue.
        let enable_queue = std::env::var_os("MULTIAGG_NOQUEUE").is_none();
        let new_roots: BTreeSet<NodeId> = arrivals
            .iter()
            .filter(|&&(_, r, _, _)| !dlg.records.contains_key(&r))
            .map(|&(_, r, _, _)| r)
            .collect();
        let min_new = new_roots.iter().next().copied();
        // Release at most one delayed root per round: the smallest, unless
        // an even smaller root arrived just now.
        let queue_min = dlg.delayed.iter().next().copied();
        if let Some(s) = queue_min {
            if min_new.map_or(true, |m| s <= m) {
                dlg.delayed.remove(&s);
            }
        }
        let _ = enable_queue;

        for (port, root, dist, msg) in arrivals {
            match dlg.records.get_mut(&root) {
                None => {
                    // first receipt of this root
                    let in_range = dist <= self.k;
                    let mut rec = RootRecord {
                        omega: dist,
                        first_seen: round,
                        entries: Vec::new(),
                        first_sent: None,
                    };
                    if in_range {
                        rec.entries.push((round, port));
                        out.mark_progress();
                    }
                    dlg.records.insert(root, rec);
                    if in_range {
                        self.agg.on_parent(agg_state, root, &msg.payload, port, &info);
                    }
                    for (j, p) in dlg.pending.iter_mut().enumerate() {
                        if j != port {
                            p.insert(root);
                        }
                    }
                    // delay the newcomer if a smaller root took this
                    // round's activation (new arrival or queue release)
                    let blocked = min_new.map_or(false, |m| m < root)
                        || queue_min.map_or(false, |s| s < root);
                    if blocked && enable_queue {
                        dlg.delayed.insert(root);
                    }
                }
                Some(rec) => {
                    if dist < rec.omega {
                        // A shorter distance after the record exists means
                        // the first arrival was not shortest; the delay
                        // schedule is supposed to make this impossible.
                        rec.omega = dist;
                        rec.first_seen = round;
                        rec.entries.clear();
                        rec.first_sent = None;
                        self.agg.on_reset(agg_state, root);
                        out.note_reset();
                        if dist <= self.k {
                            rec.entries.push((round, port));
                            self.agg.on_parent(agg_state, root, &msg.payload, port, &info);
                        }
                        for (j, p) in dlg.pending.iter_mut().enumerate() {
                            if j != port {
                                p.insert(root);
                            }
                        }
                    } else if dist == rec.omega {
                        // another parent of this node in the root's DAG
                        if dist <= self.k && self.variant == Variant::Dlg {
                            rec.entries.push((round, port));
                            self.agg.on_parent(agg_state, root, &msg.payload, port, &info);
                            out.mark_progress();
                        }
                        // never send the wave back to a parent
                        dlg.pending[port].remove(&root);
                    }
                    // dist > rec.omega: stale copy from a non-parent; drop
                }
            }
        }

        // -- send phase ----------------------------------------------------
        // Per port, transmit the eligible pending root with the smallest
        // (distance, ID) key. A wave first heard at round tau may be sent
        // over an edge of weight w from round tau + w - 1 on, so its
        // receipt round is tau + w. Each root crosses each port at most
        // once.
        for port in 0..deg {
            let w = ctx.ports[port].1;
            let candidate = dlg.pending[port]
                .iter()
                .copied()
                .filter(|r| {
                    if dlg.delayed.contains(r) {
                        return false;
                    }
                    let rec = &dlg.records[r];
                    round as u64 + 1 >= rec.first_seen as u64 + w
                })
                .min_by_key(|r| (dlg.records[r].omega, *r));
            if let Some(root) = candidate {
                dlg.pending[port].remove(&root);
                let rec = dlg.records.get_mut(&root).expect("pending roots are known");
                if rec.first_sent.is_none() {
                    rec.first_sent = Some(round);
                }
                let payload = if rec.omega <= self.k {
                    self.agg.child_msg(agg_state, root)
                } else {
                    crate::sim::Bits::new()
                };
                out.send(port, Message::dlg_wave(root, rec.omega + w, payload));
            }
        }

        if round >= self.horizon {
            Status::Done
        } else {
            Status::Active
        }
    }
}

/// Aggregation-pass state: the construction records plus the reversed
/// send schedule (round -> messages due).
pub(super) struct AgrState<AS> {
    dlg: DlgNodeState,
    agg: AS,
    schedule: BTreeMap<Round, Vec<(NodeId, PortIdx)>>,
}

impl<AS> AgrState<AS> {
    pub(super) fn new(dlg: DlgNodeState, agg: AS, horizon: Round) -> AgrState<AS> {
        let mut schedule: BTreeMap<Round, Vec<(NodeId, PortIdx)>> = BTreeMap::new();
        for (&root, rec) in &dlg.records {
            for &(tau, port) in &rec.entries {
                debug_assert!(tau <= horizon);
                schedule.entry(horizon - tau).or_default().push((root, port));
            }
        }
        AgrState { dlg, agg, schedule }
    }

    pub(super) fn into_parts(self) -> (DlgNodeState, AS) {
        (self.dlg, self.agg)
    }
}

pub(super) struct AgrProgram<'a, A: AggHooks> {
    pub roots: &'a BTreeSet<NodeId>,
    pub horizon: Round,
    pub agg: &'a A,
}

impl<A: AggHooks> crate::sim::NodeProgram for AgrProgram<'_, A> {
    type State = AgrState<A::State>;

    fn init(&self, _ctx: &NodeCtx) -> Self::State {
        unreachable!("aggregation resumes from construction states")
    }

    fn step(
        &self,
        state: &mut Self::State,
        ctx: &NodeCtx,
        round: Round,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Status {
        let info = NodeInfo {
            id: ctx.id,
            n: ctx.n,
            is_root: self.roots.contains(&ctx.id),
            s_size: self.roots.len(),
            ports: ctx.ports,
            seed: ctx.seed,
        };
        // child reports first, then this node's own due sends: a node's
        // earliest send round is strictly later than its children's
        // arrival rounds, so aggregates are complete when forwarded.
        for (port, slot) in inbox.iter().enumerate() {
            let Some(msg) = slot else { continue };
            debug_assert_eq!(msg.kind, MessageKind::AggWave);
            self.agg
                .on_child(&mut state.agg, msg.root, &msg.payload, port, &info);
            out.mark_progress();
        }
        if let Some(due) = state.schedule.get(&round) {
            for &(root, port) in due {
                let payload = self.agg.parent_msg(&state.agg, root);
                out.send(port, Message::agg_wave(root, payload));
            }
        }
        if round >= self.horizon {
            Status::Done
        } else {
            Status::Active
        }
    }
}
