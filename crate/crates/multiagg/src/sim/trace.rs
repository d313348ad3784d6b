//! Per-round traffic log and run summary.

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{MessageKind, Round};
use crate::graph::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub round: Round,
    pub from: NodeId,
    pub to: NodeId,
    pub bits: usize,
    pub kind: MessageKind,
}

/// Record of one engine run: optional per-message log plus counters.
#[derive(Clone, Debug, Default)]
pub struct RoundTrace {
    pub entries: Vec<TraceEntry>,
    /// Total rounds the engine executed.
    pub rounds_executed: Round,
    /// Last round in which any node reported algorithmic progress.
    pub completion_round: Round,
    pub max_bits: usize,
    pub total_messages: u64,
    /// Messages over budget (only possible with `strict_bits = false`).
    pub budget_violations: u64,
    /// Protocol-violation resets reported by node programs.
    pub resets: u64,
    /// Messages still in flight when the engine halted.
    pub dropped_in_flight: u64,
}

#[derive(Serialize)]
pub struct TraceSummary {
    pub rounds_executed: Round,
    pub completion_round: Round,
    pub max_bits: usize,
    pub total_messages: u64,
    pub budget_violations: u64,
    pub resets: u64,
}

impl RoundTrace {
    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            rounds_executed: self.rounds_executed,
            completion_round: self.completion_round,
            max_bits: self.max_bits,
            total_messages: self.total_messages,
            budget_violations: self.budget_violations,
            resets: self.resets,
        }
    }

    /// CSV export: `round,edge_u,edge_v,dir,bits,kind` with the edge in
    /// canonical `u < v` order and dir 0 meaning `u -> v`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,edge_u,edge_v,dir,bits,kind\n");
        for e in &self.entries {
            let (u, v, dir) = if e.from < e.to {
                (e.from, e.to, 0)
            } else {
                (e.to, e.from, 1)
            };
            out.push_str(&format!(
                "{},{},{},{},{},{:?}\n",
                e.round, u, v, dir, e.bits, e.kind
            ));
        }
        out
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary()).expect("summary serializes")
    }

    /// Content hash over the full log and summary; equal inputs must give
    /// equal hashes across runs.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.to_csv().as_bytes());
        h.update(self.summary_json().as_bytes());
        let digest = h.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Fold another phase's trace into this one (round counters add,
    /// message counters merge). Entries are kept per phase order.
    pub fn absorb(&mut self, other: &RoundTrace) {
        let offset = self.rounds_executed;
        for e in &other.entries {
            self.entries.push(TraceEntry {
                round: offset + e.round,
                ..*e
            });
        }
        self.completion_round = (offset + other.completion_round).max(self.completion_round);
        self.rounds_executed += other.rounds_executed;
        self.max_bits = self.max_bits.max(other.max_bits);
        self.total_messages += other.total_messages;
        self.budget_violations += other.budget_violations;
        self.resets += other.resets;
        self.dropped_in_flight += other.dropped_in_flight;
    }
}
