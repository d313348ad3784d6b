//! Undirected weighted graphs with dense 1-based node IDs.
//!
//! Edges are stored once as `(u, v, w)` with `u < v`, so weights are
//! symmetric by construction. Weights are positive integers; a weight of
//! zero is rejected because the round/delay simulation needs every hop to
//! cost at least one time slot.

mod gen;
mod io;
mod metrics;

pub use gen::{diamond_endpoints, gen_diamond_chain, gen_lowerbound_chain, gen_random_connected};
pub use io::{load_graph, save_graph, LoadError};
pub use metrics::{compute_metrics, GraphMetrics, MetricsError};

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Edge weight / weighted distance. Always ≥ 1 on edges.
pub type Weight = u64;

/// 1-based node identifier. Node 1 is the designated coordinator in the
/// protocols that need one.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    /// Zero-based index into per-node arrays.
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize - 1
    }

    /// Inverse of [`NodeId::idx`].
    #[inline]
    pub fn from_idx(i: usize) -> NodeId {
        NodeId(i as u32 + 1)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// A single undirected edge record with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub w: Weight,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node id {0} out of range 1..={1}")]
    NodeOutOfRange(u32, usize),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("parallel edge {0}-{1}")]
    ParallelEdge(NodeId, NodeId),
    #[error("edge {0}-{1} has non-positive weight")]
    NonPositiveWeight(NodeId, NodeId),
    #[error("graph must have at least one node")]
    Empty,
}

/// Undirected weighted graph.
///
/// Construction canonicalizes the edge list (sorted, `u < v`) and caches the
/// adjacency lists and the connectivity flag. Adjacency ("port") lists are
/// sorted by neighbor ID; protocols that break ties by neighbor priority
/// rely on this order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(NodeId, Weight)>>,
    connected: bool,
}

impl Graph {
    /// Build a graph from `(u, v, w)` triples. Records may be given in
    /// either endpoint order; they are normalized to `u < v`.
    pub fn new(n: usize, raw: &[(u32, u32, Weight)]) -> Result<Graph, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut edges = Vec::with_capacity(raw.len());
        for &(a, b, w) in raw {
            for id in [a, b] {
                if id < 1 || id as usize > n {
                    return Err(GraphError::NodeOutOfRange(id, n));
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(NodeId(a)));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if w == 0 {
                return Err(GraphError::NonPositiveWeight(NodeId(u), NodeId(v)));
            }
            edges.push(Edge {
                u: NodeId(u),
                v: NodeId(v),
                w,
            });
        }
        edges.sort();
        for pair in edges.windows(2) {
            if pair[0].u == pair[1].u && pair[0].v == pair[1].v {
                return Err(GraphError::ParallelEdge(pair[0].u, pair[0].v));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.u.idx()].push((e.v, e.w));
            adj[e.v.idx()].push((e.u, e.w));
        }
        for ports in &mut adj {
            ports.sort();
        }
        let connected = connected_by_traversal(n, &adj);
        Ok(Graph {
            n,
            edges,
            adj,
            connected,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Neighbors of `u` with edge weights, sorted by neighbor ID.
    pub fn ports(&self, u: NodeId) -> &[(NodeId, Weight)] {
        &self.adj[u.idx()]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u.idx()].len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (1..=self.n as u32).map(NodeId)
    }

    /// Weight of edge `{u, v}`, if present.
    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<Weight> {
        self.adj[u.idx()]
            .binary_search_by_key(&v, |&(nb, _)| nb)
            .ok()
            .map(|i| self.adj[u.idx()][i].1)
    }

    /// Largest edge weight (1 for the single-node graph).
    pub fn max_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.w).max().unwrap_or(1)
    }

    /// Upper bound on any finite weighted distance: `n * max_weight`.
    pub fn distance_bound(&self) -> Weight {
        self.n as Weight * self.max_weight()
    }

    /// Relabel nodes by the permutation `perm` (old index -> new id).
    /// Used by invariance tests.
    pub fn relabel(&self, perm: &[NodeId]) -> Graph {
        let raw: Vec<(u32, u32, Weight)> = self
            .edges
            .iter()
            .map(|e| (perm[e.u.idx()].0, perm[e.v.idx()].0, e.w))
            .collect();
        Graph::new(self.n, &raw).expect("relabeling preserves validity")
    }
}

fn connected_by_traversal(n: usize, adj: &[Vec<(NodeId, Weight)>]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &(v, _) in &adj[u] {
            if !seen[v.idx()] {
                seen[v.idx()] = true;
                count += 1;
                stack.push(v.idx());
            }
        }
    }
    count == n
}

/// Convenience constructor for a node set out of raw IDs.
pub fn node_set(ids: &[u32]) -> BTreeSet<NodeId> {
    ids.iter().copied().map(NodeId).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_self_loop_and_zero_weight() {
        assert_eq!(
            Graph::new(3, &[(2, 2, 1)]).unwrap_err(),
            GraphError::SelfLoop(NodeId(2))
        );
        assert_eq!(
            Graph::new(3, &[(1, 2, 0)]).unwrap_err(),
            GraphError::NonPositiveWeight(NodeId(1), NodeId(2))
        );
        assert_eq!(
            Graph::new(2, &[(1, 2, 1), (2, 1, 3)]).unwrap_err(),
            GraphError::ParallelEdge(NodeId(1), NodeId(2))
        );
    }

    #[test]
    fn normalizes_endpoint_order() {
        let g = Graph::new(3, &[(3, 1, 2), (2, 3, 1)]).unwrap();
        assert_eq!(g.edges()[0], Edge { u: NodeId(1), v: NodeId(3), w: 2 });
        assert_eq!(g.edge_weight(NodeId(3), NodeId(1)), Some(2));
        assert!(g.is_connected());
    }

    #[test]
    fn single_node_graph() {
        let g = Graph::new(1, &[]).unwrap();
        assert!(g.is_connected());
        assert_eq!(g.m(), 0);
        assert_eq!(g.max_weight(), 1);
    }

    #[test]
    fn disconnected_flag() {
        let g = Graph::new(4, &[(1, 2, 1), (3, 4, 1)]).unwrap();
        assert!(!g.is_connected());
    }

    #[test]
    fn ports_sorted_by_neighbor_id() {
        let g = Graph::new(4, &[(2, 4, 1), (1, 2, 1), (2, 3, 5)]).unwrap();
        let ids: Vec<u32> = g.ports(NodeId(2)).iter().map(|&(v, _)| v.0).collect();
        assert_eq!(ids, vec![1, 3, 4]);
    }
}
