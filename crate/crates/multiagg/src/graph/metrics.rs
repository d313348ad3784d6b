//! Eccentricities and the three diameters: hop diameter `D_h`, weighted
//! diameter `D_w`, and shortest-path diameter `D_sp` (hop length of
//! shortest weighted paths).

use serde::Serialize;

use super::{Graph, NodeId, Weight};
use crate::oracle;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("graph is disconnected; diameters are undefined")]
    DisconnectedGraph,
}

/// All-pairs eccentricities and diameters of a connected graph.
#[derive(Clone, Debug, Serialize)]
pub struct GraphMetrics {
    /// Hop eccentricity per node.
    pub ecc_h: Vec<Weight>,
    /// Weighted eccentricity per node.
    pub ecc_w: Vec<Weight>,
    /// Hop diameter.
    pub d_h: Weight,
    /// Weighted diameter.
    pub d_w: Weight,
    /// Max over pairs of the fewest hops among shortest weighted paths.
    pub d_sp_min_hop: Weight,
    /// Max over pairs of the most hops among shortest weighted paths.
    /// This variant bounds the depth of every shortest-path DAG, which is
    /// what the count-encoding error bounds depend on.
    pub d_sp_max_hop: Weight,
}

impl GraphMetrics {
    /// The shortest-path diameter used in error-bound checks.
    pub fn d_sp(&self) -> Weight {
        self.d_sp_max_hop
    }
}

/// Compute metrics by one Dijkstra/BFS pass per source.
pub fn compute_metrics(g: &Graph) -> Result<GraphMetrics, MetricsError> {
    if !g.is_connected() {
        return Err(MetricsError::DisconnectedGraph);
    }
    let n = g.n();
    let mut ecc_h = vec![0; n];
    let mut ecc_w = vec![0; n];
    let mut d_sp_min_hop = 0;
    let mut d_sp_max_hop = 0;
    for src in g.nodes() {
        let dist = oracle::sssp(g, src);
        let hops = hop_distances(g, src);
        ecc_w[src.idx()] = dist
            .dist
            .iter()
            .map(|d| d.expect("connected"))
            .max()
            .unwrap();
        ecc_h[src.idx()] = hops.iter().copied().max().unwrap();

        // Hop extremes along shortest weighted paths: DP over the
        // shortest-path DAG in order of increasing distance.
        let mut order: Vec<NodeId> = g.nodes().collect();
        order.sort_by_key(|v| dist.dist[v.idx()]);
        let mut min_h = vec![Weight::MAX; n];
        let mut max_h = vec![0 as Weight; n];
        min_h[src.idx()] = 0;
        for &v in &order {
            if v == src {
                continue;
            }
            let dv = dist.dist[v.idx()].unwrap();
            for &(p, w) in g.ports(v) {
                if dist.dist[p.idx()].unwrap() + w == dv {
                    min_h[v.idx()] = min_h[v.idx()].min(min_h[p.idx()] + 1);
                    max_h[v.idx()] = max_h[v.idx()].max(max_h[p.idx()] + 1);
                }
            }
        }
        d_sp_min_hop = d_sp_min_hop.max(min_h.iter().copied().max().unwrap());
        d_sp_max_hop = d_sp_max_hop.max(max_h.iter().copied().max().unwrap());
    }
    Ok(GraphMetrics {
        d_h: ecc_h.iter().copied().max().unwrap(),
        d_w: ecc_w.iter().copied().max().unwrap(),
        ecc_h,
        ecc_w,
        d_sp_min_hop,
        d_sp_max_hop,
    })
}

/// BFS hop distances from `src` (unweighted).
pub fn hop_distances(g: &Graph, src: NodeId) -> Vec<Weight> {
    let mut dist = vec![Weight::MAX; g.n()];
    dist[src.idx()] = 0;
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        for &(v, _) in g.ports(u) {
            if dist[v.idx()] == Weight::MAX {
                dist[v.idx()] = dist[u.idx()] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}
