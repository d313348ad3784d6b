//! Exact sequential reference implementations. Every distributed result in
//! this crate is validated against these at desk scale.

mod smrct;

pub use smrct::{brute_force_smrct, routing_cost, SmrctError};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BinaryHeap;

use crate::graph::{Graph, NodeId, Weight};

/// Distances from one source; `None` marks unreachable nodes.
#[derive(Clone, Debug)]
pub struct DistanceVector {
    pub source: NodeId,
    pub dist: Vec<Option<Weight>>,
}

/// Exact shortest-path counts from one source, arbitrary precision.
#[derive(Clone, Debug)]
pub struct PathCounts {
    pub source: NodeId,
    pub sigma: Vec<BigUint>,
}

/// Per-node parent sets of the shortest-path DAG rooted at `root`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParentSets {
    pub root: NodeId,
    pub parents: Vec<Vec<NodeId>>,
}

/// Dijkstra from `src`.
pub fn sssp(g: &Graph, src: NodeId) -> DistanceVector {
    let mut dist: Vec<Option<Weight>> = vec![None; g.n()];
    dist[src.idx()] = Some(0);
    let mut heap: BinaryHeap<std::cmp::Reverse<(Weight, NodeId)>> = BinaryHeap::new();
    heap.push(std::cmp::Reverse((0, src)));
    while let Some(std::cmp::Reverse((d, u))) = heap.pop() {
        if dist[u.idx()] != Some(d) {
            continue;
        }
        for &(v, w) in g.ports(u) {
            let nd = d + w;
            if dist[v.idx()].map_or(true, |old| nd < old) {
                dist[v.idx()] = Some(nd);
                heap.push(std::cmp::Reverse((nd, v)));
            }
        }
    }
    DistanceVector { source: src, dist }
}

/// Parent sets restricted to nodes within distance `k` of the root
/// (`k = Weight::MAX` for the whole graph).
pub fn exact_parent_sets(g: &Graph, root: NodeId, k: Weight) -> ParentSets {
    let dist = sssp(g, root);
    let mut parents = vec![Vec::new(); g.n()];
    for v in g.nodes() {
        let Some(dv) = dist.dist[v.idx()] else { continue };
        if v == root || dv > k {
            continue;
        }
        for &(p, w) in g.ports(v) {
            if let Some(dp) = dist.dist[p.idx()] {
                if dp + w == dv {
                    parents[v.idx()].push(p);
                }
            }
        }
    }
    ParentSets { root, parents }
}

/// Nodes in increasing order of distance from `src` (ties by ID), with the
/// distance vector. Shared scaffolding for count/dependency recursions.
fn distance_order(g: &Graph, src: NodeId) -> (DistanceVector, Vec<NodeId>) {
    let dist = sssp(g, src);
    let mut order: Vec<NodeId> = g
        .nodes()
        .filter(|v| dist.dist[v.idx()].is_some())
        .collect();
    order.sort_by_key(|v| (dist.dist[v.idx()].unwrap(), *v));
    (dist, order)
}

/// Exact shortest-path counts via the parent recursion
/// `sigma[v] = sum over parents p of sigma[p]`, `sigma[src] = 1`.
pub fn shortest_path_counts(g: &Graph, src: NodeId) -> PathCounts {
    let (dist, order) = distance_order(g, src);
    let mut sigma = vec![BigUint::zero(); g.n()];
    sigma[src.idx()] = BigUint::one();
    for &v in &order {
        if v == src {
            continue;
        }
        let dv = dist.dist[v.idx()].unwrap();
        let mut total = BigUint::zero();
        for &(p, w) in g.ports(v) {
            if dv >= w && dist.dist[p.idx()] == Some(dv - w) {
                total += &sigma[p.idx()];
            }
        }
        sigma[v.idx()] = total;
    }
    PathCounts { source: src, sigma }
}

/// Exact dependencies `delta_{src*}(v)` for all `v`, via the bottom-up
/// recursion over the shortest-path DAG (accumulation in decreasing
/// distance order).
pub fn dependencies(g: &Graph, src: NodeId) -> Vec<BigRational> {
    let (dist, order) = distance_order(g, src);
    let counts = shortest_path_counts(g, src);
    let mut delta = vec![BigRational::zero(); g.n()];
    for &w_node in order.iter().rev() {
        if w_node == src {
            continue;
        }
        let dw = dist.dist[w_node.idx()].unwrap();
        let coeff = (BigRational::one() + delta[w_node.idx()].clone())
            / BigRational::from_integer(counts.sigma[w_node.idx()].clone().into());
        for &(v, w) in g.ports(w_node) {
            if dw >= w && dist.dist[v.idx()] == Some(dw - w) {
                let add = BigRational::from_integer(counts.sigma[v.idx()].clone().into())
                    * coeff.clone();
                delta[v.idx()] += add;
            }
        }
    }
    delta
}

/// Exact betweenness centrality: sum of dependencies over all sources,
/// halved once because the graph is undirected.
pub fn exact_betweenness(g: &Graph) -> Vec<BigRational> {
    let two = BigRational::from_integer(2.into());
    let mut bc = vec![BigRational::zero(); g.n()];
    for s in g.nodes() {
        for (v, d) in dependencies(g, s).into_iter().enumerate() {
            if NodeId::from_idx(v) != s {
                bc[v] += d;
            }
        }
    }
    for v in &mut bc {
        *v /= two.clone();
    }
    bc
}

/// Independent second oracle: enumerate every shortest path of every pair
/// and count interior hits. Exponential; intended for n <= 8.
pub fn naive_betweenness(g: &Graph) -> Vec<BigRational> {
    let n = g.n();
    let mut bc = vec![BigRational::zero(); n];
    for s in g.nodes() {
        let dist = sssp(g, s);
        for t in g.nodes() {
            if t <= s || dist.dist[t.idx()].is_none() {
                continue;
            }
            let paths = enumerate_shortest_paths(g, &dist, s, t);
            let total = paths.len() as u64;
            if total == 0 {
                continue;
            }
            let mut through = vec![0u64; n];
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    through[v.idx()] += 1;
                }
            }
            for v in 0..n {
                if through[v] > 0 {
                    bc[v] += BigRational::new(through[v].into(), total.into());
                }
            }
        }
    }
    bc
}

fn enumerate_shortest_paths(
    g: &Graph,
    dist: &DistanceVector,
    s: NodeId,
    t: NodeId,
) -> Vec<Vec<NodeId>> {
    // walk backwards from t along parent edges
    let mut out = Vec::new();
    let mut stack = vec![t];
    walk(g, dist, s, &mut stack, &mut out);
    fn walk(
        g: &Graph,
        dist: &DistanceVector,
        s: NodeId,
        stack: &mut Vec<NodeId>,
        out: &mut Vec<Vec<NodeId>>,
    ) {
        let v = *stack.last().unwrap();
        if v == s {
            let mut path: Vec<NodeId> = stack.clone();
            path.reverse();
            out.push(path);
            return;
        }
        let dv = dist.dist[v.idx()].unwrap();
        for &(p, w) in g.ports(v) {
            if dist.dist[p.idx()] == Some(dv.wrapping_sub(w)) && dv >= w {
                stack.push(p);
                walk(g, dist, s, stack, out);
                stack.pop();
            }
        }
    }
    out
}

/// Exact closeness centrality `(n-1) / sum of distances`; `None` for nodes
/// that cannot reach everyone (disconnected) or when n = 1.
pub fn exact_closeness(g: &Graph) -> Vec<Option<BigRational>> {
    let n = g.n();
    g.nodes()
        .map(|v| {
            let dist = sssp(g, v);
            let mut sum: Weight = 0;
            for d in &dist.dist {
                match d {
                    Some(d) => sum += d,
                    None => return None,
                }
            }
            if sum == 0 {
                return None;
            }
            Some(BigRational::new(
                (n as u64 - 1).into(),
                sum.into(),
            ))
        })
        .collect()
}

/// The deterministic shortest-path tree the distributed tree construction
/// converges to: every non-root node keeps its lowest-ID parent.
pub fn lowest_id_parent_tree(g: &Graph, root: NodeId) -> Vec<Option<NodeId>> {
    let parents = exact_parent_sets(g, root, Weight::MAX);
    let mut out = vec![None; g.n()];
    for v in g.nodes() {
        if v != root {
            out[v.idx()] = parents.parents[v.idx()].iter().min().copied();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_diamond_chain, gen_random_connected, node_set};

    fn path3() -> Graph {
        Graph::new(3, &[(1, 2, 1), (2, 3, 1)]).unwrap()
    }

    #[test]
    fn sssp_path() {
        let d = sssp(&path3(), NodeId(1));
        assert_eq!(d.dist, vec![Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn sssp_routes_around_heavy_edge() {
        let g = Graph::new(3, &[(1, 2, 1), (2, 3, 1), (1, 3, 3)]).unwrap();
        let d = sssp(&g, NodeId(1));
        assert_eq!(d.dist[2], Some(2));
    }

    #[test]
    fn sssp_unreachable_is_none() {
        let g = Graph::new(3, &[(1, 2, 1)]).unwrap();
        let d = sssp(&g, NodeId(3));
        assert_eq!(d.dist, vec![None, None, Some(0)]);
    }

    #[test]
    fn star_parent_sets() {
        let g = Graph::new(5, &[(1, 2, 1), (1, 3, 1), (1, 4, 1), (1, 5, 1)]).unwrap();
        let p = exact_parent_sets(&g, NodeId(1), Weight::MAX);
        for leaf in 2..=5u32 {
            assert_eq!(p.parents[NodeId(leaf).idx()], vec![NodeId(1)]);
        }
    }

    #[test]
    fn diamond_join_has_two_parents() {
        let g = gen_diamond_chain(4).unwrap();
        let p = exact_parent_sets(&g, NodeId(1), Weight::MAX);
        assert_eq!(p.parents[NodeId(4).idx()].len(), 2);
    }

    #[test]
    fn parent_sets_satisfy_defining_equation() {
        let g = gen_random_connected(25, 0.15, 6, 5);
        let root = NodeId(7);
        let p = exact_parent_sets(&g, root, Weight::MAX);
        let d = sssp(&g, root);
        for v in g.nodes() {
            if v == root {
                continue;
            }
            for u in g.nodes() {
                let is_parent = p.parents[v.idx()].contains(&u);
                let should = g.edge_weight(u, v).map_or(false, |w| {
                    d.dist[u.idx()].unwrap() + w == d.dist[v.idx()].unwrap()
                });
                assert_eq!(is_parent, should, "root {root} v {v} u {u}");
            }
        }
    }

    #[test]
    fn counts_on_path_and_k4() {
        let c = shortest_path_counts(&path3(), NodeId(1));
        assert!(c.sigma.iter().all(|s| *s == BigUint::one()));

        let mut raw = Vec::new();
        for a in 1..=4u32 {
            for b in a + 1..=4 {
                raw.push((a, b, 1));
            }
        }
        let k4 = Graph::new(4, &raw).unwrap();
        let c = shortest_path_counts(&k4, NodeId(1));
        for v in 2..=4u32 {
            assert_eq!(c.sigma[NodeId(v).idx()], BigUint::one());
        }
    }

    #[test]
    fn counts_satisfy_parent_sum() {
        let g = gen_random_connected(20, 0.2, 5, 11);
        let src = NodeId(3);
        let c = shortest_path_counts(&g, src);
        let p = exact_parent_sets(&g, src, Weight::MAX);
        for v in g.nodes() {
            if v == src {
                continue;
            }
            let sum: BigUint = p.parents[v.idx()]
                .iter()
                .map(|u| c.sigma[u.idx()].clone())
                .sum();
            assert_eq!(c.sigma[v.idx()], sum);
        }
    }

    #[test]
    fn bc_path_and_star_and_k4() {
        let bc = exact_betweenness(&path3());
        assert_eq!(bc[1], BigRational::one());
        assert!(bc[0].is_zero() && bc[2].is_zero());

        // star with 4 leaves: BC(center) = 4*3/2 = 6
        let g = Graph::new(5, &[(1, 2, 1), (1, 3, 1), (1, 4, 1), (1, 5, 1)]).unwrap();
        let bc = exact_betweenness(&g);
        assert_eq!(bc[0], BigRational::from_integer(6.into()));

        let mut raw = Vec::new();
        for a in 1..=4u32 {
            for b in a + 1..=4 {
                raw.push((a, b, 1));
            }
        }
        let k4 = Graph::new(4, &raw).unwrap();
        assert!(exact_betweenness(&k4).iter().all(|b| b.is_zero()));
    }

    #[test]
    fn recursion_matches_naive_enumeration() {
        for seed in 0..6 {
            let g = gen_random_connected(8, 0.3, 4, seed);
            let fast = exact_betweenness(&g);
            let slow = naive_betweenness(&g);
            assert_eq!(fast, slow, "seed {seed}");
        }
    }

    #[test]
    fn bc_invariant_under_relabeling() {
        let g = gen_random_connected(12, 0.25, 5, 21);
        let perm: Vec<NodeId> = (0..12).map(|i| NodeId((i as u32 + 5) % 12 + 1)).collect();
        let h = g.relabel(&perm);
        let bc_g = exact_betweenness(&g);
        let bc_h = exact_betweenness(&h);
        for v in 0..12 {
            assert_eq!(bc_g[v], bc_h[perm[v].idx()]);
        }
    }

    #[test]
    fn closeness_examples() {
        let cc = exact_closeness(&path3());
        assert_eq!(cc[1], Some(BigRational::one()));
        assert_eq!(cc[0], Some(BigRational::new(2.into(), 3.into())));

        let mut raw = Vec::new();
        for a in 1..=5u32 {
            for b in a + 1..=5 {
                raw.push((a, b, 1));
            }
        }
        let k5 = Graph::new(5, &raw).unwrap();
        for c in exact_closeness(&k5) {
            assert_eq!(c, Some(BigRational::one()));
        }
    }

    #[test]
    fn closeness_matches_inverse_mean_distance() {
        let g = gen_random_connected(20, 0.2, 8, 31);
        let cc = exact_closeness(&g);
        for v in g.nodes() {
            let d = sssp(&g, v);
            let sum: Weight = d.dist.iter().map(|x| x.unwrap()).sum();
            let expect = BigRational::new((g.n() as u64 - 1).into(), sum.into());
            assert_eq!(cc[v.idx()], Some(expect));
        }
    }

    #[test]
    fn lowest_id_tree_is_shortest_path_tree() {
        let g = gen_random_connected(18, 0.2, 9, 8);
        let root = NodeId(4);
        let tree = lowest_id_parent_tree(&g, root);
        let d = sssp(&g, root);
        for v in g.nodes() {
            if v == root {
                assert!(tree[v.idx()].is_none());
                continue;
            }
            let p = tree[v.idx()].unwrap();
            let w = g.edge_weight(p, v).unwrap();
            assert_eq!(d.dist[p.idx()].unwrap() + w, d.dist[v.idx()].unwrap());
        }
    }

    #[test]
    fn dependency_by_hand_on_path() {
        // root a of a-b-c: delta_{a*}(b) = 1
        let d = dependencies(&path3(), NodeId(1));
        assert_eq!(d[1], BigRational::one());
        assert!(d[2].is_zero());
        let _ = node_set(&[1]);
    }
}
