//! Routing cost of subtrees and exhaustive S-MRCT search.

use std::collections::BTreeSet;

use crate::graph::{Graph, NodeId, Weight};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SmrctError {
    #[error("edge set is not a tree")]
    NotATree,
    #[error("tree does not span the terminal set")]
    DoesNotSpanS,
    #[error("graph too large for exhaustive search (n <= 10)")]
    TooLarge,
    #[error("terminal set is empty")]
    EmptyS,
}

/// Routing cost of a subtree with respect to `s`: the sum over ordered
/// pairs `(u, v)` in `s x s` of the tree distance, so every unordered pair
/// counts twice.
pub fn routing_cost(
    g: &Graph,
    tree_edges: &[(NodeId, NodeId)],
    s: &BTreeSet<NodeId>,
) -> Result<Weight, SmrctError> {
    if s.is_empty() {
        return Err(SmrctError::EmptyS);
    }
    // adjacency of the tree, validating edges exist in g
    let mut adj: Vec<Vec<(NodeId, Weight)>> = vec![Vec::new(); g.n()];
    let mut touched: BTreeSet<NodeId> = BTreeSet::new();
    for &(u, v) in tree_edges {
        let w = g.edge_weight(u, v).ok_or(SmrctError::NotATree)?;
        adj[u.idx()].push((v, w));
        adj[v.idx()].push((u, w));
        touched.insert(u);
        touched.insert(v);
    }
    if s.len() == 1 {
        return Ok(0);
    }
    // the edge set must be acyclic and connect all touched nodes
    let start = *touched.iter().next().ok_or(SmrctError::DoesNotSpanS)?;
    let mut seen = BTreeSet::new();
    let mut stack = vec![(start, start)];
    seen.insert(start);
    while let Some((u, from)) = stack.pop() {
        for &(v, _) in &adj[u.idx()] {
            if v == from {
                continue;
            }
            if !seen.insert(v) {
                return Err(SmrctError::NotATree);
            }
            stack.push((v, u));
        }
    }
    if seen.len() != tree_edges.len() + 1 {
        return Err(SmrctError::NotATree);
    }
    if !s.iter().all(|v| seen.contains(v)) {
        return Err(SmrctError::DoesNotSpanS);
    }

    let mut total: Weight = 0;
    for &u in s {
        // BFS in the tree from u
        let mut dist = vec![None; g.n()];
        dist[u.idx()] = Some(0u64);
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(u);
        while let Some(x) = queue.pop_front() {
            for &(y, w) in &adj[x.idx()] {
                if dist[y.idx()].is_none() {
                    dist[y.idx()] = Some(dist[x.idx()].unwrap() + w);
                    queue.push_back(y);
                }
            }
        }
        for &v in s {
            total += dist[v.idx()].ok_or(SmrctError::DoesNotSpanS)?;
        }
    }
    Ok(total)
}

/// Globally optimal S-MRCT by enumerating, for every vertex superset of
/// `s` whose induced subgraph is connected, every spanning tree of that
/// subgraph. Guarded to n <= 10.
pub fn brute_force_smrct(
    g: &Graph,
    s: &BTreeSet<NodeId>,
) -> Result<(Vec<(NodeId, NodeId)>, Weight), SmrctError> {
    if s.is_empty() {
        return Err(SmrctError::EmptyS);
    }
    if g.n() > 10 {
        return Err(SmrctError::TooLarge);
    }
    let n = g.n();
    let s_mask: u32 = s.iter().map(|v| 1u32 << v.idx()).sum();
    let all: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let free = all & !s_mask;
    let mut best: Option<(Vec<(NodeId, NodeId)>, Weight)> = None;

    // every vertex superset of s: s_mask | t for every sub-mask t of free
    let mut t = free;
    loop {
        let subset = s_mask | t;
        let edges_in: Vec<(NodeId, NodeId, Weight)> = g
            .edges()
            .iter()
            .filter(|e| subset & (1 << e.u.idx()) != 0 && subset & (1 << e.v.idx()) != 0)
            .map(|e| (e.u, e.v, e.w))
            .collect();
        let verts = subset.count_ones() as usize;
        if verts == 1 || spanning_possible(subset, &edges_in) {
            enumerate_spanning_trees(subset, &edges_in, &mut |tree| {
                let edge_list: Vec<(NodeId, NodeId)> =
                    tree.iter().map(|&(u, v, _)| (u, v)).collect();
                let rc = routing_cost(g, &edge_list, s).expect("enumerated tree spans s");
                // ties prefer fewer edges so dangling Steiner nodes are pruned
                let better = best
                    .as_ref()
                    .map_or(true, |(t, b)| rc < *b || (rc == *b && edge_list.len() < t.len()));
                if better {
                    best = Some((edge_list, rc));
                }
            });
        }
        if t == 0 {
            break;
        }
        t = (t - 1) & free;
    }
    best.ok_or(SmrctError::DoesNotSpanS)
}

fn spanning_possible(mask: u32, edges: &[(NodeId, NodeId, Weight)]) -> bool {
    // connectivity of the induced subgraph via union-find
    let mut parent: Vec<usize> = (0..32).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut comps = mask.count_ones() as usize;
    for &(u, v, _) in edges {
        let a = find(&mut parent, u.idx());
        let b = find(&mut parent, v.idx());
        if a != b {
            parent[a] = b;
            comps -= 1;
        }
    }
    comps == 1
}

/// Enumerate all spanning trees of the induced subgraph by
/// contract/delete recursion on the edge list.
fn enumerate_spanning_trees(
    mask: u32,
    edges: &[(NodeId, NodeId, Weight)],
    emit: &mut impl FnMut(&[(NodeId, NodeId, Weight)]),
) {
    let verts = mask.count_ones() as usize;
    if verts == 1 {
        emit(&[]);
        return;
    }
    let mut chosen = Vec::with_capacity(verts - 1);
    // union-find labels over node indices
    let labels: Vec<usize> = (0..32).collect();
    recurse(edges, 0, verts - 1, &labels, &mut chosen, emit);

    fn recurse(
        edges: &[(NodeId, NodeId, Weight)],
        i: usize,
        need: usize,
        labels: &[usize],
        chosen: &mut Vec<(NodeId, NodeId, Weight)>,
        emit: &mut impl FnMut(&[(NodeId, NodeId, Weight)]),
    ) {
        if need == 0 {
            emit(chosen);
            return;
        }
        if edges.len() - i < need {
            return;
        }
        let (u, v, w) = edges[i];
        let (lu, lv) = (root(labels, u.idx()), root(labels, v.idx()));
        // include edges[i] if it joins two components
        if lu != lv {
            let mut merged = labels.to_vec();
            merged[lu] = lv;
            chosen.push((u, v, w));
            recurse(edges, i + 1, need - 1, &merged, chosen, emit);
            chosen.pop();
        }
        // exclude edges[i]
        recurse(edges, i + 1, need, labels, chosen, emit);
    }

    fn root(labels: &[usize], mut x: usize) -> usize {
        while labels[x] != x {
            x = labels[x];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_random_connected, node_set, Graph};

    #[test]
    fn single_terminal_costs_zero() {
        let g = Graph::new(3, &[(1, 2, 1), (2, 3, 1)]).unwrap();
        let s = node_set(&[2]);
        assert_eq!(routing_cost(&g, &[], &s), Ok(0));
    }

    #[test]
    fn path_pair_counts_both_directions() {
        let g = Graph::new(3, &[(1, 2, 1), (2, 3, 1)]).unwrap();
        let tree = [(NodeId(1), NodeId(2)), (NodeId(2), NodeId(3))];
        let s = node_set(&[1, 3]);
        assert_eq!(routing_cost(&g, &tree, &s), Ok(4));
    }

    #[test]
    fn star_three_leaves() {
        let g = Graph::new(4, &[(1, 2, 1), (1, 3, 1), (1, 4, 1)]).unwrap();
        let tree = [(NodeId(1), NodeId(2)), (NodeId(1), NodeId(3)), (NodeId(1), NodeId(4))];
        let s = node_set(&[2, 3, 4]);
        // 3 unordered pairs at tree distance 2, counted twice
        assert_eq!(routing_cost(&g, &tree, &s), Ok(12));
    }

    #[test]
    fn rejects_cycles_and_gaps() {
        let g = Graph::new(3, &[(1, 2, 1), (2, 3, 1), (1, 3, 1)]).unwrap();
        let s = node_set(&[1, 3]);
        let cyc = [(NodeId(1), NodeId(2)), (NodeId(2), NodeId(3)), (NodeId(1), NodeId(3))];
        assert_eq!(routing_cost(&g, &cyc, &s).unwrap_err(), SmrctError::NotATree);
        let gap = [(NodeId(1), NodeId(2))];
        assert_eq!(
            routing_cost(&g, &gap, &s).unwrap_err(),
            SmrctError::DoesNotSpanS
        );
    }

    #[test]
    fn adjacent_pair_optimum_is_the_edge() {
        let g = Graph::new(4, &[(1, 2, 3), (1, 3, 1), (2, 3, 1), (3, 4, 2)]).unwrap();
        let s = node_set(&[1, 2]);
        let (tree, rc) = brute_force_smrct(&g, &s).unwrap();
        // best is 1-3-2 at cost 2 each way, beating the direct edge of 3
        assert_eq!(rc, 4);
        assert_eq!(tree.len(), 2);
    }

    #[test]
    fn cycle4_all_terminals() {
        let g = Graph::new(4, &[(1, 2, 1), (2, 3, 1), (3, 4, 1), (1, 4, 1)]).unwrap();
        let s = node_set(&[1, 2, 3, 4]);
        let (_, rc) = brute_force_smrct(&g, &s).unwrap();
        // any path tree of C4: ordered-pair cost 2*(1+2+3+1+2+1) = 20
        assert_eq!(rc, 20);
    }

    #[test]
    fn steiner_node_helps() {
        // star: terminals are the 3 leaves; optimal tree must include the hub
        let g = Graph::new(4, &[(1, 2, 1), (1, 3, 1), (1, 4, 1), (2, 3, 5)]).unwrap();
        let s = node_set(&[2, 3, 4]);
        let (tree, rc) = brute_force_smrct(&g, &s).unwrap();
        assert_eq!(rc, 12);
        assert!(tree.iter().all(|&(u, v)| u == NodeId(1) || v == NodeId(1)));
    }

    #[test]
    fn guard_on_large_graphs() {
        let g = gen_random_connected(11, 0.3, 3, 1);
        assert_eq!(
            brute_force_smrct(&g, &node_set(&[1, 2])).unwrap_err(),
            SmrctError::TooLarge
        );
    }
}
