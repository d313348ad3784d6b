//! Deterministic graph generators. Same parameters and seed always produce
//! the identical graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, NodeId, Weight};

/// Random connected graph: a uniform random labeled spanning tree (built
/// from a random Pruefer sequence) plus independent coin-flip edges with
/// probability `edge_prob`, weights uniform in `1..=max_weight`.
pub fn gen_random_connected(
    n: usize,
    edge_prob: f64,
    max_weight: Weight,
    seed: u64,
) -> Graph {
    assert!(n >= 1, "need at least one node");
    assert!(
        edge_prob > 0.0 && edge_prob <= 1.0,
        "edge probability must be in (0, 1]"
    );
    assert!(max_weight >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut present = vec![false; n * n];
    let mut raw: Vec<(u32, u32, Weight)> = Vec::new();
    let add = |raw: &mut Vec<(u32, u32, Weight)>, present: &mut Vec<bool>, a: usize, b: usize, w: Weight| {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if !present[a * n + b] {
            present[a * n + b] = true;
            raw.push((a as u32 + 1, b as u32 + 1, w));
        }
    };

    if n >= 2 {
        for (a, b) in pruefer_tree(n, &mut rng) {
            let w = rng.gen_range(1..=max_weight);
            add(&mut raw, &mut present, a, b, w);
        }
        for a in 0..n {
            for b in a + 1..n {
                if !present[a * n + b] && rng.gen_bool(edge_prob) {
                    let w = rng.gen_range(1..=max_weight);
                    add(&mut raw, &mut present, a, b, w);
                }
            }
        }
    }
    Graph::new(n, &raw).expect("generator emits valid edges")
}

/// Decode a random Pruefer sequence into the edges of a uniform random
/// labeled tree on `n` nodes (0-based).
fn pruefer_tree(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    if n == 2 {
        return vec![(0, 1)];
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    // min-heap of current leaves
    let mut leaves: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
        .filter(|&v| degree[v] == 1)
        .map(std::cmp::Reverse)
        .collect();
    for &s in &seq {
        let std::cmp::Reverse(leaf) = leaves.pop().expect("tree decode invariant");
        edges.push((leaf, s));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.push(std::cmp::Reverse(s));
        }
    }
    let std::cmp::Reverse(a) = leaves.pop().unwrap();
    let std::cmp::Reverse(b) = leaves.pop().unwrap();
    edges.push((a, b));
    edges
}

/// Root-and-chain graph used for round-count measurements: roots `1..=s`
/// all adjacent to the chain head `s+1`, followed by `d-1` further chain
/// nodes. Unit weights.
pub fn gen_lowerbound_chain(s: usize, d: usize) -> Graph {
    assert!(s >= 1 && d >= 1);
    let n = s + d;
    let head = s as u32 + 1;
    let mut raw: Vec<(u32, u32, Weight)> = (1..=s as u32).map(|r| (r, head, 1)).collect();
    for c in 0..d as u32 - 1 {
        raw.push((head + c, head + c + 1, 1));
    }
    Graph::new(n, &raw).expect("chain construction is valid")
}

/// Chain of (n-2)/2 two-node layers between node 1 and node n, consecutive
/// layers completely connected, unit weights. The number of shortest paths
/// from node 1 to node n is exactly 2^((n-2)/2).
pub fn gen_diamond_chain(n: usize) -> Result<Graph, &'static str> {
    if n < 4 || n % 2 != 0 {
        return Err("diamond chain needs an even node count >= 4");
    }
    let layers = (n - 2) / 2;
    let mut raw: Vec<(u32, u32, Weight)> = Vec::new();
    // layer i (1-based) holds nodes 2i and 2i+1
    let layer = |i: usize| (2 * i as u32, 2 * i as u32 + 1);
    let (a1, b1) = layer(1);
    raw.push((1, a1, 1));
    raw.push((1, b1, 1));
    for i in 1..layers {
        let (a, b) = layer(i);
        let (c, d) = layer(i + 1);
        for x in [a, b] {
            for y in [c, d] {
                raw.push((x, y, 1));
            }
        }
    }
    let (al, bl) = layer(layers);
    raw.push((al, n as u32, 1));
    raw.push((bl, n as u32, 1));
    Ok(Graph::new(n, &raw).expect("diamond construction is valid"))
}

/// First and last node of a diamond chain (the pair whose shortest-path
/// count is 2^((n-2)/2)).
pub fn diamond_endpoints(g: &Graph) -> (NodeId, NodeId) {
    (NodeId(1), NodeId(g.n() as u32))
}
