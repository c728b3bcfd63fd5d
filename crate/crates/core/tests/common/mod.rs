//! Oracles shared by the integration and acceptance targets. They avoid
//! the library code paths they are used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use percolab::graph::BridgeModel;
use percolab::{NodeId, SmallWorldGraph};

/// 5-cycle plus the bridge {0, 3}: six edges, so 64 percolation outcomes.
pub const FIXTURE_N: usize = 5;
pub const FIXTURE_EDGES: [(usize, usize); 6] = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 3)];

pub fn fixture() -> SmallWorldGraph {
    SmallWorldGraph::from_bridges(FIXTURE_N, &[(0, 3)], BridgeModel::Custom).unwrap()
}

/// Exact laws of the reachable-set size and of each hop-level size.
pub struct ExactLaw {
    pub reachable: BTreeMap<u64, f64>,
    /// `levels[t]` for `t = 0..=n`.
    pub levels: Vec<BTreeMap<u64, f64>>,
}

/// Enumerates all `2^m` retained-edge subsets, edge `i` kept with
/// probability `p[i]`, and breadth-first layers each from `sources`.
pub fn enumerate_percolation(n: usize, edges: &[(usize, usize)], p: &[f64], sources: &[usize]) -> ExactLaw {
    assert_eq!(edges.len(), p.len());
    assert!(edges.len() < 24);
    let mut reachable = BTreeMap::new();
    let mut levels = vec![BTreeMap::new(); n + 1];
    for mask in 0u32..(1 << edges.len()) {
        let mut weight = 1.0;
        let mut adj = vec![Vec::new(); n];
        for (i, &(a, b)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                weight *= p[i];
                adj[a].push(b);
                adj[b].push(a);
            } else {
                weight *= 1.0 - p[i];
            }
        }
        if weight == 0.0 {
            continue;
        }
        let layers = layer_sizes(&adj, sources);
        *reachable.entry(layers.iter().sum::<usize>() as u64).or_insert(0.0) += weight;
        for (t, law) in levels.iter_mut().enumerate() {
            *law.entry(layers.get(t).copied().unwrap_or(0) as u64).or_insert(0.0) += weight;
        }
    }
    ExactLaw { reachable, levels }
}

fn layer_sizes(adj: &[Vec<usize>], sources: &[usize]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] == usize::MAX {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    let mut sizes = Vec::new();
    while let Some(u) = queue.pop_front() {
        if sizes.len() <= dist[u] {
            sizes.push(0);
        }
        sizes[dist[u]] += 1;
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    sizes
}

/// Component label per node by repeated search over an explicit edge list.
pub fn component_labels(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut label = vec![usize::MAX; n];
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = s;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if label[v] == usize::MAX {
                    label[v] = s;
                    stack.push(v);
                }
            }
        }
    }
    label
}

/// Nodes sharing a component with any of `sources`.
pub fn component_of(labels: &[usize], sources: &[NodeId]) -> BTreeSet<NodeId> {
    let wanted: BTreeSet<_> = sources.iter().map(|&s| labels[s]).collect();
    (0..labels.len()).filter(|&v| wanted.contains(&labels[v])).collect()
}

pub fn tv(a: &BTreeMap<u64, f64>, b: &BTreeMap<u64, f64>) -> f64 {
    let keys: BTreeSet<_> = a.keys().chain(b.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

/// Retained edges of a percolated graph, ring edges first.
pub fn retained_edges(gp: &percolab::PercolationGraph) -> Vec<(usize, usize)> {
    let n = gp.n();
    let mut edges: Vec<_> = (0..n).filter(|&i| gp.ring_active(i)).map(|i| (i, (i + 1) % n)).collect();
    edges.extend(gp.retained_bridges().edges());
    edges
}

/// Hop distance from `sources` over an explicit edge list; `usize::MAX`
/// when unreachable.
pub fn distances(n: usize, edges: &[(usize, usize)], sources: &[usize]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}
