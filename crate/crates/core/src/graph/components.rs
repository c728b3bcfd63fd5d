use std::collections::VecDeque;

use super::{NodeId, Topology};
use crate::error::{Error, Result};

/// Disjoint-set forest with union by size and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `true` if the two sets were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

fn union_all<G: Topology>(g: &G) -> UnionFind {
    let n = g.node_count();
    let mut uf = UnionFind::new(n);
    for u in 0..n {
        g.for_each_neighbor(u, |v, _| {
            if u < v {
                uf.union(u, v);
            }
        });
    }
    uf
}

/// Connected components, largest first; ties go to the smaller minimum id.
/// Each component lists its nodes in ascending order.
pub fn connected_components<G: Topology>(g: &G) -> Vec<Vec<NodeId>> {
    let n = g.node_count();
    let mut uf = union_all(g);
    let mut slot = vec![usize::MAX; n];
    let mut comps: Vec<Vec<NodeId>> = Vec::new();
    for v in 0..n {
        let r = uf.find(v);
        if slot[r] == usize::MAX {
            slot[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[slot[r]].push(v);
    }
    // comps are already in order of minimum id; stable sort keeps the tie rule
    comps.sort_by(|a, b| b.len().cmp(&a.len()));
    comps
}

/// Component sizes in descending order.
pub fn component_sizes<G: Topology>(g: &G) -> Vec<usize> {
    let n = g.node_count();
    let mut uf = union_all(g);
    let mut sizes = Vec::new();
    for v in 0..n {
        if uf.find(v) == v {
            sizes.push(uf.size[v]);
        }
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// BFS restricted to `member`; writes distances into `dist` (reset by the
/// caller) and returns (eccentricity, nodes reached, farthest node).
fn bfs_within<G: Topology>(
    g: &G,
    source: NodeId,
    member: &[bool],
    dist: &mut [u32],
    queue: &mut VecDeque<NodeId>,
) -> (usize, usize, NodeId) {
    queue.clear();
    dist[source] = 0;
    queue.push_back(source);
    let mut reached = 1;
    let mut far = (0u32, source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u];
        if du > far.0 {
            far = (du, u);
        }
        g.for_each_neighbor(u, |v, _| {
            if member[v] && dist[v] == u32::MAX {
                dist[v] = du + 1;
                reached += 1;
                queue.push_back(v);
            }
        });
    }
    (far.0 as usize, reached, far.1)
}

fn membership(n: usize, component: &[NodeId]) -> Result<Vec<bool>> {
    let mut member = vec![false; n];
    for &v in component {
        if v >= n {
            return Err(Error::Parameter(format!("node {v} out of range")));
        }
        member[v] = true;
    }
    Ok(member)
}

/// Hop diameter of the subgraph induced by `component`, by a BFS from every
/// node: O(|C| * (|C| + edges)) time. Meant for components up to ~10^5 nodes.
pub fn component_diameter<G: Topology>(g: &G, component: &[NodeId]) -> Result<usize> {
    if component.is_empty() {
        return Err(Error::Contract("empty component".into()));
    }
    let n = g.node_count();
    let member = membership(n, component)?;
    let size = member.iter().filter(|&&m| m).count();
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    let mut diameter = 0;
    for &s in component {
        for &v in component {
            dist[v] = u32::MAX;
        }
        let (ecc, reached, _) = bfs_within(g, s, &member, &mut dist, &mut queue);
        if reached != size {
            return Err(Error::Contract("node set is not connected".into()));
        }
        diameter = diameter.max(ecc);
    }
    Ok(diameter)
}

/// Exact hop diameter of a connected node set using the iFUB bound
/// scheme (Crescenzi et al.): BFS layers from a central node give lower and
/// upper bounds that usually meet after a handful of traversals.
pub fn exact_diameter<G: Topology>(g: &G, component: &[NodeId]) -> Result<usize> {
    if component.is_empty() {
        return Err(Error::Contract("empty component".into()));
    }
    let n = g.node_count();
    let member = membership(n, component)?;
    let size = member.iter().filter(|&&m| m).count();
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    let reset = |dist: &mut [u32]| {
        for &v in component {
            dist[v] = u32::MAX;
        }
    };

    // double sweep, then start from the midpoint of the a-b path
    let (_, reached, a) = bfs_within(g, component[0], &member, &mut dist, &mut queue);
    if reached != size {
        return Err(Error::Contract("node set is not connected".into()));
    }
    reset(&mut dist);
    let (ecc_a, _, b) = bfs_within(g, a, &member, &mut dist, &mut queue);
    let from_a = dist.clone();
    reset(&mut dist);
    let (_, _, _) = bfs_within(g, b, &member, &mut dist, &mut queue);
    let half = (ecc_a / 2) as u32;
    let center = component
        .iter()
        .copied()
        .find(|&v| from_a[v] == half && from_a[v] + dist[v] == ecc_a as u32)
        .unwrap_or(a);

    reset(&mut dist);
    let (ecc_c, _, _) = bfs_within(g, center, &member, &mut dist, &mut queue);
    let mut levels: Vec<Vec<NodeId>> = vec![Vec::new(); ecc_c + 1];
    for &v in component {
        levels[dist[v] as usize].push(v);
    }

    let mut lower = ecc_a.max(ecc_c);
    let mut i = ecc_c;
    let mut upper = 2 * ecc_c;
    while upper > lower && i > 0 {
        let mut level_max = 0;
        for &v in &levels[i] {
            reset(&mut dist);
            let (ecc, _, _) = bfs_within(g, v, &member, &mut dist, &mut queue);
            level_max = level_max.max(ecc);
        }
        lower = lower.max(level_max);
        if lower > 2 * (i - 1) {
            return Ok(lower);
        }
        upper = 2 * (i - 1);
        i -= 1;
    }
    Ok(lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{BridgeModel, PercolationGraph, RingMask, SmallWorldGraph};

    fn ring_only(n: usize, active: &[usize]) -> PercolationGraph {
        let g = SmallWorldGraph::from_bridges(n, &[], BridgeModel::Custom).unwrap();
        let mut mask = RingMask::new(n, false);
        for &i in active {
            mask.set(i, true);
        }
        PercolationGraph::from_parts(&g, mask, &[], 1.0, 1.0).unwrap()
    }

    #[test]
    fn edgeless_gives_singletons() {
        let gp = ring_only(6, &[]);
        let comps = connected_components(&gp);
        assert_eq!(comps.len(), 6);
        assert!(comps.iter().enumerate().all(|(i, c)| c == &vec![i]));
    }

    #[test]
    fn full_ring_is_one_component() {
        let gp = ring_only(9, &(0..9).collect::<Vec<_>>());
        assert_eq!(connected_components(&gp), vec![(0..9).collect::<Vec<_>>()]);
        assert_eq!(component_diameter(&gp, &(0..9).collect::<Vec<_>>()).unwrap(), 4);
        let gp = ring_only(10, &(0..10).collect::<Vec<_>>());
        assert_eq!(exact_diameter(&gp, &(0..10).collect::<Vec<_>>()).unwrap(), 5);
    }

    #[test]
    fn hand_checked_five_ring() {
        let gp = ring_only(5, &[0, 2]);
        assert_eq!(connected_components(&gp), vec![vec![0, 1], vec![2, 3], vec![4]]);
        assert_eq!(component_sizes(&gp), vec![2, 2, 1]);
    }

    #[test]
    fn diameters() {
        let gp = ring_only(10, &[0, 1, 2, 3]);
        assert_eq!(component_diameter(&gp, &[0, 1, 2, 3, 4]).unwrap(), 4);
        assert_eq!(exact_diameter(&gp, &[0, 1, 2, 3, 4]).unwrap(), 4);
        assert_eq!(component_diameter(&gp, &[7]).unwrap(), 0);
        assert!(component_diameter(&gp, &[0, 1, 7]).is_err());
        assert!(exact_diameter(&gp, &[0, 7]).is_err());
    }
}
