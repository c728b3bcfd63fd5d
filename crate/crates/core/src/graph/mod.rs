//! Small-world graph models, bounded-degree graphs and bond percolation.

mod adjacency;
mod components;
pub mod edgelist;
mod percolation;
mod ring;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use adjacency::Adjacency;
pub use components::{
    component_diameter, component_sizes, connected_components, exact_diameter, UnionFind,
};
pub use percolation::{percolate, Percolable, PercolationGraph};
pub use ring::{ring_distance, RingMask};
pub(crate) use ring::{ring_edge_index, ring_next, ring_prev};

/// Node index in `0..n`.
pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    /// Ring edge, or any edge of a generic graph.
    Local,
    Bridge,
}

/// Read access to an undirected graph.
///
/// `for_each_neighbor` visits neighbors in ascending id order; epidemic
/// simulations consume randomness in that order.
pub trait Topology {
    fn node_count(&self) -> usize;
    fn for_each_neighbor<F: FnMut(NodeId, EdgeKind)>(&self, v: NodeId, f: F);

    fn neighbor_list(&self, v: NodeId) -> Vec<(NodeId, EdgeKind)> {
        let mut out = Vec::new();
        self.for_each_neighbor(v, |u, k| out.push((u, k)));
        out
    }
}

/// Merges the two ring neighbors into an ascending bridge list.
#[inline]
pub(crate) fn merge_ring_and_bridges<F: FnMut(NodeId, EdgeKind)>(
    ring: [Option<NodeId>; 2],
    bridges: &[NodeId],
    mut f: F,
) {
    let ring = match ring {
        [Some(a), Some(b)] if b < a => [Some(b), Some(a)],
        [None, b] => [b, None],
        r => r,
    };
    let mut r = ring.into_iter().flatten().peekable();
    for &b in bridges {
        while let Some(&x) = r.peek() {
            if x < b {
                f(x, EdgeKind::Local);
                r.next();
            } else {
                break;
            }
        }
        f(b, EdgeKind::Bridge);
    }
    for x in r {
        f(x, EdgeKind::Local);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BridgeModel {
    /// Each pair is a bridge independently with probability `c / n`.
    Erdos { c: f64 },
    /// Bridges of a uniform perfect matching.
    Matching,
    /// Explicit bridge list, e.g. a hand-built fixture.
    Custom,
}

impl BridgeModel {
    pub fn tag(&self) -> String {
        match self {
            BridgeModel::Erdos { c } => format!("erdos:c={c}"),
            BridgeModel::Matching => "matching".to_string(),
            BridgeModel::Custom => "custom".to_string(),
        }
    }
}

/// A cycle on `n` nodes plus a set of bridges. Ring edges are implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallWorldGraph {
    n: usize,
    bridges: Adjacency,
    model: BridgeModel,
}

impl SmallWorldGraph {
    /// Builds a graph from an explicit bridge list.
    ///
    /// Rejects self-loops, out-of-range endpoints and bridges that coincide
    /// with ring edges; repeated bridges collapse to one.
    pub fn from_bridges(n: usize, bridges: &[(NodeId, NodeId)], model: BridgeModel) -> Result<Self> {
        if n < 3 {
            return Err(Error::Parameter(format!("ring needs n >= 3, got {n}")));
        }
        for &(u, v) in bridges {
            if u >= n || v >= n {
                return Err(Error::Parameter(format!("bridge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::Contract(format!("self-loop bridge at {u}")));
            }
            if ring_edge_index(n, u, v).is_some() {
                return Err(Error::Contract(format!("bridge ({u}, {v}) duplicates a ring edge")));
            }
        }
        let g = SmallWorldGraph {
            n,
            bridges: Adjacency::from_edges(n, bridges),
            model,
        };
        if model == BridgeModel::Matching && g.bridges.max_degree() > 1 {
            return Err(Error::Contract("matching bridges must have degree <= 1".into()));
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> BridgeModel {
        self.model
    }

    pub fn bridges(&self) -> &Adjacency {
        &self.bridges
    }

    #[inline]
    pub fn bridge_neighbors(&self, v: NodeId) -> &[NodeId] {
        self.bridges.neighbors(v)
    }

    pub fn bridge_count(&self) -> usize {
        self.bridges.edge_count()
    }

    pub fn degree(&self, v: NodeId) -> usize {
        2 + self.bridges.degree(v)
    }

    pub fn max_degree(&self) -> usize {
        2 + self.bridges.max_degree()
    }
}

impl Topology for SmallWorldGraph {
    fn node_count(&self) -> usize {
        self.n
    }

    fn for_each_neighbor<F: FnMut(NodeId, EdgeKind)>(&self, v: NodeId, f: F) {
        let ring = [Some(ring_prev(self.n, v)), Some(ring_next(self.n, v))];
        merge_ring_and_bridges(ring, self.bridges.neighbors(v), f);
    }
}

/// Samples SWG(n, c/n): a ring plus Erdős–Rényi bridges.
///
/// Pairs are enumerated row by row (`(0,1), (0,2), ..., (1,2), ...`) and
/// the gaps between selected pairs are geometric, so the cost is linear in
/// `n` plus the number of bridges. A selected pair that is also a ring edge
/// is not a bridge.
pub fn sample_swg_erdos<R: Rng + ?Sized>(n: usize, c: f64, rng: &mut R) -> Result<SmallWorldGraph> {
    if n < 3 {
        return Err(Error::Parameter(format!("ring needs n >= 3, got {n}")));
    }
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::Parameter(format!("c = {c} must be a non-negative real")));
    }
    let q = c / n as f64;
    if q > 1.0 {
        return Err(Error::Parameter(format!("c / n = {q} exceeds 1")));
    }
    let mut edges = Vec::new();
    if q > 0.0 {
        let total = (n as u64) * (n as u64 - 1) / 2;
        let gap = Geometric::new(q).map_err(|e| Error::Parameter(e.to_string()))?;
        // (row, offset of row start) in pair index space
        let mut row = 0usize;
        let mut row_start = 0u64;
        let mut pos: u64 = 0;
        let mut first = true;
        loop {
            let skip = gap.sample(rng);
            let next = if first { Some(skip) } else { pos.checked_add(1).and_then(|p| p.checked_add(skip)) };
            first = false;
            pos = match next {
                Some(p) if p < total => p,
                _ => break,
            };
            let mut row_len = (n - 1 - row) as u64;
            while pos >= row_start + row_len {
                row_start += row_len;
                row += 1;
                row_len = (n - 1 - row) as u64;
            }
            let v = row + 1 + (pos - row_start) as usize;
            if ring_edge_index(n, row, v).is_none() {
                edges.push((row, v));
            }
        }
    }
    SmallWorldGraph::from_bridges(n, &edges, BridgeModel::Erdos { c })
}

/// Samples 3-SWG(n): a ring plus a uniform perfect matching.
///
/// The matching pairs consecutive entries of a uniformly shuffled node
/// list. Matching edges that coincide with ring edges are dropped.
pub fn sample_swg_matching<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SmallWorldGraph> {
    let pairs = sample_perfect_matching(n, rng)?;
    let bridges: Vec<_> = pairs
        .into_iter()
        .filter(|&(u, v)| ring_edge_index(n, u, v).is_none())
        .collect();
    SmallWorldGraph::from_bridges(n, &bridges, BridgeModel::Matching)
}

/// Uniform perfect matching on `0..n` (before dropping ring edges).
pub fn sample_perfect_matching<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<(NodeId, NodeId)>> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::Parameter(format!("matching model needs even n >= 4, got {n}")));
    }
    let mut nodes: Vec<NodeId> = (0..n).collect();
    nodes.shuffle(rng);
    Ok(nodes
        .chunks_exact(2)
        .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
        .collect())
}

/// An arbitrary undirected graph with a degree bound.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericGraph {
    adjacency: Adjacency,
    max_degree: usize,
}

impl GenericGraph {
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)], max_degree: usize) -> Result<Self> {
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Parameter(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::Contract(format!("self-loop at {u}")));
            }
        }
        let adjacency = Adjacency::from_edges(n, edges);
        if adjacency.max_degree() > max_degree {
            return Err(Error::Contract(format!(
                "degree {} exceeds declared maximum {max_degree}",
                adjacency.max_degree()
            )));
        }
        Ok(GenericGraph { adjacency, max_degree })
    }

    pub fn n(&self) -> usize {
        self.adjacency.node_count()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.edge_count()
    }
}

impl Topology for GenericGraph {
    fn node_count(&self) -> usize {
        self.adjacency.node_count()
    }

    fn for_each_neighbor<F: FnMut(NodeId, EdgeKind)>(&self, v: NodeId, mut f: F) {
        for &u in self.adjacency.neighbors(v) {
            f(u, EdgeKind::Local);
        }
    }
}

/// Uniform simple `d`-regular graph by the pairing model with rejection.
pub fn sample_random_regular<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<GenericGraph> {
    if d == 0 || d >= n || (n * d) % 2 != 0 {
        return Err(Error::Parameter(format!("no simple {d}-regular graph on {n} nodes")));
    }
    const MAX_ATTEMPTS: usize = 10_000;
    let mut points: Vec<NodeId> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..MAX_ATTEMPTS {
        points.shuffle(rng);
        let mut edges = Vec::with_capacity(n * d / 2);
        for p in points.chunks_exact(2) {
            if p[0] == p[1] {
                continue 'attempt;
            }
            edges.push((p[0].min(p[1]), p[0].max(p[1])));
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        return GenericGraph::from_edges(n, &edges, d);
    }
    Err(Error::Parameter(format!(
        "pairing model produced no simple graph in {MAX_ATTEMPTS} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;

    #[test]
    fn erdos_zero_c_has_no_bridges() {
        let g = sample_swg_erdos(100, 0.0, &mut Seed::new(1).rng()).unwrap();
        assert_eq!(g.bridge_count(), 0);
    }

    #[test]
    fn erdos_rejects_bad_parameters() {
        let mut r = Seed::new(1).rng();
        assert!(sample_swg_erdos(2, 1.0, &mut r).is_err());
        assert!(sample_swg_erdos(10, 11.0, &mut r).is_err());
        assert!(sample_swg_erdos(10, -1.0, &mut r).is_err());
    }

    #[test]
    fn erdos_full_density_is_complete_minus_ring() {
        let g = sample_swg_erdos(7, 7.0, &mut Seed::new(3).rng()).unwrap();
        assert_eq!(g.bridge_count(), 7 * 6 / 2 - 7);
    }

    #[test]
    fn erdos_bridges_are_symmetric_and_simple() {
        let g = sample_swg_erdos(500, 3.0, &mut Seed::new(4).rng()).unwrap();
        for u in 0..g.n() {
            let nb = g.bridge_neighbors(u);
            assert!(nb.windows(2).all(|w| w[0] < w[1]));
            for &v in nb {
                assert_ne!(u, v);
                assert!(g.bridges().contains(v, u));
                assert!(ring_edge_index(g.n(), u, v).is_none());
            }
        }
    }

    #[test]
    fn matching_small_and_degrees() {
        let g = sample_swg_matching(4, &mut Seed::new(2).rng()).unwrap();
        for v in 0..4 {
            assert!(g.bridge_neighbors(v).len() <= 1);
        }
        let g = sample_swg_matching(1000, &mut Seed::new(2).rng()).unwrap();
        for v in 0..1000 {
            assert!(matches!(g.degree(v), 2 | 3));
        }
        assert!(sample_swg_matching(7, &mut Seed::new(2).rng()).is_err());
        assert!(sample_swg_matching(2, &mut Seed::new(2).rng()).is_err());
    }

    #[test]
    fn from_bridges_validation() {
        assert!(SmallWorldGraph::from_bridges(5, &[(0, 1)], BridgeModel::Custom).is_err());
        assert!(SmallWorldGraph::from_bridges(5, &[(2, 2)], BridgeModel::Custom).is_err());
        assert!(SmallWorldGraph::from_bridges(5, &[(0, 9)], BridgeModel::Custom).is_err());
        assert!(SmallWorldGraph::from_bridges(8, &[(0, 4), (0, 2)], BridgeModel::Matching).is_err());
        let g = SmallWorldGraph::from_bridges(5, &[(0, 3), (3, 0)], BridgeModel::Custom).unwrap();
        assert_eq!(g.bridge_count(), 1);
    }

    #[test]
    fn neighbor_order_is_ascending() {
        let g = SmallWorldGraph::from_bridges(10, &[(0, 5), (0, 3), (0, 8)], BridgeModel::Custom).unwrap();
        let nb: Vec<_> = g.neighbor_list(0).into_iter().map(|(v, _)| v).collect();
        assert_eq!(nb, vec![1, 3, 5, 8, 9]);
        let kinds: Vec<_> = g.neighbor_list(0).into_iter().map(|(_, k)| k).collect();
        assert_eq!(kinds[0], EdgeKind::Local);
        assert_eq!(kinds[1], EdgeKind::Bridge);
        assert_eq!(kinds[4], EdgeKind::Local);
    }

    #[test]
    fn random_regular_is_simple_and_regular() {
        let g = sample_random_regular(1000, 3, &mut Seed::new(8).rng()).unwrap();
        assert_eq!(g.edge_count(), 1500);
        for v in 0..1000 {
            assert_eq!(g.adjacency().degree(v), 3);
        }
        assert!(sample_random_regular(5, 3, &mut Seed::new(8).rng()).is_err());
    }
}
