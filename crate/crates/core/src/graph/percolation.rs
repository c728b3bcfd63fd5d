use rand::Rng;

use super::{
    merge_ring_and_bridges, ring_next, ring_prev, Adjacency, EdgeKind, GenericGraph, NodeId, RingMask,
    SmallWorldGraph, Topology,
};
use crate::error::{check_probability, Error, Result};

/// The retained-edge subgraph G_p of a percolated graph.
///
/// For a small-world base the ring survives as a bitmask and the surviving
/// bridges as an adjacency. A generic base has no ring; all of its retained
/// edges sit in the adjacency and are [`EdgeKind::Local`].
#[derive(Debug, Clone, PartialEq)]
pub struct PercolationGraph {
    n: usize,
    ring: Option<RingMask>,
    retained: Adjacency,
    retained_kind: EdgeKind,
    p_local: f64,
    p_bridge: f64,
}

impl PercolationGraph {
    /// Assembles G_p from an explicit ring mask and surviving bridge list.
    pub fn from_parts(
        g: &SmallWorldGraph,
        ring: RingMask,
        bridges: &[(NodeId, NodeId)],
        p_local: f64,
        p_bridge: f64,
    ) -> Result<Self> {
        if ring.len() != g.n() {
            return Err(Error::Contract(format!("ring mask has {} bits for n = {}", ring.len(), g.n())));
        }
        for &(u, v) in bridges {
            if u >= g.n() || v >= g.n() || !g.bridges().contains(u, v) {
                return Err(Error::Contract(format!("({u}, {v}) is not a bridge of the base graph")));
            }
        }
        Ok(PercolationGraph {
            n: g.n(),
            ring: Some(ring),
            retained: Adjacency::from_edges(g.n(), bridges),
            retained_kind: EdgeKind::Bridge,
            p_local,
            p_bridge,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p_local(&self) -> f64 {
        self.p_local
    }

    pub fn p_bridge(&self) -> f64 {
        self.p_bridge
    }

    pub fn ring_mask(&self) -> Option<&RingMask> {
        self.ring.as_ref()
    }

    pub fn has_ring(&self) -> bool {
        self.ring.is_some()
    }

    /// Whether ring edge `{i, i+1 mod n}` survived. Always false without a ring.
    #[inline]
    pub fn ring_active(&self, i: NodeId) -> bool {
        self.ring.as_ref().is_some_and(|m| m.get(i))
    }

    /// Surviving bridge neighbors (all surviving neighbors for a generic base).
    #[inline]
    pub fn bridge_neighbors(&self, v: NodeId) -> &[NodeId] {
        self.retained.neighbors(v)
    }

    pub fn retained_bridges(&self) -> &Adjacency {
        &self.retained
    }

    pub fn retained_ring_count(&self) -> usize {
        self.ring.as_ref().map_or(0, |m| m.count_ones())
    }

    pub fn edge_count(&self) -> usize {
        self.retained_ring_count() + self.retained.edge_count()
    }
}

impl Topology for PercolationGraph {
    fn node_count(&self) -> usize {
        self.n
    }

    fn for_each_neighbor<F: FnMut(NodeId, EdgeKind)>(&self, v: NodeId, mut f: F) {
        match &self.ring {
            Some(mask) => {
                let prev = ring_prev(self.n, v);
                let left = mask.get(prev).then_some(prev);
                let right = mask.get(v).then_some(ring_next(self.n, v));
                // n >= 3, so prev != next
                merge_ring_and_bridges([left, right], self.retained.neighbors(v), f);
            }
            None => {
                for &u in self.retained.neighbors(v) {
                    f(u, self.retained_kind);
                }
            }
        }
    }
}

/// Graphs that can be bond-percolated.
///
/// Each edge consumes exactly one uniform draw `U` and survives iff
/// `U < p`, in a fixed canonical order: ring edges `0..n`, then the other
/// edges `(u, v)`, `u < v`, ascending. Two calls with the same generator
/// state and probabilities `p <= p'` are therefore coupled: every edge
/// retained at `p` is also retained at `p'`.
pub trait Percolable {
    fn percolate<R: Rng + ?Sized>(&self, p_local: f64, p_bridge: f64, rng: &mut R) -> Result<PercolationGraph>;
}

impl Percolable for SmallWorldGraph {
    fn percolate<R: Rng + ?Sized>(&self, p_local: f64, p_bridge: f64, rng: &mut R) -> Result<PercolationGraph> {
        check_probability("p_local", p_local)?;
        check_probability("p_bridge", p_bridge)?;
        let n = self.n();
        let ring = RingMask::from_fn(n, |_| rng.random::<f64>() < p_local);
        let kept: Vec<_> = self
            .bridges()
            .edges()
            .filter(|_| rng.random::<f64>() < p_bridge)
            .collect();
        Ok(PercolationGraph {
            n,
            ring: Some(ring),
            retained: Adjacency::from_edges(n, &kept),
            retained_kind: EdgeKind::Bridge,
            p_local,
            p_bridge,
        })
    }
}

impl Percolable for GenericGraph {
    /// All edges are local; `p_bridge` is ignored.
    fn percolate<R: Rng + ?Sized>(&self, p_local: f64, p_bridge: f64, rng: &mut R) -> Result<PercolationGraph> {
        check_probability("p_local", p_local)?;
        let kept: Vec<_> = self
            .adjacency()
            .edges()
            .filter(|_| rng.random::<f64>() < p_local)
            .collect();
        Ok(PercolationGraph {
            n: self.n(),
            ring: None,
            retained: Adjacency::from_edges(self.n(), &kept),
            retained_kind: EdgeKind::Local,
            p_local,
            p_bridge,
        })
    }
}

pub fn percolate<G: Percolable, R: Rng + ?Sized>(
    g: &G,
    p_local: f64,
    p_bridge: f64,
    rng: &mut R,
) -> Result<PercolationGraph> {
    g.percolate(p_local, p_bridge, rng)
}
