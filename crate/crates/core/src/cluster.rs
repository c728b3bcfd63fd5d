//! Local clusters: the arcs of the ring reachable through retained ring
//! edges, their `L`-truncated versions, and the free-node predicates used
//! by the exploration procedures.

use std::collections::BTreeSet;

use crate::error::{check_probability, Error, Result};
use crate::graph::{ring_distance, ring_next, ring_prev, NodeId, PercolationGraph, SmallWorldGraph};
use crate::scalar::Scalar;

/// Number of nodes reachable from `v` to its left and right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Extent {
    pub left: usize,
    pub right: usize,
}

impl Extent {
    /// Node count, accounting for wrap-around on small rings.
    pub fn size(&self, n: usize) -> usize {
        (1 + self.left + self.right).min(n)
    }
}

/// Walks at most `limit` retained ring edges in each direction from `v`.
pub fn extent(gp: &PercolationGraph, v: NodeId, limit: usize) -> Extent {
    let n = gp.n();
    if !gp.has_ring() {
        return Extent { left: 0, right: 0 };
    }
    let limit = limit.min(n - 1);
    let mut right = 0;
    let mut cur = v;
    while right < limit && gp.ring_active(cur) {
        cur = ring_next(n, cur);
        right += 1;
    }
    let mut left = 0;
    cur = v;
    while left < limit && gp.ring_active(ring_prev(n, cur)) {
        cur = ring_prev(n, cur);
        left += 1;
    }
    Extent { left, right }
}

fn arc(n: usize, v: NodeId, e: Extent) -> Vec<NodeId> {
    if e.left + e.right + 1 >= n {
        return (0..n).collect();
    }
    let start = (v + n - e.left) % n;
    (0..=e.left + e.right).map(|i| (start + i) % n).collect()
}

/// LC(v): nodes reachable from `v` along retained ring edges, in ring order
/// from the leftmost node. Always contains `v`.
pub fn local_cluster(gp: &PercolationGraph, v: NodeId) -> Vec<NodeId> {
    arc(gp.n(), v, extent(gp, v, usize::MAX))
}

/// LC^L(v): nodes reachable using at most `l` retained ring edges in each
/// direction, in ring order from the leftmost node.
pub fn truncated_local_cluster(gp: &PercolationGraph, v: NodeId, l: usize) -> Vec<NodeId> {
    arc(gp.n(), v, extent(gp, v, l))
}

/// `|LC^L(v)|` for every node at once, in `O(n)`.
pub fn truncated_sizes(gp: &PercolationGraph, l: usize) -> Vec<usize> {
    let n = gp.n();
    let Some(mask) = gp.ring_mask() else {
        return vec![1; n];
    };
    // start the sweeps just after a missing edge so no run wraps unseen
    let Some(start) = (0..n).find(|&i| !mask.get(i)) else {
        return vec![(2 * l + 1).min(n); n];
    };
    // right extents, walking down from `start`
    let mut sizes = vec![1usize; n];
    let mut run = 0;
    for step in 0..n {
        let i = if step <= start { start - step } else { start + n - step };
        run = if mask.get(i) { (run + 1).min(l) } else { 0 };
        sizes[i] += run;
    }
    run = 0;
    for step in 1..=n {
        let i = if start + step < n { start + step } else { start + step - n };
        let edge = if i == 0 { n - 1 } else { i - 1 };
        run = if mask.get(edge) { (run + 1).min(l) } else { 0 };
        sizes[i] += run;
    }
    sizes
}

/// Expected size of LC^L on an infinite ring:
/// `(1+p)/(1-p) - 2 p^(L+1) / (1-p)`.
pub fn expected_truncated_size<T: Scalar>(p: T, l: u32) -> Result<T> {
    check_probability("p", p.as_f64())?;
    if l == 0 {
        return Err(Error::Parameter("truncation radius must be >= 1".into()));
    }
    if p >= T::one() {
        return Err(Error::Domain("expected cluster size is unbounded at p = 1".into()));
    }
    let one = T::one();
    let two = T::lit(2.0);
    Ok((one + p) / (one - p) - two * p.powi(l as i32 + 1) / (one - p))
}

/// Expected size of the untruncated local cluster on an infinite ring.
pub fn expected_cluster_size<T: Scalar>(p: T) -> Result<T> {
    check_probability("p", p.as_f64())?;
    if p >= T::one() {
        return Err(Error::Domain("expected cluster size is unbounded at p = 1".into()));
    }
    Ok((T::one() + p) / (T::one() - p))
}

/// Ring distance from `x` to the closest member of `set`, ignoring `x`
/// itself when `skip_self` is set.
pub(crate) fn nearest_distance(n: usize, set: &BTreeSet<NodeId>, x: NodeId, skip_self: bool) -> Option<usize> {
    let (succ, pred) = if skip_self {
        (
            set.range(x + 1..).next().or_else(|| set.iter().next()),
            set.range(..x).next_back().or_else(|| set.iter().next_back()),
        )
    } else {
        (
            set.range(x..).next().or_else(|| set.iter().next()),
            set.range(..=x).next_back().or_else(|| set.iter().next_back()),
        )
    };
    [succ, pred]
        .into_iter()
        .flatten()
        .filter(|&&y| !skip_self || y != x)
        .map(|&y| ring_distance(n, x, y))
        .min()
}

/// `x` is free for `set` if every member is at ring distance `>= l + 1`.
pub fn is_free(g: &SmallWorldGraph, x: NodeId, set: &BTreeSet<NodeId>, l: usize) -> bool {
    nearest_distance(g.n(), set, x, false).is_none_or(|d| d > l)
}

/// Parallel-visit freeness of `x` for the pair `(candidates, visited)`:
/// ring distance `>= l + 1` from every visited node and `>= 2l + 1` from
/// every other candidate.
pub fn is_free_parallel(
    g: &SmallWorldGraph,
    x: NodeId,
    candidates: &BTreeSet<NodeId>,
    visited: &BTreeSet<NodeId>,
    l: usize,
) -> Result<bool> {
    if !candidates.contains(&x) {
        return Err(Error::Contract(format!("node {x} is not among the candidates")));
    }
    let clear_of_visited = nearest_distance(g.n(), visited, x, false).is_none_or(|d| d > l);
    let clear_of_others = nearest_distance(g.n(), candidates, x, true).is_none_or(|d| d > 2 * l);
    Ok(clear_of_visited && clear_of_others)
}
