use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{RoundStats, Termination, VisitTrace};
use crate::cluster::local_cluster;
use crate::graph::{NodeId, PercolationGraph, Topology};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BfsFlavor {
    /// Expand through retained bridges into whole local clusters.
    #[default]
    ClusterFirst,
    /// Ordinary neighbor-by-neighbor search.
    Neighbors,
}

/// Exact exploration of the component of `s` in `gp`. One node leaves the
/// queue per round; `cap` defaults to `n` rounds, which always suffices.
pub fn plain_bfs(gp: &PercolationGraph, s: NodeId, flavor: BfsFlavor, cap: Option<usize>) -> Result<VisitTrace> {
    let n = gp.n();
    if s >= n {
        return Err(Error::Parameter(format!("source {s} out of range")));
    }
    let cap = cap.unwrap_or(n);
    let mut discovered = vec![false; n];
    let mut visited = vec![false; n];
    let mut queue = VecDeque::new();
    let mut r = 0;
    let mut rounds = Vec::new();
    let mut push = |v: NodeId, queue: &mut VecDeque<NodeId>| {
        if !discovered[v] {
            discovered[v] = true;
            queue.push_back(v);
        }
    };
    match flavor {
        BfsFlavor::ClusterFirst => {
            for y in local_cluster(gp, s) {
                push(y, &mut queue);
            }
        }
        BfsFlavor::Neighbors => push(s, &mut queue),
    }
    let initial = RoundStats { q: queue.len(), r: 0, d: 0 };
    let terminated = loop {
        if queue.is_empty() {
            break Termination::QueueEmpty;
        }
        if rounds.len() >= cap {
            break Termination::IterationCap;
        }
        let w = queue.pop_front().expect("queue is nonempty");
        visited[w] = true;
        r += 1;
        match flavor {
            BfsFlavor::ClusterFirst => {
                for &x in gp.bridge_neighbors(w) {
                    if !visited[x] {
                        for y in local_cluster(gp, x) {
                            push(y, &mut queue);
                        }
                    }
                }
            }
            BfsFlavor::Neighbors => gp.for_each_neighbor(w, |x, _| push(x, &mut queue)),
        }
        rounds.push(RoundStats { q: queue.len(), r, d: 0 });
    };
    let mut final_q: Vec<NodeId> = queue.into_iter().collect();
    final_q.sort_unstable();
    Ok(VisitTrace {
        initial,
        rounds,
        final_q,
        final_r: (0..n).filter(|&v| visited[v]).collect(),
        final_d: Vec::new(),
        terminated,
        phase_switch: None,
        attempts: 0,
    })
}
