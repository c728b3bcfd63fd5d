use std::collections::BTreeSet;

use super::{
    check_initiators, default_parallel_cap, default_sequential_cap, warn_large_deleted, Mark,
    RoundStats, Termination, VisitConfig, VisitState, VisitTrace,
};
use crate::cluster::{is_free_parallel, truncated_local_cluster};
use crate::graph::{NodeId, PercolationGraph, SmallWorldGraph};
use crate::{Error, Result};

fn check_pair(g: &SmallWorldGraph, gp: &PercolationGraph) -> Result<()> {
    if g.n() != gp.n() || !gp.has_ring() {
        return Err(Error::Contract(
            "percolation graph does not belong to the small-world graph".into(),
        ));
    }
    Ok(())
}

fn seed_state<'a>(
    g: &'a SmallWorldGraph,
    gp: &'a PercolationGraph,
    initiators: &[NodeId],
    deleted: &[NodeId],
    cfg: &VisitConfig,
) -> Result<VisitState<'a>> {
    cfg.validate()?;
    check_pair(g, gp)?;
    check_initiators(g.n(), initiators, deleted)?;
    let mut st = VisitState::new(g, gp, cfg.l);
    for &v in deleted {
        if st.mark[v] == Mark::Unseen {
            st.delete(v);
        }
    }
    for &v in initiators {
        if st.mark[v] == Mark::Unseen {
            st.enqueue(v);
        }
    }
    Ok(st)
}

impl VisitState<'_> {
    /// One iteration of the sequential loop: dequeue `w`, visit it, and
    /// enqueue LC^L(x) for every free retained bridge neighbor `x`.
    fn sequential_round(&mut self) {
        let Some(w) = self.dequeue() else {
            return;
        };
        self.visit(w);
        let gp = self.gp;
        for &x in gp.bridge_neighbors(w) {
            if self.is_free(x) {
                for y in truncated_local_cluster(gp, x, self.l) {
                    self.enqueue(y);
                }
            }
        }
        self.record();
    }

    /// One outer round of the parallel visit.
    fn parallel_round(&mut self) -> Result<()> {
        let gp = self.gp;
        let q_nodes = self.queued_nodes();
        let candidates: BTreeSet<NodeId> = q_nodes
            .iter()
            .flat_map(|&w| gp.bridge_neighbors(w).iter().copied())
            .collect();
        let mut free = Vec::new();
        for &x in &candidates {
            if is_free_parallel(self.g, x, &candidates, &self.occupied, self.l)? {
                free.push(x);
            }
        }
        self.queue.clear();
        for w in q_nodes {
            self.visit(w);
        }
        for x in free {
            for y in truncated_local_cluster(gp, x, self.l) {
                self.enqueue(y);
            }
        }
        self.record();
        Ok(())
    }

    fn linear_reached(&self, cfg: &VisitConfig) -> bool {
        cfg.stop_at_linear_size && self.reached() as f64 >= cfg.linear_size(self.n())
    }

    fn run_sequential(&mut self, cfg: &VisitConfig, cap: usize, until_queue: Option<f64>) -> Termination {
        let mut done = 0;
        loop {
            if self.linear_reached(cfg) {
                return Termination::ReachedLinearSize;
            }
            if self.q == 0 {
                return Termination::QueueEmpty;
            }
            if until_queue.is_some_and(|t| self.q as f64 >= t) {
                return Termination::ReachedQueueThreshold;
            }
            if done >= cap {
                return Termination::IterationCap;
            }
            self.sequential_round();
            done += 1;
        }
    }

    fn run_parallel(&mut self, cfg: &VisitConfig, cap: usize) -> Result<Termination> {
        let mut done = 0;
        loop {
            if self.linear_reached(cfg) {
                return Ok(Termination::ReachedLinearSize);
            }
            if self.q == 0 {
                return Ok(Termination::QueueEmpty);
            }
            if done >= cap {
                return Ok(Termination::IterationCap);
            }
            self.parallel_round()?;
            done += 1;
        }
    }

    /// Ends a failed bootstrap attempt: `R` joins `D` and the queue is
    /// released.
    pub(super) fn abandon_attempt(&mut self) {
        for v in 0..self.n() {
            match self.mark[v] {
                Mark::Visited => {
                    self.mark[v] = Mark::Deleted;
                    self.r -= 1;
                    self.d += 1;
                }
                Mark::Queued => {
                    self.mark[v] = Mark::Unseen;
                    self.q -= 1;
                    self.occupied.remove(&v);
                }
                _ => {}
            }
        }
        self.queue.clear();
    }

    pub(super) fn lowest_unseen(&self) -> Option<NodeId> {
        self.mark.iter().position(|&m| m == Mark::Unseen)
    }
}

/// Sequential `L`-visit from `initiators` with `deleted` nodes excluded.
/// `cap` bounds the number of rounds (default `20 n`).
pub fn sequential_l_visit(
    g: &SmallWorldGraph,
    gp: &PercolationGraph,
    initiators: &[NodeId],
    deleted: &[NodeId],
    cfg: &VisitConfig,
    cap: Option<usize>,
) -> Result<VisitTrace> {
    let mut st = seed_state(g, gp, initiators, deleted, cfg)?;
    let initial = st.stats();
    let cap = cap.unwrap_or_else(|| default_sequential_cap(g.n()));
    let term = st.run_sequential(cfg, cap, None);
    Ok(st.into_trace(initial, term, None, 0))
}

/// Parallel `L`-visit: each round expands every free bridge neighbor of
/// the current queue at once. `cap` bounds outer rounds (default
/// `20 ceil(log2 n)`).
pub fn parallel_l_visit(
    g: &SmallWorldGraph,
    gp: &PercolationGraph,
    initiators: &[NodeId],
    deleted: &[NodeId],
    cfg: &VisitConfig,
    cap: Option<usize>,
) -> Result<VisitTrace> {
    warn_large_deleted(g.n(), deleted.len());
    let mut st = seed_state(g, gp, initiators, deleted, cfg)?;
    let initial = st.stats();
    let cap = cap.unwrap_or_else(|| default_parallel_cap(g.n()));
    let term = st.run_parallel(cfg, cap)?;
    Ok(st.into_trace(initial, term, Some(0), 0))
}

/// Sequential rounds while `0 < |Q| < beta ln n`, then parallel rounds
/// until the queue empties.
pub fn union_l_visit(
    g: &SmallWorldGraph,
    gp: &PercolationGraph,
    initiators: &[NodeId],
    cfg: &VisitConfig,
) -> Result<VisitTrace> {
    let mut st = seed_state(g, gp, initiators, &[], cfg)?;
    let initial = st.stats();
    let n = g.n();
    let term = st.run_sequential(cfg, default_sequential_cap(n), Some(cfg.queue_threshold(n)));
    if term != Termination::ReachedQueueThreshold {
        return Ok(st.into_trace(initial, term, None, 0));
    }
    let switch = st.rounds.len();
    let term = st.run_parallel(cfg, default_parallel_cap(n))?;
    Ok(st.into_trace(initial, term, Some(switch), 0))
}

/// Repeated bootstraps of `beta' ln n` sequential rounds from the lowest
/// unexplored node until the queue exceeds `beta ln n` (or `n / k` nodes
/// are reached), followed by a parallel visit from that queue. Nodes of
/// failed attempts are deleted.
pub fn search_giant_erdos(g: &SmallWorldGraph, gp: &PercolationGraph, cfg: &VisitConfig) -> Result<VisitTrace> {
    cfg.validate()?;
    check_pair(g, gp)?;
    let n = g.n();
    let mut st = VisitState::new(g, gp, cfg.l);
    let initial = st.stats();
    let threshold = cfg.queue_threshold(n);
    let linear = cfg.linear_size(n);
    let rounds = cfg.bootstrap_rounds(n);
    let max_attempts = cfg.attempt_cap(n);
    let mut attempts = 0;
    loop {
        if attempts > 0 && (st.q as f64 > threshold || st.reached() as f64 > linear) {
            break;
        }
        if attempts >= max_attempts {
            return Ok(st.into_trace(initial, Termination::IterationCap, None, attempts));
        }
        st.abandon_attempt();
        let Some(s) = st.lowest_unseen() else {
            return Ok(st.into_trace(initial, Termination::IterationCap, None, attempts));
        };
        attempts += 1;
        st.enqueue(s);
        for _ in 0..rounds {
            if st.q == 0 || st.linear_reached(cfg) {
                break;
            }
            st.sequential_round();
        }
    }
    let switch = st.rounds.len();
    let term = st.run_parallel(cfg, default_parallel_cap(n))?;
    Ok(st.into_trace(initial, term, Some(switch), attempts))
}

impl RoundStats {
    /// `|Q ∪ R|`.
    pub fn reached(&self) -> usize {
        self.q + self.r
    }
}
