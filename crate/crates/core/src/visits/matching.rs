use super::{
    check_initiators, default_sequential_cap, warn_large_deleted, Mark, Termination, VisitConfig,
    VisitState, VisitTrace,
};
use crate::cluster::truncated_local_cluster;
use crate::graph::{BridgeModel, NodeId, PercolationGraph, SmallWorldGraph, Topology};
use crate::{Error, Result};

fn check_matching(g: &SmallWorldGraph, gp: &PercolationGraph) -> Result<()> {
    if g.model() != BridgeModel::Matching {
        return Err(Error::Contract("graph does not have matching bridges".into()));
    }
    if g.n() != gp.n() || !gp.has_ring() {
        return Err(Error::Contract(
            "percolation graph does not belong to the small-world graph".into(),
        ));
    }
    Ok(())
}

impl VisitState<'_> {
    /// One iteration of the matching loop. Dispatches on whether the
    /// bridge partner `x` of the dequeued node is free and whether the
    /// bridge survived percolation.
    fn matching_round(&mut self) {
        let Some(w) = self.dequeue() else {
            return;
        };
        self.visit(w);
        if let Some(&x) = self.g.bridge_neighbors(w).first() {
            let gp = self.gp;
            let retained = gp.bridge_neighbors(w).contains(&x);
            match (self.is_free(x), retained) {
                (true, true) => {
                    self.visit(x);
                    for y in truncated_local_cluster(gp, x, self.l) {
                        if y != x {
                            self.enqueue(y);
                        }
                    }
                }
                (true, false) => self.delete(x),
                (false, _) => match self.mark[x] {
                    Mark::Queued => self.visit(x),
                    Mark::Unseen => self.delete(x),
                    // already visited or deleted; the sets stay disjoint
                    Mark::Visited | Mark::Deleted => {}
                },
            }
        }
        self.record();
    }

    fn reached_with_deleted(&self) -> usize {
        self.q + self.r + self.d
    }

    fn run_matching(&mut self, cfg: &VisitConfig, cap: usize) -> Termination {
        let linear = cfg.linear_size(self.n());
        let mut done = 0;
        loop {
            if cfg.stop_at_linear_size && self.reached_with_deleted() as f64 >= linear {
                return Termination::ReachedLinearSize;
            }
            if self.q == 0 {
                return Termination::QueueEmpty;
            }
            if done >= cap {
                return Termination::IterationCap;
            }
            self.matching_round();
            done += 1;
        }
    }

    /// Deletes every unexplored ring or bridge neighbor of the visited and
    /// deleted nodes.
    fn close_deleted(&mut self) {
        let mut deleted: Vec<NodeId> = self.nodes_marked(Mark::Deleted);
        deleted.extend(self.nodes_marked(Mark::Visited));
        let g = self.g;
        for v in deleted {
            for (u, _) in g.neighbor_list(v) {
                if self.mark[u] == Mark::Unseen {
                    self.delete(u);
                }
            }
        }
    }
}

/// Sequential `L`-visit for matching bridges. The deleted set starts as
/// `D0` together with its graph neighborhood; a stop at linear size counts
/// `|Q ∪ R ∪ D|`.
pub fn sequential_l_visit_matching(
    g: &SmallWorldGraph,
    gp: &PercolationGraph,
    initiators: &[NodeId],
    deleted: &[NodeId],
    cfg: &VisitConfig,
    cap: Option<usize>,
) -> Result<VisitTrace> {
    cfg.validate()?;
    check_matching(g, gp)?;
    check_initiators(g.n(), initiators, deleted)?;
    warn_large_deleted(g.n(), deleted.len());
    let mut st = VisitState::new(g, gp, cfg.l);
    for &v in initiators {
        if st.mark[v] == Mark::Unseen {
            st.enqueue(v);
        }
    }
    for &v in deleted {
        if st.mark[v] == Mark::Unseen {
            st.delete(v);
        }
    }
    st.close_deleted();
    let initial = st.stats();
    let cap = cap.unwrap_or_else(|| default_sequential_cap(g.n()));
    let term = st.run_matching(cfg, cap);
    Ok(st.into_trace(initial, term, None, 0))
}

/// Bootstrap attempts with the matching visit, then a second sequential
/// matching visit from the surviving queue. The second phase starts with
/// the neighborhood of all explored nodes deleted.
pub fn search_giant_matching(g: &SmallWorldGraph, gp: &PercolationGraph, cfg: &VisitConfig) -> Result<VisitTrace> {
    cfg.validate()?;
    check_matching(g, gp)?;
    let n = g.n();
    let mut st = VisitState::new(g, gp, cfg.l);
    let initial = st.stats();
    let threshold = cfg.queue_threshold(n);
    let linear = cfg.linear_size(n);
    let rounds = cfg.bootstrap_rounds(n);
    let max_attempts = cfg.attempt_cap(n);
    let mut attempts = 0;
    loop {
        if attempts > 0 && (st.q as f64 > threshold || st.reached_with_deleted() as f64 > linear) {
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
            if st.q == 0 {
                break;
            }
            st.matching_round();
        }
    }
    if st.reached_with_deleted() as f64 > linear {
        return Ok(st.into_trace(initial, Termination::ReachedLinearSize, None, attempts));
    }
    let switch = st.rounds.len();
    st.close_deleted();
    let term = st.run_matching(cfg, default_sequential_cap(n));
    Ok(st.into_trace(initial, term, Some(switch), attempts))
}
