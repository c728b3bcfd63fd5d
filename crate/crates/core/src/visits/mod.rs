//! Exploration procedures over a percolated small-world graph.
//!
//! Every procedure maintains three disjoint node sets: the FIFO queue `Q`,
//! the visited set `R` and the deleted set `D`, and records their sizes
//! after each round in a [`VisitTrace`]. The `L`-visits only expand through
//! bridges into truncated local clusters around *free* bridge endpoints, so
//! what they reach is a lower bound on the true component; [`plain_bfs`]
//! explores the component exactly.

mod bfs;
mod lvisit;
mod matching;

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cluster::nearest_distance;
use crate::graph::{NodeId, PercolationGraph, SmallWorldGraph};

pub use bfs::{plain_bfs, BfsFlavor};
pub use lvisit::{parallel_l_visit, search_giant_erdos, sequential_l_visit, union_l_visit};
pub use matching::{search_giant_matching, sequential_l_visit_matching};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisitConfig {
    /// Truncation radius of local clusters.
    pub l: usize,
    /// Visits stop once `n / k` nodes are reached.
    pub k: usize,
    /// Queue threshold multiplier: `beta * ln n`.
    pub beta: f64,
    /// Rounds per bootstrap attempt: `beta_prime * ln n`.
    pub beta_prime: f64,
    /// Per-attempt success probability assumed when capping bootstrap
    /// attempts at `4 * ceil(log_{1/(1-gamma)} n)`.
    pub attempt_gamma: f64,
    /// Stop when the linear-size threshold `n / k` is reached.
    pub stop_at_linear_size: bool,
}

impl Default for VisitConfig {
    fn default() -> Self {
        VisitConfig {
            l: 10,
            k: 20,
            beta: 5.0,
            beta_prime: 25.0,
            attempt_gamma: 0.1,
            stop_at_linear_size: true,
        }
    }
}

impl VisitConfig {
    pub fn validate(&self) -> crate::Result<()> {
        let ok = self.l >= 1
            && self.k >= 1
            && self.beta > 0.0
            && self.beta_prime > 0.0
            && self.attempt_gamma > 0.0
            && self.attempt_gamma < 1.0;
        if ok {
            Ok(())
        } else {
            Err(crate::Error::Parameter(format!("invalid visit configuration {self:?}")))
        }
    }

    /// `beta * ln n`.
    pub fn queue_threshold(&self, n: usize) -> f64 {
        self.beta * (n as f64).ln()
    }

    /// Rounds per bootstrap attempt, `ceil(beta_prime * ln n)`.
    pub fn bootstrap_rounds(&self, n: usize) -> usize {
        (self.beta_prime * (n as f64).ln()).ceil() as usize
    }

    /// `n / k` as a node count threshold.
    pub fn linear_size(&self, n: usize) -> f64 {
        n as f64 / self.k as f64
    }

    pub fn attempt_cap(&self, n: usize) -> usize {
        let per = (n as f64).ln() / -(1.0 - self.attempt_gamma).ln();
        4 * per.ceil().max(1.0) as usize
    }
}

/// Default round cap for sequential visits: `20 n`.
pub fn default_sequential_cap(n: usize) -> usize {
    20 * n
}

/// Default outer-round cap for parallel visits: `20 ceil(log2 n)`.
pub fn default_parallel_cap(n: usize) -> usize {
    20 * (n as f64).log2().ceil().max(1.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundStats {
    pub q: usize,
    pub r: usize,
    pub d: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    QueueEmpty,
    ReachedLinearSize,
    ReachedQueueThreshold,
    IterationCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisitTrace {
    pub initial: RoundStats,
    /// Set sizes at the end of each round.
    pub rounds: Vec<RoundStats>,
    pub final_q: Vec<NodeId>,
    pub final_r: Vec<NodeId>,
    pub final_d: Vec<NodeId>,
    pub terminated: Termination,
    /// Index into `rounds` of the first parallel round, when a parallel
    /// phase ran.
    pub phase_switch: Option<usize>,
    /// Bootstrap attempts used by the giant-component searches.
    pub attempts: usize,
}

impl VisitTrace {
    pub fn visited_count(&self) -> usize {
        self.final_r.len()
    }

    /// `|Q ∪ R|` at the end.
    pub fn reached(&self) -> usize {
        self.final_q.len() + self.final_r.len()
    }

    /// `round,q_size,r_size,d_size` rows (round 0 is the initial state),
    /// a JSON footer line and a seed line.
    pub fn to_csv(&self, seed: u64, params: &serde_json::Value) -> String {
        let mut s = String::from("round,q_size,r_size,d_size\n");
        writeln!(s, "0,{},{},{}", self.initial.q, self.initial.r, self.initial.d).unwrap();
        for (i, r) in self.rounds.iter().enumerate() {
            writeln!(s, "{},{},{},{}", i + 1, r.q, r.r, r.d).unwrap();
        }
        let footer = serde_json::json!({
            "final_q": self.final_q.len(),
            "final_r": self.final_r.len(),
            "final_d": self.final_d.len(),
            "terminated_reason": self.terminated,
            "phase_switch": self.phase_switch,
            "attempts": self.attempts,
            "params": params,
            "seed": seed,
        });
        writeln!(s, "# footer={footer}").unwrap();
        writeln!(s, "# seed={seed}").unwrap();
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mark {
    Unseen,
    Queued,
    Visited,
    Deleted,
}

/// Shared bookkeeping for the `L`-visits.
struct VisitState<'a> {
    g: &'a SmallWorldGraph,
    gp: &'a PercolationGraph,
    l: usize,
    mark: Vec<Mark>,
    /// May hold stale entries for nodes removed from `Q` out of order.
    queue: VecDeque<NodeId>,
    q: usize,
    r: usize,
    d: usize,
    /// Q ∪ R ∪ D, for nearest-neighbor ring distance queries.
    occupied: BTreeSet<NodeId>,
    rounds: Vec<RoundStats>,
}

impl<'a> VisitState<'a> {
    fn new(g: &'a SmallWorldGraph, gp: &'a PercolationGraph, l: usize) -> Self {
        VisitState {
            g,
            gp,
            l,
            mark: vec![Mark::Unseen; g.n()],
            queue: VecDeque::new(),
            q: 0,
            r: 0,
            d: 0,
            occupied: BTreeSet::new(),
            rounds: Vec::new(),
        }
    }

    fn n(&self) -> usize {
        self.g.n()
    }

    fn stats(&self) -> RoundStats {
        RoundStats {
            q: self.q,
            r: self.r,
            d: self.d,
        }
    }

    fn record(&mut self) {
        // Q, R, D are disjoint: each node carries one mark
        debug_assert_eq!(self.occupied.len(), self.q + self.r + self.d);
        let s = self.stats();
        self.rounds.push(s);
    }

    fn enqueue(&mut self, v: NodeId) {
        debug_assert_eq!(self.mark[v], Mark::Unseen);
        self.mark[v] = Mark::Queued;
        self.queue.push_back(v);
        self.q += 1;
        self.occupied.insert(v);
    }

    fn delete(&mut self, v: NodeId) {
        debug_assert_eq!(self.mark[v], Mark::Unseen);
        self.mark[v] = Mark::Deleted;
        self.d += 1;
        self.occupied.insert(v);
    }

    /// Moves a node that is unseen or queued into `R`.
    fn visit(&mut self, v: NodeId) {
        match self.mark[v] {
            Mark::Queued => self.q -= 1,
            Mark::Unseen => {
                self.occupied.insert(v);
            }
            m => panic!("node {v} already {m:?}"),
        }
        self.mark[v] = Mark::Visited;
        self.r += 1;
    }

    fn dequeue(&mut self) -> Option<NodeId> {
        while let Some(v) = self.queue.pop_front() {
            if self.mark[v] == Mark::Queued {
                return Some(v);
            }
        }
        None
    }

    fn is_free(&self, x: NodeId) -> bool {
        nearest_distance(self.n(), &self.occupied, x, false).is_none_or(|d| d > self.l)
    }

    fn reached(&self) -> usize {
        self.q + self.r
    }

    fn queued_nodes(&self) -> Vec<NodeId> {
        let mut v: Vec<_> = self
            .queue
            .iter()
            .copied()
            .filter(|&v| self.mark[v] == Mark::Queued)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn nodes_marked(&self, m: Mark) -> Vec<NodeId> {
        (0..self.n()).filter(|&v| self.mark[v] == m).collect()
    }

    fn into_trace(
        self,
        initial: RoundStats,
        terminated: Termination,
        phase_switch: Option<usize>,
        attempts: usize,
    ) -> VisitTrace {
        let (final_q, final_r, final_d) = (
            self.queued_nodes(),
            self.nodes_marked(Mark::Visited),
            self.nodes_marked(Mark::Deleted),
        );
        debug_assert_eq!((final_q.len(), final_r.len(), final_d.len()), (self.q, self.r, self.d));
        VisitTrace {
            initial,
            final_q,
            final_r,
            final_d,
            rounds: self.rounds,
            terminated,
            phase_switch,
            attempts,
        }
    }
}

fn check_initiators(n: usize, initiators: &[NodeId], deleted: &[NodeId]) -> crate::Result<()> {
    if initiators.is_empty() {
        return Err(crate::Error::Contract("initiator set is empty".into()));
    }
    if let Some(&v) = initiators.iter().chain(deleted).find(|&&v| v >= n) {
        return Err(crate::Error::Parameter(format!("node {v} out of range")));
    }
    let d: BTreeSet<_> = deleted.iter().collect();
    if let Some(v) = initiators.iter().find(|v| d.contains(v)) {
        return Err(crate::Error::Contract(format!("node {v} is both initiator and deleted")));
    }
    Ok(())
}

/// `|D0| <= ln^4 n` is assumed by the growth analysis; larger sets are
/// accepted but flagged.
fn warn_large_deleted(n: usize, deleted: usize) {
    let bound = (n as f64).ln().powi(4);
    if deleted as f64 > bound {
        eprintln!("warning: |D0| = {deleted} exceeds ln^4 n = {bound:.0}");
    }
}
