//! Discrete-time SIR dynamics: Reed–Frost / independent cascade, the
//! variant where infectious nodes stay active for `k` steps, and an
//! incubation (SEIR) extension.
//!
//! All three run on one engine. At step `t` every node infectious at
//! `t - 1` tries each neighbor that was susceptible at `t - 1`, with
//! infectious nodes in ascending order and each node's neighbors in
//! ascending order. Every such pair consumes exactly one coin, even if the
//! target was already hit earlier in the same step.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::graph::{EdgeKind, NodeId, Percolable, Topology};
use crate::rng::{RngStream, Seed};
use crate::stats::Histogram;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Transmission {
    Uniform(f64),
    /// Separate probabilities for ring (local) edges and bridges.
    Split { p_local: f64, p_bridge: f64 },
    /// Per-edge probabilities keyed by `(min, max)` endpoints; absent edges
    /// never transmit.
    PerEdge(BTreeMap<(NodeId, NodeId), f64>),
}

impl Transmission {
    pub fn probability(&self, u: NodeId, v: NodeId, kind: EdgeKind) -> f64 {
        match self {
            Transmission::Uniform(p) => *p,
            Transmission::Split { p_local, p_bridge } => match kind {
                EdgeKind::Local => *p_local,
                EdgeKind::Bridge => *p_bridge,
            },
            Transmission::PerEdge(map) => map.get(&(u.min(v), u.max(v))).copied().unwrap_or(0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Transmission::Uniform(p) => check_probability("p", *p),
            Transmission::Split { p_local, p_bridge } => {
                check_probability("p_local", *p_local)?;
                check_probability("p_bridge", *p_bridge)
            }
            Transmission::PerEdge(map) => map.values().try_for_each(|&p| check_probability("p(e)", p)),
        }
    }
}

/// Steps a newly infected node spends exposed before turning infectious.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Incubation {
    None,
    Fixed(u32),
    /// Failures before the first success of a `q`-coin; mean `(1-q)/q`.
    Geometric { q: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpidemicConfig {
    pub transmission: Transmission,
    /// Consecutive steps a node stays infectious.
    pub k_attempts: u32,
    pub incubation: Incubation,
}

impl EpidemicConfig {
    pub fn reed_frost(p: f64) -> Self {
        EpidemicConfig {
            transmission: Transmission::Uniform(p),
            k_attempts: 1,
            incubation: Incubation::None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.transmission.validate()?;
        if self.k_attempts == 0 {
            return Err(Error::Parameter("k_attempts must be >= 1".into()));
        }
        if let Incubation::Geometric { q } = self.incubation {
            if !(q > 0.0 && q <= 1.0) {
                return Err(Error::Parameter(format!("incubation q = {q} not in (0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub s: usize,
    pub e: usize,
    pub i: usize,
    pub r: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpidemicTrace {
    /// Counts at `t = 0, 1, ..., stop_time`.
    pub steps: Vec<Counts>,
    /// Every node ever infected, ascending.
    pub final_recovered: Vec<NodeId>,
    /// First `t` with no exposed or infectious node.
    pub stop_time: usize,
}

impl EpidemicTrace {
    pub fn final_size(&self) -> usize {
        self.final_recovered.len()
    }

    /// `|I_t|`, zero past the stop time.
    pub fn infectious_at(&self, t: usize) -> usize {
        self.steps.get(t).map_or(0, |c| c.i)
    }

    /// `t,s,e,i,r` rows followed by a summary line and a seed line.
    pub fn to_csv(&self, seed: u64, config: &EpidemicConfig) -> String {
        let mut out = String::from("t,s,e,i,r\n");
        for (t, c) in self.steps.iter().enumerate() {
            writeln!(out, "{t},{},{},{},{}", c.s, c.e, c.i, c.r).unwrap();
        }
        let summary = serde_json::json!({
            "final_size": self.final_size(),
            "stop_time": self.stop_time,
            "config": config,
            "seed": seed,
        });
        writeln!(out, "# summary={summary}").unwrap();
        writeln!(out, "# seed={seed}").unwrap();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Susceptible,
    /// Turns infectious at the given step.
    Exposed(usize),
    /// Infectious through the given step.
    Infectious(usize),
    Recovered,
}

/// The shared engine. `coin(t, u, v, p)` decides whether `u` infects `v`
/// at step `t`; `incubation` draws exposure lengths.
pub fn run_with_coins<G, C>(
    g: &G,
    initiators: &[NodeId],
    cfg: &EpidemicConfig,
    mut coin: C,
    incubation_rng: &mut RngStream,
) -> Result<EpidemicTrace>
where
    G: Topology,
    C: FnMut(usize, NodeId, NodeId, f64) -> bool,
{
    cfg.validate()?;
    let n = g.node_count();
    if initiators.is_empty() {
        return Err(Error::Contract("initiator set is empty".into()));
    }
    if let Some(&v) = initiators.iter().find(|&&v| v >= n) {
        return Err(Error::Parameter(format!("initiator {v} out of range")));
    }
    let k = cfg.k_attempts as usize;
    let geometric = match cfg.incubation {
        Incubation::Geometric { q } => Some(Geometric::new(q).map_err(|e| Error::Parameter(e.to_string()))?),
        _ => None,
    };
    let mut incubation = || -> usize {
        match cfg.incubation {
            Incubation::None => 0,
            Incubation::Fixed(h) => h as usize,
            Incubation::Geometric { .. } => geometric.unwrap().sample(incubation_rng) as usize,
        }
    };

    let mut state = vec![State::Susceptible; n];
    // `infectious` and `exposed` hold the active nodes; both are kept
    // sorted where the draw order depends on it
    let mut infectious: Vec<NodeId> = Vec::new();
    let mut exposed: Vec<NodeId> = Vec::new();
    for &v in initiators {
        if state[v] == State::Susceptible {
            state[v] = State::Infectious(k - 1);
            infectious.push(v);
        }
    }
    infectious.sort_unstable();
    let mut ever = infectious.len();
    let mut recovered = 0;
    let counts = |inf: usize, exp: usize, ever: usize, rec: usize| Counts {
        s: n - ever,
        e: exp,
        i: inf,
        r: rec,
    };
    let mut steps = vec![counts(infectious.len(), 0, ever, 0)];
    let mut hits = Vec::new();
    let mut t = 0;
    while !infectious.is_empty() || !exposed.is_empty() {
        t += 1;
        // transmissions from I_{t-1} to S_{t-1}
        hits.clear();
        for &u in &infectious {
            g.for_each_neighbor(u, |v, kind| {
                if state[v] == State::Susceptible && coin(t, u, v, cfg.transmission.probability(u, v, kind)) {
                    hits.push(v);
                }
            });
        }
        // recoveries of nodes whose last infectious step was t - 1
        infectious.retain(|&u| match state[u] {
            State::Infectious(last) if last < t => {
                state[u] = State::Recovered;
                recovered += 1;
                false
            }
            _ => true,
        });
        // exposed nodes whose incubation ends now
        let mut activated = false;
        exposed.retain(|&u| match state[u] {
            State::Exposed(at) if at <= t => {
                state[u] = State::Infectious(at + k - 1);
                infectious.push(u);
                activated = true;
                false
            }
            _ => true,
        });
        let mut new_infectious = false;
        hits.sort_unstable();
        hits.dedup();
        for &v in &hits {
            let h = incubation();
            ever += 1;
            if h == 0 {
                state[v] = State::Infectious(t + k - 1);
                infectious.push(v);
                new_infectious = true;
            } else {
                state[v] = State::Exposed(t + h);
                exposed.push(v);
            }
        }
        if activated || new_infectious {
            infectious.sort_unstable();
        }
        let c = counts(infectious.len(), exposed.len(), ever, recovered);
        debug_assert_eq!(c.s + c.e + c.i + c.r, n);
        steps.push(c);
    }
    let final_recovered = (0..n).filter(|&v| state[v] != State::Susceptible).collect();
    Ok(EpidemicTrace {
        steps,
        final_recovered,
        stop_time: t,
    })
}

fn coin_stream(rng: &mut RngStream) -> impl FnMut(usize, NodeId, NodeId, f64) -> bool + '_ {
    move |_, _, _, p| rng.uniform() < p
}

/// Reed–Frost: one-step infectiousness, no incubation. Edge coins come
/// from `seed.rng()`.
pub fn run_rf<G: Topology>(g: &G, initiators: &[NodeId], cfg: &EpidemicConfig, seed: Seed) -> Result<EpidemicTrace> {
    if cfg.k_attempts != 1 || cfg.incubation != Incubation::None {
        return Err(Error::Contract("Reed-Frost runs need k = 1 and no incubation".into()));
    }
    run_ic_k_attempts(g, initiators, cfg, seed)
}

/// Each node stays infectious for `k` steps and retries every susceptible
/// neighbor at each of them.
pub fn run_ic_k_attempts<G: Topology>(
    g: &G,
    initiators: &[NodeId],
    cfg: &EpidemicConfig,
    seed: Seed,
) -> Result<EpidemicTrace> {
    if cfg.incubation != Incubation::None {
        return Err(Error::Contract("use run_seir for incubation".into()));
    }
    run_seir(g, initiators, cfg, seed)
}

/// General run with incubation; incubation lengths use the independent
/// stream `seed.derive(0)`.
pub fn run_seir<G: Topology>(g: &G, initiators: &[NodeId], cfg: &EpidemicConfig, seed: Seed) -> Result<EpidemicTrace> {
    let mut edges = seed.rng();
    let mut incubation = seed.derive(0).rng();
    run_with_coins(g, initiators, cfg, coin_stream(&mut edges), &mut incubation)
}

/// Hop-level sizes `|N^0|, |N^1|, ...` of a breadth-first search from
/// `initiators` in `g`.
pub fn hop_levels<G: Topology>(g: &G, initiators: &[NodeId]) -> Vec<usize> {
    let n = g.node_count();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &v in initiators {
        if dist[v] == usize::MAX {
            dist[v] = 0;
            queue.push_back(v);
        }
    }
    let mut levels = Vec::new();
    while let Some(u) = queue.pop_front() {
        let d = dist[u];
        if levels.len() <= d {
            levels.push(0);
        }
        levels[d] += 1;
        g.for_each_neighbor(u, |v, _| {
            if dist[v] == usize::MAX {
                dist[v] = d + 1;
                queue.push_back(v);
            }
        });
    }
    levels
}

/// Empirical law of the reachable-set size and of each hop-level size.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachabilityLaw {
    pub reachable: Histogram,
    /// `levels[t]` is the law of `|N^t|`; trials with fewer levels count 0.
    pub levels: Vec<Histogram>,
}

/// Percolates `g` once per trial (trial `i` uses `seed.derive(i)`) and
/// layers a breadth-first search from `initiators`.
pub fn percolation_reachability_law<G: Percolable + Sync>(
    g: &G,
    initiators: &[NodeId],
    p_local: f64,
    p_bridge: f64,
    trials: u64,
    seed: Seed,
) -> Result<ReachabilityLaw> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be positive".into()));
    }
    let runs: Result<Vec<Vec<usize>>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let gp = g.percolate(p_local, p_bridge, &mut seed.derive(i).rng())?;
            Ok(hop_levels(&gp, initiators))
        })
        .collect();
    let runs = runs?;
    let depth = runs.iter().map(Vec::len).max().unwrap_or(0);
    let mut levels = vec![Histogram::new(); depth + 1];
    let mut reachable = Histogram::new();
    for r in &runs {
        reachable.add(r.iter().sum::<usize>() as u64);
        for (t, h) in levels.iter_mut().enumerate() {
            h.add(r.get(t).copied().unwrap_or(0) as u64);
        }
    }
    Ok(ReachabilityLaw { reachable, levels })
}
