use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::graph::{
    exact_diameter, sample_random_regular, sample_swg_erdos, sample_swg_matching, BridgeModel, GenericGraph,
    NodeId, Percolable, PercolationGraph, SmallWorldGraph, UnionFind,
};
use crate::rng::{RngStream, Seed};
use crate::stats::{median, wilson, Proportion};
use crate::visits::{plain_bfs, BfsFlavor};

/// Random graph families used by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GraphModel {
    /// Ring plus Erdős–Rényi bridges with edge probability `c / n`.
    Swg { c: f64 },
    /// Ring plus a uniform perfect matching.
    Matching,
    /// Bare ring.
    Cycle,
    /// Uniform simple `d`-regular graph.
    Regular { d: usize },
    /// `Swg { c }` with ring edges kept at `p_local`; the swept
    /// probability applies to bridges only.
    NonHomogeneous { c: f64, p_local: f64 },
}

impl GraphModel {
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            GraphModel::Swg { c } | GraphModel::NonHomogeneous { c, .. } if !(c > 0.0 && c.is_finite()) => {
                Err(Error::Parameter(format!("c = {c} must be positive")))
            }
            GraphModel::NonHomogeneous { p_local, .. } => check_probability("p_local", p_local),
            GraphModel::Matching if n % 2 != 0 => {
                Err(Error::Parameter(format!("matching model needs even n, got {n}")))
            }
            GraphModel::Regular { d } if d < 2 || (n * d) % 2 != 0 => {
                Err(Error::Parameter(format!("no {d}-regular graph on {n} nodes")))
            }
            _ if n < 4 => Err(Error::Parameter(format!("n = {n} is too small"))),
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<SampledGraph> {
        self.validate(n)?;
        Ok(match *self {
            GraphModel::Swg { c } | GraphModel::NonHomogeneous { c, .. } => {
                SampledGraph::SmallWorld(sample_swg_erdos(n, c, rng)?)
            }
            GraphModel::Matching => SampledGraph::SmallWorld(sample_swg_matching(n, rng)?),
            GraphModel::Cycle => SampledGraph::SmallWorld(SmallWorldGraph::from_bridges(n, &[], BridgeModel::Custom)?),
            GraphModel::Regular { d } => SampledGraph::Generic(sample_random_regular(n, d, rng)?),
        })
    }

    /// `(p_local, p_bridge)` for swept probability `p`.
    pub fn probabilities(&self, p: f64) -> (f64, f64) {
        match *self {
            GraphModel::NonHomogeneous { p_local, .. } => (p_local, p),
            _ => (p, p),
        }
    }
}

#[derive(Debug, Clone)]
pub enum SampledGraph {
    SmallWorld(SmallWorldGraph),
    Generic(GenericGraph),
}

impl SampledGraph {
    pub fn n(&self) -> usize {
        match self {
            SampledGraph::SmallWorld(g) => g.n(),
            SampledGraph::Generic(g) => g.n(),
        }
    }

    pub fn percolate<R: Rng + ?Sized>(&self, p_local: f64, p_bridge: f64, rng: &mut R) -> Result<PercolationGraph> {
        match self {
            SampledGraph::SmallWorld(g) => g.percolate(p_local, p_bridge, rng),
            SampledGraph::Generic(g) => g.percolate(p_local, p_bridge, rng),
        }
    }
}

fn union_retained(gp: &PercolationGraph) -> UnionFind {
    let n = gp.n();
    let mut uf = UnionFind::new(n);
    if let Some(mask) = gp.ring_mask() {
        for i in mask.ones() {
            uf.union(i, (i + 1) % n);
        }
    }
    for (u, v) in gp.retained_bridges().edges() {
        uf.union(u, v);
    }
    uf
}

/// Size of the largest component of `gp`.
pub fn largest_component(gp: &PercolationGraph) -> usize {
    let mut uf = union_retained(gp);
    (0..gp.n()).map(|v| uf.set_size(v)).max().unwrap_or(0)
}

/// Nodes of the largest component, ascending; ties go to the component
/// holding the smallest node id.
fn largest_component_nodes(gp: &PercolationGraph) -> Vec<NodeId> {
    let mut uf = union_retained(gp);
    let n = gp.n();
    let mut best = (0, 0);
    for v in 0..n {
        let s = uf.set_size(v);
        if s > best.0 {
            best = (s, uf.find(v));
        }
    }
    (0..n).filter(|&v| uf.find(v) == best.1).collect()
}

/// Three-way classification of a probe from the median largest component
/// `M` over the trials: supercritical if `M / n >= theta`, subcritical if
/// `M <= beta ln n`, ambiguous otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    pub theta: f64,
    pub beta: f64,
}

impl Default for Classifier {
    fn default() -> Self {
        Classifier { theta: 0.04, beta: 150.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeClass {
    Subcritical,
    Ambiguous,
    Supercritical,
}

impl Classifier {
    pub fn classify(&self, n: usize, median_max: f64) -> ProbeClass {
        if median_max / n as f64 >= self.theta {
            ProbeClass::Supercritical
        } else if median_max <= self.beta * (n as f64).ln() {
            ProbeClass::Subcritical
        } else {
            ProbeClass::Ambiguous
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub p: f64,
    pub median_max_component: f64,
    pub median_fraction: f64,
    pub class: ProbeClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub model: GraphModel,
    pub n: usize,
    pub trials_per_point: usize,
    pub tolerance: f64,
    pub classifier: Classifier,
    /// Largest probed `p` classified subcritical (0 if none).
    pub p_low: f64,
    /// Smallest probed `p` classified supercritical (1 if none).
    pub p_high: f64,
    /// Set when the bracket could not be narrowed to `tolerance` because
    /// the probes between `p_low` and `p_high` were ambiguous.
    pub ambiguous: bool,
    /// Probes in evaluation order.
    pub probes: Vec<Probe>,
}

impl ThresholdEstimate {
    pub fn width(&self) -> f64 {
        self.p_high - self.p_low
    }

    pub fn contains(&self, p: f64) -> bool {
        self.p_low <= p && p <= self.p_high
    }
}

const MAX_PROBES: usize = 60;

/// Brackets the critical probability of `model` on `n` nodes.
///
/// Trial `j` uses the graph and percolation uniforms of `seed.derive(j)` at
/// every probe, so each trial's largest component is non-decreasing in `p`
/// and the probe classes are consistent with one threshold. `p = 0` is
/// taken as subcritical and `p = 1` as supercritical without probing. The
/// search bisects the gap between the subcritical and supercritical
/// probes; once an ambiguous probe appears it bisects the gaps on either
/// side of the ambiguous window until both are within `tolerance / 4`.
pub fn estimate_threshold(
    model: GraphModel,
    n: usize,
    trials: usize,
    tolerance: f64,
    classifier: Classifier,
    seed: Seed,
) -> Result<ThresholdEstimate> {
    if n < 1000 {
        return Err(Error::Parameter(format!("n = {n} is below 1000")));
    }
    if !(tolerance >= 0.005) {
        return Err(Error::Parameter(format!("tolerance {tolerance} is below 0.005")));
    }
    if trials == 0 {
        return Err(Error::Parameter("trials must be positive".into()));
    }
    model.validate(n)?;
    let base: Result<Vec<(SampledGraph, RngStream)>> = (0..trials as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = seed.derive(j).rng();
            let g = model.sample(n, &mut rng)?;
            Ok((g, rng))
        })
        .collect();
    let base = base?;
    let probe = |p: f64| -> Result<Probe> {
        let (pl, pb) = model.probabilities(p);
        let sizes: Result<Vec<f64>> = base
            .par_iter()
            .map(|(g, rng)| {
                let gp = g.percolate(pl, pb, &mut rng.clone())?;
                Ok(largest_component(&gp) as f64)
            })
            .collect();
        let m = median(&sizes?);
        Ok(Probe {
            p,
            median_max_component: m,
            median_fraction: m / n as f64,
            class: classifier.classify(n, m),
        })
    };

    let (mut sub, mut sup) = (0.0f64, 1.0f64);
    let mut window: Option<(f64, f64)> = None;
    let mut probes = Vec::new();
    while sup - sub > tolerance && probes.len() < MAX_PROBES {
        let p = match window {
            None => 0.5 * (sub + sup),
            Some((a, b)) => {
                let (left, right) = (a - sub, sup - b);
                if left.max(right) <= 0.25 * tolerance {
                    break;
                }
                if left >= right {
                    0.5 * (sub + a)
                } else {
                    0.5 * (b + sup)
                }
            }
        };
        let pr = probe(p)?;
        probes.push(pr);
        match pr.class {
            ProbeClass::Subcritical => sub = p,
            ProbeClass::Supercritical => sup = p,
            ProbeClass::Ambiguous => {
                window = Some(window.map_or((p, p), |(a, b)| (a.min(p), b.max(p))));
            }
        }
    }
    Ok(ThresholdEstimate {
        model,
        n,
        trials_per_point: trials,
        tolerance,
        classifier,
        p_low: sub,
        p_high: sup,
        ambiguous: sup - sub > tolerance,
        probes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub trials: usize,
    pub median_max_component: f64,
    pub median_giant_fraction: f64,
    /// Median hop diameter of the largest component over the trials where
    /// it was computed.
    pub median_diameter: Option<f64>,
    /// Trials whose largest component exceeded the diameter size cap.
    pub diameter_skipped: usize,
}

/// Largest-component size and diameter across graph sizes. Size `k` of
/// `n_list`, trial `i` uses `seed.derive(k).derive(i)`.
pub fn scaling_study(
    model: GraphModel,
    p: f64,
    n_list: &[usize],
    trials: usize,
    diameter_cap: usize,
    seed: Seed,
) -> Result<Vec<ScalingRow>> {
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("n_list must be strictly ascending".into()));
    }
    if trials == 0 {
        return Err(Error::Parameter("trials must be positive".into()));
    }
    check_probability("p", p)?;
    let (pl, pb) = model.probabilities(p);
    n_list
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            model.validate(n)?;
            let size_seed = seed.derive(k as u64);
            let runs: Result<Vec<(usize, Option<usize>)>> = (0..trials as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = size_seed.derive(i).rng();
                    let g = model.sample(n, &mut rng)?;
                    let gp = g.percolate(pl, pb, &mut rng)?;
                    let giant = largest_component_nodes(&gp);
                    let diameter = if giant.len() <= diameter_cap {
                        Some(exact_diameter(&gp, &giant)?)
                    } else {
                        None
                    };
                    Ok((giant.len(), diameter))
                })
                .collect();
            let runs = runs?;
            let sizes: Vec<f64> = runs.iter().map(|r| r.0 as f64).collect();
            let diameters: Vec<f64> = runs.iter().filter_map(|r| r.1.map(|d| d as f64)).collect();
            let m = median(&sizes);
            Ok(ScalingRow {
                n,
                trials,
                median_max_component: m,
                median_giant_fraction: m / n as f64,
                median_diameter: (!diameters.is_empty()).then(|| median(&diameters)),
                diameter_skipped: trials - diameters.len(),
            })
        })
        .collect()
}

/// Fraction of trials in which a uniformly random source reaches at least
/// `n / k` nodes of a fresh percolated graph.
pub fn survival_from_single_source(
    model: GraphModel,
    p: f64,
    n: usize,
    k: usize,
    trials: u64,
    seed: Seed,
) -> Result<Proportion> {
    check_probability("p", p)?;
    model.validate(n)?;
    if trials == 0 || k == 0 {
        return Err(Error::Parameter("trials and k must be positive".into()));
    }
    let (pl, pb) = model.probabilities(p);
    let target = n.div_ceil(k);
    let hits: Result<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed.derive(i).rng();
            let g = model.sample(n, &mut rng)?;
            let gp = g.percolate(pl, pb, &mut rng)?;
            let s = rng.random_range(0..n);
            let t = plain_bfs(&gp, s, BfsFlavor::Neighbors, Some(target))?;
            Ok(t.reached() >= target)
        })
        .collect();
    let hits = hits?.into_iter().filter(|&h| h).count() as u64;
    Ok(wilson(hits, trials))
}
