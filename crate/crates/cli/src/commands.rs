use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::fs::File;
use std::io::BufReader;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde_json::json;

use percolab::analysis::{
    critical_p_bounded_degree, critical_p_swg, estimate_threshold, nonhomogeneous_root, scaling_study, Classifier,
    GraphModel, ProbeClass, SampledGraph,
};
use percolab::branching::{run_gw, OffspringLaw};
use percolab::epidemic::{percolation_reachability_law, run_seir, EpidemicConfig, Incubation, Transmission};
use percolab::graph::edgelist::{generic_to_string, read_edge_list, swg_to_string, EdgeListGraph};
use percolab::stats::{total_variation, wilson, Histogram};
use percolab::visits::{
    parallel_l_visit, plain_bfs, search_giant_erdos, search_giant_matching, sequential_l_visit,
    sequential_l_visit_matching, union_l_visit, BfsFlavor, VisitConfig, VisitTrace,
};
use percolab::{connected_components, percolate, EdgeKind, GenericGraph, Seed, SmallWorldGraph, Topology};

use crate::args::*;
use crate::output::Output;

/// A cross-field problem with the requested run.
#[derive(Debug)]
pub struct ParamError(pub String);

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParamError {}

fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(ParamError(msg.into()).into())
}

/// Whether a run finished with a result that needs a human look.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Clean,
    Ambiguous,
}

// Stream layout under the master seed.
const GRAPH_STREAM: u64 = 0;
const PERCOLATION_STREAM: u64 = 1;
const TRIAL_STREAM: u64 = 2;
const REACHABILITY_STREAM: u64 = 3;

enum Loaded {
    Swg(SmallWorldGraph),
    Generic(GenericGraph),
}

macro_rules! with_graph {
    ($g:expr, $x:ident => $body:expr) => {
        match $g {
            Loaded::Swg($x) => $body,
            Loaded::Generic($x) => $body,
        }
    };
}

impl Loaded {
    fn n(&self) -> usize {
        with_graph!(self, g => g.node_count())
    }

    fn swg(&self, what: &str) -> Result<&SmallWorldGraph> {
        match self {
            Loaded::Swg(g) => Ok(g),
            Loaded::Generic(_) => param(format!("{what} needs a small-world graph")),
        }
    }
}

fn graph_model(kind: ModelKind, c: f64, d: usize, p_local: f64) -> GraphModel {
    match kind {
        ModelKind::Swg => GraphModel::Swg { c },
        ModelKind::Matching => GraphModel::Matching,
        ModelKind::Cycle => GraphModel::Cycle,
        ModelKind::Regular => GraphModel::Regular { d },
        ModelKind::Nonhomogeneous => GraphModel::NonHomogeneous { c, p_local },
    }
}

fn sample(m: &ModelArgs, seed: Seed) -> Result<Loaded> {
    let model = graph_model(m.model, m.c, m.d, 1.0);
    let g = model.sample(m.n, &mut seed.derive(GRAPH_STREAM).rng())?;
    Ok(match g {
        SampledGraph::SmallWorld(g) => Loaded::Swg(g),
        SampledGraph::Generic(g) => Loaded::Generic(g),
    })
}

fn load(src: &GraphSource, seed: Seed) -> Result<Loaded> {
    match &src.graph {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            Ok(match read_edge_list(BufReader::new(file))? {
                EdgeListGraph::SmallWorld(g) => Loaded::Swg(g),
                EdgeListGraph::Generic(g) => Loaded::Generic(g),
            })
        }
        None => sample(&src.model, seed),
    }
}

fn check_nodes(nodes: &[usize], n: usize, what: &str) -> Result<()> {
    match nodes.iter().find(|&&v| v >= n) {
        Some(v) => param(format!("{what} node {v} out of range for n = {n}")),
        None => Ok(()),
    }
}

fn transmission(r: &Retention) -> Transmission {
    match (r.p_local, r.p_bridge) {
        (None, None) => Transmission::Uniform(r.p),
        _ => {
            let (p_local, p_bridge) = r.split();
            Transmission::Split { p_local, p_bridge }
        }
    }
}

fn edge_rows<G: Topology>(g: &G) -> Vec<String> {
    let mut rows = Vec::new();
    for u in 0..g.node_count() {
        g.for_each_neighbor(u, |v, kind| {
            if u < v {
                let k = if kind == EdgeKind::Local { "R" } else { "B" };
                rows.push(format!("{u},{v},{k}"));
            }
        });
    }
    rows
}

pub fn generate(a: &GenerateArgs, out: &mut Output) -> Result<Verdict> {
    let seed = Seed::new(out.seed());
    let g = sample(&a.model, seed)?;
    let (text, edges, bridges, max_degree) = match &g {
        Loaded::Swg(g) => (swg_to_string(g), g.n() + g.bridge_count(), g.bridge_count(), g.max_degree()),
        Loaded::Generic(g) => (generic_to_string(g), g.edge_count(), 0, g.adjacency().max_degree()),
    };
    out.write("graph.edges", &text)?;
    let row = format!("{},{edges},{bridges},{max_degree}", g.n());
    out.csv("graph.csv", "n,edges,bridges,max_degree", [row])?;
    Ok(Verdict::Clean)
}

pub fn percolate_cmd(a: &PercolateArgs, out: &mut Output) -> Result<Verdict> {
    let seed = Seed::new(out.seed());
    let g = load(&a.source, seed)?;
    let (pl, pb) = a.retention.split();
    let gp = with_graph!(&g, g => percolate(g, pl, pb, &mut seed.derive(PERCOLATION_STREAM).rng())?);
    let rows = edge_rows(&gp);
    out.note("retained_edges", json!(rows.len()));
    out.csv("retained.csv", "u,v,kind", rows)?;
    Ok(Verdict::Clean)
}

pub fn components(a: &PercolateArgs, out: &mut Output) -> Result<Verdict> {
    let seed = Seed::new(out.seed());
    let g = load(&a.source, seed)?;
    let (pl, pb) = a.retention.split();
    let gp = with_graph!(&g, g => percolate(g, pl, pb, &mut seed.derive(PERCOLATION_STREAM).rng())?);
    let comps = connected_components(&gp);
    out.note("components", json!(comps.len()));
    out.note("largest", json!(comps.first().map_or(0, |c| c.len())));
    let rows = comps
        .iter()
        .enumerate()
        .map(|(i, c)| format!("{},{},{}", i + 1, c.len(), c[0]));
    out.csv("components.csv", "rank,size,min_node", rows)?;
    Ok(Verdict::Clean)
}

pub fn visit(a: &VisitArgs, out: &mut Output) -> Result<Verdict> {
    let seed = Seed::new(out.seed());
    let g = load(&a.source, seed)?;
    let n = g.n();
    check_nodes(&a.initiators, n, "initiator")?;
    check_nodes(&a.deleted, n, "deleted")?;
    let (pl, pb) = a.retention.split();
    let gp = with_graph!(&g, g => percolate(g, pl, pb, &mut seed.derive(PERCOLATION_STREAM).rng())?);
    let cfg = VisitConfig {
        l: a.l,
        k: a.k,
        beta: a.beta,
        beta_prime: a.beta_prime,
        attempt_gamma: a.attempt_gamma,
        stop_at_linear_size: !a.no_linear_stop,
    };
    cfg.validate()?;
    let first = || -> Result<usize> {
        match a.initiators.first() {
            Some(&s) => Ok(s),
            None => param("the BFS flavors need an initiator"),
        }
    };
    let trace: VisitTrace = match a.algorithm {
        Algorithm::Sequential => sequential_l_visit(g.swg("visit")?, &gp, &a.initiators, &a.deleted, &cfg, a.cap)?,
        Algorithm::Parallel => parallel_l_visit(g.swg("visit")?, &gp, &a.initiators, &a.deleted, &cfg, a.cap)?,
        Algorithm::Union => union_l_visit(g.swg("visit")?, &gp, &a.initiators, &cfg)?,
        Algorithm::SearchErdos => search_giant_erdos(g.swg("visit")?, &gp, &cfg)?,
        Algorithm::SequentialMatching => {
            sequential_l_visit_matching(g.swg("visit")?, &gp, &a.initiators, &a.deleted, &cfg, a.cap)?
        }
        Algorithm::SearchMatching => search_giant_matching(g.swg("visit")?, &gp, &cfg)?,
        Algorithm::BfsCluster => plain_bfs(&gp, first()?, BfsFlavor::ClusterFirst, a.cap)?,
        Algorithm::BfsNeighbors => plain_bfs(&gp, first()?, BfsFlavor::Neighbors, a.cap)?,
    };
    let params = serde_json::to_value(a)?;
    out.note("terminated", json!(trace.terminated));
    out.note("reached", json!(trace.reached()));
    out.write("trace.csv", &trace.to_csv(out.seed(), &params))?;
    let sets = [("Q", &trace.final_q), ("R", &trace.final_r), ("D", &trace.final_d)];
    let rows = sets
        .iter()
        .flat_map(|(name, nodes)| nodes.iter().map(move |v| format!("{v},{name}")));
    out.csv("final_sets.csv", "node,set", rows)?;
    Ok(Verdict::Clean)
}

fn parse_incubation(s: &str) -> Result<Incubation> {
    let bad = || ParamError(format!("incubation `{s}` is not none, fixed:<h> or geometric:<q>"));
    match s.split_once(':') {
        None if s == "none" => Ok(Incubation::None),
        Some(("fixed", h)) => Ok(Incubation::Fixed(h.parse().map_err(|_| bad())?)),
        Some(("geometric", q)) => Ok(Incubation::Geometric { q: q.parse().map_err(|_| bad())? }),
        _ => Err(bad().into()),
    }
}

pub fn epidemic(a: &EpidemicArgs, out: &mut Output) -> Result<Verdict> {
    let seed = Seed::new(out.seed());
    let g = load(&a.source, seed)?;
    check_nodes(&a.initiators, g.n(), "initiator")?;
    if a.trials == 0 {
        return param("trials must be positive");
    }
    let cfg = EpidemicConfig {
        transmission: transmission(&a.retention),
        k_attempts: a.k_attempts,
        incubation: parse_incubation(&a.incubation)?,
    };
    cfg.validate()?;
    let runs = seed.derive(TRIAL_STREAM);
    let traces: Result<Vec<_>> = (0..a.trials)
        .into_par_iter()
        .map(|i| Ok(with_graph!(&g, g => run_seir(g, &a.initiators, &cfg, runs.derive(i))?)))
        .collect();
    let traces = traces?;
    out.write("trace.csv", &traces[0].to_csv(out.seed(), &cfg))?;
    let mean = traces.iter().map(|t| t.final_size() as f64).sum::<f64>() / traces.len() as f64;
    out.note("mean_final_size", json!(mean));
    let rows = traces
        .iter()
        .enumerate()
        .map(|(i, t)| format!("{i},{},{}", t.final_size(), t.stop_time));
    out.csv("runs.csv", "trial,final_size,stop_time", rows)?;
    Ok(Verdict::Clean)
}

fn parse_law(s: &str) -> Result<OffspringLaw<f64>> {
    let bad = || ParamError(format!("cannot parse offspring law `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    let num = |i: usize| -> Result<f64> { Ok(parts.get(i).ok_or_else(bad)?.parse().map_err(|_| bad())?) };
    let int = |i: usize| -> Result<u64> { Ok(parts.get(i).ok_or_else(bad)?.parse().map_err(|_| bad())?) };
    let law = match (parts[0], parts.len()) {
        ("binomial", 3) => OffspringLaw::Binomial { n: int(1)?, p: num(2)? },
        ("geometric-cutoff", 3) => OffspringLaw::GeometricCutoff {
            p: num(1)?,
            l: int(2)? as u32,
        },
        ("compound-zeta", 4) => OffspringLaw::CompoundZeta {
            n: int(1)?,
            p: num(2)?,
            c: num(3)?,
        },
        ("constant", 2) => OffspringLaw::constant(int(1)?),
        _ => return Err(bad().into()),
    };
    law.validate()?;
    Ok(law)
}

pub fn gw(a: &GwArgs, out: &mut Output) -> Result<Verdict> {
    let law = parse_law(&a.law)?;
    if a.trials == 0 {
        return param("trials must be positive");
    }
    let runs = Seed::new(out.seed()).derive(TRIAL_STREAM);
    let results: Result<Vec<_>> = (0..a.trials)
        .into_par_iter()
        .map(|i| Ok(run_gw(&law, a.b0, a.steps, &mut runs.derive(i).rng())?))
        .collect();
    let results = results?;
    let survivors = results.iter().filter(|r| r.survived()).count() as u64;
    let est = wilson(survivors, a.trials);
    out.note("survival", json!(est));
    out.note("extinction_probability", json!(law.extinction_probability()?));
    out.note("mean_offspring", json!(law.mean()?));
    let first = &results[0];
    let traj = (0..=first.trajectory.len()).map(|t| format!("{t},{}", first.population(t)));
    out.csv("trajectory.csv", "t,population", traj)?;
    let rows = results.iter().enumerate().map(|(i, r)| {
        let ext = r.extinction_time.map_or(String::new(), |t| t.to_string());
        let last = r.trajectory.last().copied().unwrap_or(r.b0);
        format!("{i},{},{ext},{},{last}", r.survived(), r.total_population)
    });
    out.csv("runs.csv", "trial,survived,extinction_time,total_population,final_population", rows)?;
    Ok(Verdict::Clean)
}

fn closed_form(model: GraphModel) -> Option<f64> {
    match model {
        GraphModel::Swg { c } => critical_p_swg(c).ok(),
        GraphModel::Matching => Some(0.5),
        GraphModel::Cycle => Some(1.0),
        GraphModel::Regular { d } => critical_p_bounded_degree(d as u32).ok(),
        GraphModel::NonHomogeneous { c, p_local } => nonhomogeneous_root(p_local, c).ok(),
    }
}

pub fn threshold(a: &ThresholdArgs, out: &mut Output) -> Result<Verdict> {
    let m = &a.model;
    let model = graph_model(m.model, m.c, m.d, a.p_local);
    let base = Classifier::default();
    let classifier = Classifier {
        theta: a.theta.unwrap_or(base.theta),
        beta: a.beta.unwrap_or(base.beta),
    };
    let est = estimate_threshold(model, m.n, a.trials, a.tol, classifier, Seed::new(out.seed()))?;
    let class = |c: ProbeClass| match c {
        ProbeClass::Subcritical => "subcritical",
        ProbeClass::Ambiguous => "ambiguous",
        ProbeClass::Supercritical => "supercritical",
    };
    let rows = est.probes.iter().enumerate().map(|(i, p)| {
        format!("{},{},{},{},{}", i + 1, p.p, p.median_max_component, p.median_fraction, class(p.class))
    });
    out.csv("probes.csv", "probe,p,median_max_component,median_fraction,class", rows)?;
    let target = closed_form(model);
    let row = format!(
        "{},{},{},{},{}",
        est.p_low,
        est.p_high,
        est.width(),
        est.ambiguous,
        target.map_or(String::new(), |t| t.to_string())
    );
    out.csv("bracket.csv", "p_low,p_high,width,ambiguous,closed_form", [row])?;
    out.note("classifier", json!(classifier));
    out.note("bracket", json!([est.p_low, est.p_high]));
    out.note("ambiguous", json!(est.ambiguous));
    Ok(if est.ambiguous { Verdict::Ambiguous } else { Verdict::Clean })
}

pub fn scaling(a: &ScalingArgs, out: &mut Output) -> Result<Verdict> {
    let model = graph_model(a.model, a.c, a.d, a.p_local);
    let rows = scaling_study(model, a.p, &a.n_list, a.trials, a.diameter_cap, Seed::new(out.seed()))?;
    let lines = rows.iter().map(|r| {
        let diam = r.median_diameter.map_or(String::new(), |d| d.to_string());
        let ln = (r.n as f64).ln();
        format!(
            "{},{},{},{},{diam},{},{}",
            r.n,
            r.trials,
            r.median_max_component,
            r.median_giant_fraction,
            r.diameter_skipped,
            r.median_max_component / ln
        )
    });
    out.csv(
        "scaling.csv",
        "n,trials,median_max_component,median_giant_fraction,median_diameter,diameter_skipped,max_over_ln_n",
        lines,
    )?;
    Ok(Verdict::Clean)
}

type Law = BTreeMap<u64, f64>;

/// Exact reachable-set and hop-level laws by enumerating every retained
/// edge subset.
fn enumerate(n: usize, edges: &[(usize, usize, f64)], sources: &[usize], levels: usize) -> (Law, Vec<Law>) {
    let mut reach = Law::new();
    let mut by_level = vec![Law::new(); levels];
    for mask in 0u64..1 << edges.len() {
        let mut prob = 1.0;
        let mut adj = vec![Vec::new(); n];
        for (i, &(u, v, p)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                prob *= p;
                adj[u].push(v);
                adj[v].push(u);
            } else {
                prob *= 1.0 - p;
            }
        }
        if prob == 0.0 {
            continue;
        }
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == usize::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        let mut sizes = vec![0u64; levels];
        let mut total = 0;
        while let Some(u) = queue.pop_front() {
            total += 1;
            if dist[u] < levels {
                sizes[dist[u]] += 1;
            }
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        *reach.entry(total).or_insert(0.0) += prob;
        for (law, s) in by_level.iter_mut().zip(sizes) {
            *law.entry(s).or_insert(0.0) += prob;
        }
    }
    (reach, by_level)
}

/// Largest edge count enumerated exactly.
const MAX_EXACT_EDGES: usize = 20;

fn level_law(h: Option<&Histogram>) -> Law {
    match h {
        Some(h) if h.total() > 0 => h.law(),
        _ => [(0, 1.0)].into(),
    }
}

pub fn equivalence(a: &EquivalenceArgs, out: &mut Output) -> Result<Verdict> {
    let seed = Seed::new(out.seed());
    let g = load(&a.source, seed)?;
    let n = g.n();
    check_nodes(&a.initiators, n, "initiator")?;
    if a.trials == 0 {
        return param("trials must be positive");
    }
    let cfg = EpidemicConfig {
        transmission: transmission(&a.retention),
        k_attempts: a.k_attempts,
        incubation: Incubation::None,
    };
    cfg.validate()?;
    let runs = seed.derive(TRIAL_STREAM);
    let rf: Result<Vec<(usize, Vec<usize>)>> = (0..a.trials)
        .into_par_iter()
        .map(|i| {
            let tr = with_graph!(&g, g => run_seir(g, &a.initiators, &cfg, runs.derive(i))?);
            let per_t = (0..=tr.stop_time).map(|t| tr.infectious_at(t)).collect();
            Ok((tr.final_size(), per_t))
        })
        .collect();
    let rf = rf?;

    // k infectious steps act like one coin with 1 - (1 - p)^k
    let hat = |p: f64| 1.0 - (1.0 - p).powi(a.k_attempts as i32);
    let (pl, pb) = a.retention.split();
    let perc = with_graph!(&g, g => percolation_reachability_law(
        g,
        &a.initiators,
        hat(pl),
        hat(pb),
        a.trials,
        seed.derive(REACHABILITY_STREAM),
    )?);

    // hop levels line up with infection steps only for single-step infections
    let levels = if a.k_attempts == 1 {
        rf.iter().map(|r| r.1.len()).max().unwrap_or(0).max(perc.levels.len())
    } else {
        0
    };
    let mut rf_levels = vec![Histogram::new(); levels];
    for (_, per_t) in &rf {
        for (t, h) in rf_levels.iter_mut().enumerate() {
            h.add(per_t.get(t).copied().unwrap_or(0) as u64);
        }
    }
    let rf_reach: Histogram = rf.iter().map(|r| r.0 as u64).collect();

    let mut edges = Vec::new();
    with_graph!(&g, g => for u in 0..n {
        g.for_each_neighbor(u, |v, kind| {
            if u < v {
                let p = if kind == EdgeKind::Local { pl } else { pb };
                edges.push((u, v, hat(p)));
            }
        });
    });
    let exact = (edges.len() <= MAX_EXACT_EDGES).then(|| enumerate(n, &edges, &a.initiators, levels));
    out.note("exact_enumeration", json!(exact.is_some()));

    let mut stats: Vec<(String, Law, Law, Option<Law>)> = vec![(
        "final_size".into(),
        rf_reach.law(),
        perc.reachable.law(),
        exact.as_ref().map(|e| e.0.clone()),
    )];
    for (t, h) in rf_levels.iter().enumerate() {
        stats.push((
            format!("level_{t}"),
            h.law(),
            level_law(perc.levels.get(t)),
            exact.as_ref().map(|e| e.1[t].clone()),
        ));
    }

    let mut worst = (0.0f64, 0.0f64);
    let mut tv_rows = Vec::new();
    let mut law_rows = Vec::new();
    for (name, rf, perc, exact) in &stats {
        let tv_p = total_variation(rf, perc);
        let tv_e = exact.as_ref().map(|e| total_variation(rf, e));
        worst.0 = worst.0.max(tv_p);
        worst.1 = worst.1.max(tv_e.unwrap_or(0.0));
        tv_rows.push(format!("{name},{tv_p},{}", tv_e.map_or(String::new(), |x| x.to_string())));
        let mut support: Vec<u64> = rf.keys().chain(perc.keys()).copied().collect();
        if let Some(e) = exact {
            support.extend(e.keys());
        }
        support.sort_unstable();
        support.dedup();
        for x in support {
            let get = |m: &Law| m.get(&x).copied().unwrap_or(0.0);
            let ex = exact.as_ref().map_or(String::new(), |e| get(e).to_string());
            law_rows.push(format!("{name},{x},{},{},{ex}", get(rf), get(perc)));
        }
    }
    out.note("max_tv_rf_percolation", json!(worst.0));
    if exact.is_some() {
        out.note("max_tv_rf_exact", json!(worst.1));
    }
    out.csv("equivalence.csv", "statistic,tv_rf_percolation,tv_rf_exact", tv_rows)?;
    out.csv("laws.csv", "statistic,value,rf,percolation,exact", law_rows)?;
    Ok(Verdict::Clean)
}
