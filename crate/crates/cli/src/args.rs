use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "percolab", version, about = "Percolation and epidemic experiments on small-world graphs")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Master seed; drawn from OS entropy when absent and echoed into the manifest.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory for CSV files and manifest.json.
    #[arg(long, global = true, default_value = "percolab-out")]
    pub out: PathBuf,

    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "PERCOLAB_JOBS")]
    pub jobs: Option<usize>,

    /// JSON object of flag values, or a manifest from an earlier run.
    /// Flags on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Bond-percolate a graph and list the retained edges.
    Percolate(PercolateArgs),
    /// Connected components of a percolated graph.
    Components(PercolateArgs),
    /// Run one exploration algorithm and export its round trace.
    Visit(VisitArgs),
    /// Reed-Frost / independent-cascade runs with optional incubation.
    Epidemic(EpidemicArgs),
    /// Galton-Watson trajectories.
    Gw(GwArgs),
    /// Bracket the percolation threshold by bisection.
    Threshold(ThresholdArgs),
    /// Largest component, giant fraction and diameter across sizes.
    Scaling(ScalingArgs),
    /// Compare outbreak laws with percolation reachability laws.
    Equivalence(EquivalenceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::Percolate(_) => "percolate",
            Command::Components(_) => "components",
            Command::Visit(_) => "visit",
            Command::Epidemic(_) => "epidemic",
            Command::Gw(_) => "gw",
            Command::Threshold(_) => "threshold",
            Command::Scaling(_) => "scaling",
            Command::Equivalence(_) => "equivalence",
        }
    }

    pub fn params(&self) -> serde_json::Value {
        let v = match self {
            Command::Generate(a) => serde_json::to_value(a),
            Command::Percolate(a) | Command::Components(a) => serde_json::to_value(a),
            Command::Visit(a) => serde_json::to_value(a),
            Command::Epidemic(a) => serde_json::to_value(a),
            Command::Gw(a) => serde_json::to_value(a),
            Command::Threshold(a) => serde_json::to_value(a),
            Command::Scaling(a) => serde_json::to_value(a),
            Command::Equivalence(a) => serde_json::to_value(a),
        };
        v.expect("argument structs serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Ring plus Erdős–Rényi bridges, edge probability c/n.
    Swg,
    /// Ring plus a uniform perfect matching.
    Matching,
    /// Bare ring.
    Cycle,
    /// Uniform d-regular graph.
    Regular,
    /// Swg with ring edges kept at --p-local; the swept p applies to bridges.
    Nonhomogeneous,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelKind::Swg)]
    pub model: ModelKind,
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    /// Mean bridge degree of the swg models.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Degree of the regular model.
    #[arg(long, default_value_t = 3)]
    pub d: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GraphSource {
    /// Read the graph from an edge-list file instead of sampling one.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Retention {
    /// Retention probability for every edge.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Ring (local) edge probability; defaults to --p.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_local: Option<f64>,
    /// Bridge probability; defaults to --p.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_bridge: Option<f64>,
}

impl Retention {
    pub fn split(&self) -> (f64, f64) {
        (self.p_local.unwrap_or(self.p), self.p_bridge.unwrap_or(self.p))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GenerateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PercolateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: GraphSource,
    #[command(flatten)]
    #[serde(flatten)]
    pub retention: Retention,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Sequential,
    Parallel,
    Union,
    SearchErdos,
    SequentialMatching,
    SearchMatching,
    BfsCluster,
    BfsNeighbors,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct VisitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: GraphSource,
    #[command(flatten)]
    #[serde(flatten)]
    pub retention: Retention,
    #[arg(long, value_enum, default_value_t = Algorithm::Sequential)]
    pub algorithm: Algorithm,
    /// Initial queue (comma separated); the BFS flavors use the first node.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub initiators: Vec<usize>,
    /// Nodes placed in the deleted set before the visit starts.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub deleted: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub l: usize,
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    #[arg(long, default_value_t = 5.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 25.0)]
    pub beta_prime: f64,
    #[arg(long, default_value_t = 0.1)]
    pub attempt_gamma: f64,
    /// Keep going after n/k nodes are reached.
    #[arg(long)]
    pub no_linear_stop: bool,
    /// Round cap; algorithm default when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct EpidemicArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: GraphSource,
    #[command(flatten)]
    #[serde(flatten)]
    pub retention: Retention,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub initiators: Vec<usize>,
    /// Steps a node stays infectious.
    #[arg(long, default_value_t = 1)]
    pub k_attempts: u32,
    /// `none`, `fixed:<h>` or `geometric:<q>`.
    #[arg(long, default_value = "none")]
    pub incubation: String,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GwArgs {
    /// `binomial:<n>:<p>`, `geometric-cutoff:<p>:<l>`, `compound-zeta:<n>:<p>:<c>` or `constant:<k>`.
    #[arg(long, default_value = "binomial:2:0.6")]
    pub law: String,
    #[arg(long, default_value_t = 1)]
    pub b0: u64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ThresholdArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Ring retention of the nonhomogeneous model.
    #[arg(long, default_value_t = 0.5)]
    pub p_local: f64,
    #[arg(long, default_value_t = 30)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
    /// Supercritical when the median giant fraction reaches theta.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Subcritical when the median largest component is at most beta ln n.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ScalingArgs {
    #[arg(long, value_enum, default_value_t = ModelKind::Swg)]
    pub model: ModelKind,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p_local: f64,
    #[arg(long, default_value_t = 0.3)]
    pub p: f64,
    #[arg(long, value_delimiter = ',', default_value = "4096,8192,16384,32768,65536")]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Skip the diameter of giants larger than this (0 never computes it).
    #[arg(long, default_value_t = 100_000)]
    pub diameter_cap: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct EquivalenceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: GraphSource,
    #[command(flatten)]
    #[serde(flatten)]
    pub retention: Retention,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub initiators: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub k_attempts: u32,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}
