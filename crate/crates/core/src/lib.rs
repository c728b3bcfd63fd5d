//! Bond percolation and epidemic spreading on one-dimensional small-world
//! graphs.
//!
//! The crate samples ring-plus-bridges graphs (Erdős–Rényi bridges or a
//! random perfect matching), percolates them, and provides the exploration
//! procedures, Galton–Watson machinery and Reed–Frost simulators needed to
//! check the percolation thresholds of these models by simulation.
//!
//! Closed-form quantities are generic over a [`Scalar`] (`f32` or `f64`);
//! the simulation layer works in `f64`, and the crate root re-exports the
//! `f64` instantiations under short aliases.

pub mod analysis;
pub mod branching;
pub mod cluster;
pub mod epidemic;
mod error;
pub mod graph;
pub mod rng;
mod scalar;
pub mod stats;
pub mod visits;

pub use error::{Error, Result};
pub use graph::{
    connected_components, percolate, sample_random_regular, sample_swg_erdos, sample_swg_matching,
    EdgeKind, GenericGraph, NodeId, PercolationGraph, SmallWorldGraph, Topology,
};
pub use rng::{RngStream, Seed};
pub use scalar::Scalar;

/// Offspring law with `f64` probabilities.
pub type OffspringLaw = branching::OffspringLaw<f64>;
/// Offspring law with `f32` probabilities.
pub type OffspringLawF32 = branching::OffspringLaw<f32>;
/// Closed-form critical point models evaluated in `f64`.
pub type Criticality = analysis::Criticality<f64>;
