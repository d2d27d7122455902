//! Extended-neighborhood ("friends of friends") semantics on simple
//! undirected graphs.
//!
//! The crate builds the competing neighborhood sets for a focal vertex,
//! measures how far apart they are with Jaccard statistics, synthesizes
//! peer-effect data on top of them and scores linear models fitted under
//! each semantics by Gaussian log-likelihood. The [`harness`] module wires
//! everything into reproducible, seed-driven experiment sweeps.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root pick `f64`, which is what the harness uses.

pub mod dataset;
#[cfg(feature = "fetch")]
pub mod fetch;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod modelfit;
pub mod neighborhoods;
pub mod rng;
pub mod scalar;
pub mod setstats;
pub mod synth;

pub use generators::{GenerationReport, GeneratorError, GeneratorSpec, GraphModel};
pub use graph::{Graph, GraphError, LoadReport, LoadedGraph, VertexId};
pub use modelfit::{FitError, FitResult, SemanticsComparison};
pub use neighborhoods::{NeighborSet, NeighborhoodError, NeighborhoodScratch, SemanticsKind};
pub use scalar::Real;
pub use setstats::{JaccardSummary, SetStatsError};
pub use synth::{AggKind, AttributeTable, GenParams, SynthError, Treatment};

/// Jaccard summary in double precision.
pub type JaccardSummaryF64 = JaccardSummary<f64>;
/// Jaccard summary in single precision.
pub type JaccardSummaryF32 = JaccardSummary<f32>;
/// Regression fit in double precision.
pub type FitResultF64 = FitResult<f64>;
/// Regression fit in single precision.
pub type FitResultF32 = FitResult<f32>;
/// Attribute table in double precision.
pub type AttributeTableF64 = AttributeTable<f64>;
/// Attribute table in single precision.
pub type AttributeTableF32 = AttributeTable<f32>;
