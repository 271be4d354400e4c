//! Critical particle swarm optimisation.
//!
//! A particle swarm whose inertia and attraction coefficients are adapted
//! every iteration from the change of a swarm diversity metric, together
//! with fixed-parameter PSO variants, random-search baselines, benchmark
//! objectives and the tooling to record and analyse runs.

pub mod analysis;
pub mod baselines;
pub mod config;
pub mod crips;
pub mod error;
pub mod experiment;
pub mod objectives;
pub mod pso;
pub mod rng;
pub mod runner;
pub mod swarm;

pub use analysis::{HistogramFit, PowerLawFit, RunSummary, RunTrace, TraceRecord};
pub use config::{Algorithm, BestUpdate, FeedbackSign, MetricKind, PsoParams, RunConfig};
pub use error::{Error, Result};
pub use objectives::{lookup_objective, Objective};
pub use rng::RngStream;
pub use runner::{run, Run};
pub use swarm::{ParticleState, SwarmState};
