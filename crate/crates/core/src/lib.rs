//! Seeded simulation of hoax and fact-checking spread on a social graph
//! with normal, scholar, influencer and bot agents, plus the sweep harness
//! used to explore its parameter space.

pub mod assignment;
pub mod communities;
pub mod experiment;
pub mod graph;
pub mod model;
pub mod rng;

pub use assignment::{assign_classes, initialize_states, AgentClass, ClassAssignment, State, StateVector};
pub use communities::{fluid_communities, load_partition, save_partition, CommunityId, FluidOutcome, Partition};
pub use experiment::{
    aggregate, derive_seed, expand_grid, run_sweep, scenario_compare, ExperimentError, RunResult, ScholarChoice,
    SettingSummary, SweepOptions, SweepSpec,
};
pub use graph::{Network, NodeId};
pub use model::{run, spreading_rates, step, ClassProbs, ModelParams, Simulation, TickCounts, Trajectory};
pub use rng::SimRng;
