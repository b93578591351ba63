//! Energy-aware job-shop scheduling with a learned solver selector.
//!
//! Instances carry per-speed processing times and energies and optional
//! release/due windows. Three solvers of different character compete on each
//! instance; a classifier over seventeen instance features learns which one
//! to run.

pub mod budget;
pub mod cli;
pub mod error;
pub mod features;
pub mod generator;
pub mod harness;
pub mod instance;
pub mod ml;
pub mod objective;
pub mod schedule;
pub mod solver;

pub use budget::{allocate_budget, BudgetPolicy, Characteristics};
pub use error::{Error, Result};
pub use features::{extract_features, FeatureVector, FEATURE_NAMES, N_FEATURES};
pub use generator::{enumerate_grid, generate_instance, BenchmarkGrid, GeneratorConfig};
pub use instance::{
    validate_instance, Distribution, Instance, RdddLevel, Time, Violation, ViolationKind, Window, Windows,
};
pub use ml::{fit, Family, LabeledDataset, ModelSpec, TrainedModel};
pub use objective::{
    normalized_objective, objective_bounds, objective_components, Components, ObjectiveBounds, ObjectiveBreakdown,
};
pub use schedule::{check_feasibility, decode_schedule, Schedule, Sequencing};
pub use solver::{solve, Budget, ClockMode, SolveOutcome, SolveStatus, SolverId};
