//! Feature extraction composed with a trained classifier.

use serde::Serialize;

use crate::budget::{allocate_budget, Characteristics};
use crate::error::Result;
use crate::features::{extract_features, FeatureVector};
use crate::instance::Instance;
use crate::ml::TrainedModel;
use crate::solver::{solve, Budget, SolveOutcome, SolverId};

#[derive(Clone, Debug, Serialize)]
pub struct Selection {
    pub solver: SolverId,
    pub features: FeatureVector,
    pub outcome: Option<SolveOutcome>,
}

/// Recommends a solver for `inst` and, with `run`, executes it under `budget`
/// (the allocator's wall-clock budget when `None`).
pub fn select_and_solve(
    model: &TrainedModel,
    inst: &Instance,
    budget: Option<Budget>,
    run: bool,
    seed: u64,
) -> Result<Selection> {
    let features = extract_features(inst)?;
    let solver = model.predict(&features.to_array())?;
    let outcome = if run {
        let budget = budget.unwrap_or_else(|| Budget::wall(allocate_budget(&Characteristics::from(inst))));
        Some(solve(solver, inst, budget, seed)?)
    } else {
        None
    };
    Ok(Selection {
        solver,
        features,
        outcome,
    })
}
