use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::explore::Outcome;
use super::{Exploration, Explorer, Neighborhood, SearchTrace, StopReason, TraceSample};
use crate::delta::EvaluationState;
use crate::error::{PlpError, Result};
use crate::model::{Instance, Objective, Solution};
use crate::objective::evaluate;

#[derive(Debug, Clone, PartialEq)]
pub struct VndConfig {
    pub neighborhoods: Vec<Neighborhood>,
    pub exploration: Exploration,
    pub time_limit: Option<Duration>,
    pub iteration_limit: Option<u64>,
    pub objective: Objective,
    /// Only used to break ties under best improvement.
    pub seed: u64,
}

impl Default for VndConfig {
    fn default() -> Self {
        Self {
            neighborhoods: vec![Neighborhood::MoveOrder, Neighborhood::SwapOrders],
            exploration: Exploration::FirstImprovementCyclic,
            time_limit: None,
            iteration_limit: None,
            objective: Objective::Absolute,
            seed: 0,
        }
    }
}

/// Variable neighborhood descent: search neighborhood `j` for an improving
/// move; on success apply it and restart at the first neighborhood, otherwise
/// advance to the next one. Stops after the last neighborhood fails.
pub fn vnd(instance: &Instance, initial: Solution, config: &VndConfig) -> Result<SearchTrace> {
    if config.neighborhoods.is_empty() {
        return Err(PlpError::InvalidParameter("VND needs at least one neighborhood".into()));
    }
    if config.exploration == Exploration::RandomNeighbor {
        return Err(PlpError::InvalidParameter(
            "VND needs a first or best improvement exploration".into(),
        ));
    }
    let started = Instant::now();
    let deadline = config.time_limit.map(|d| started + d);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = EvaluationState::new(instance, initial, config.objective)?;
    let mut explorer = Explorer::new();
    let mut samples = vec![sample(0, &state)];

    let mut iteration = 1u64;
    let mut j = 0;
    let stop = loop {
        if j >= config.neighborhoods.len() {
            break StopReason::LocalOptimum;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break StopReason::TimeLimit;
        }
        if config.iteration_limit.is_some_and(|limit| iteration > limit) {
            break StopReason::IterationLimit;
        }
        match explorer.explore_until(&state, config.neighborhoods[j], config.exploration, &mut rng, deadline) {
            Outcome::Found(mv) => {
                state.apply(&mv)?;
                samples.push(sample(iteration, &state));
                j = 0;
            }
            Outcome::Exhausted => j += 1,
            Outcome::TimedOut => break StopReason::TimeLimit,
        }
        iteration += 1;
    };

    let best = state.into_solution();
    let breakdown = evaluate(instance, &best, config.objective)?;
    Ok(SearchTrace {
        samples,
        best,
        breakdown,
        iterations: iteration - 1,
        elapsed: started.elapsed(),
        stop,
    })
}

fn sample(iteration: u64, state: &EvaluationState<'_>) -> TraceSample {
    let b = state.breakdown();
    TraceSample {
        iteration,
        temperature: 0.0,
        current: b.total,
        best: b.total,
        violations: b.violations,
    }
}
