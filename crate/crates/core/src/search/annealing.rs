use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::explore::random_neighbor;
use super::{Neighborhood, SearchTrace, StopReason, TraceSample};
use crate::delta::EvaluationState;
use crate::error::{PlpError, Result};
use crate::model::{Instance, Objective, Solution};
use crate::objective::{evaluate, is_better, IMPROVEMENT_EPS};

const CLOCK_CHECK: u64 = 1024;

/// Simulated annealing parameters. Defaults are the tuned configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SaConfig {
    pub t_max: f64,
    pub t_min: f64,
    pub iterations_per_temperature: u64,
    pub cooling_rate: f64,
    /// Probability of drawing from the move-order neighborhood; swaps otherwise.
    pub move_probability: f64,
    pub time_limit: Option<Duration>,
    pub iteration_limit: Option<u64>,
    pub objective: Objective,
    pub seed: u64,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            t_max: 0.22,
            t_min: 0.0,
            iterations_per_temperature: 252_533,
            cooling_rate: 0.95,
            move_probability: 0.40,
            time_limit: Some(Duration::from_secs(300)),
            iteration_limit: None,
            objective: Objective::Absolute,
            seed: 0,
        }
    }
}

impl SaConfig {
    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(PlpError::InvalidParameter(msg.into()));
        if !(self.t_max > 0.0) {
            return bad("t_max must be positive");
        }
        if !(self.t_min >= 0.0) {
            return bad("t_min must be non-negative");
        }
        if self.iterations_per_temperature == 0 {
            return bad("iterations per temperature must be positive");
        }
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return bad("cooling rate must lie in (0, 1)");
        }
        if !(0.0..=1.0).contains(&self.move_probability) {
            return bad("move probability must lie in [0, 1]");
        }
        Ok(())
    }
}

/// Metropolis criterion: always accept `delta <= 0`, otherwise accept with
/// probability `exp(-delta / t)`.
pub fn metropolis_accept<R: Rng + ?Sized>(delta: f64, t: f64, rng: &mut R) -> Result<bool> {
    if !(t > 0.0) {
        return Err(PlpError::InvalidParameter(format!(
            "temperature must be positive, got {t}"
        )));
    }
    Ok(accept(delta, t, rng))
}

#[inline]
fn accept<R: Rng + ?Sized>(delta: f64, t: f64, rng: &mut R) -> bool {
    if delta <= 0.0 {
        true
    } else if t <= 0.0 {
        false
    } else {
        rng.gen::<f64>() < (-delta / t).exp()
    }
}

/// Iterations per temperature for cooling rate `alpha_2` that give the same
/// average slope as the schedule `(alpha_1, w_1)`.
pub fn equivalent_schedule(alpha_1: f64, w_1: u64, alpha_2: f64) -> Result<u64> {
    for a in [alpha_1, alpha_2] {
        if !(a > 0.0 && a < 1.0) {
            return Err(PlpError::InvalidParameter(format!(
                "cooling rate {a} outside (0, 1)"
            )));
        }
    }
    if w_1 == 0 {
        return Err(PlpError::InvalidParameter("w_1 must be at least 1".into()));
    }
    Ok((w_1 as f64 * alpha_2.ln() / alpha_1.ln()).round() as u64)
}

/// Simulated annealing with geometric cooling over the move and swap
/// neighborhoods. Returns the best solution seen, never worse than `initial`.
pub fn simulated_annealing(
    instance: &Instance,
    initial: Solution,
    config: &SaConfig,
) -> Result<SearchTrace> {
    config.validate()?;
    let started = Instant::now();
    let deadline = config.time_limit.map(|d| started + d);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = EvaluationState::new(instance, initial.clone(), config.objective)?;

    let mut best_solution = initial;
    let mut best = state.breakdown();
    // The current solution is the best one but has not been copied yet.
    let mut best_pending = false;

    let mut samples = vec![TraceSample {
        iteration: 0,
        temperature: config.t_max,
        current: best.total,
        best: best.total,
        violations: best.violations,
    }];
    let mut t = config.t_max;
    let mut iteration = 0u64;
    let stop = 'levels: loop {
        if t < config.t_min {
            break StopReason::MinTemperature;
        }
        for _ in 0..config.iterations_per_temperature {
            if config.iteration_limit.is_some_and(|limit| iteration >= limit) {
                break 'levels StopReason::IterationLimit;
            }
            if iteration % CLOCK_CHECK == 0 && deadline.is_some_and(|d| Instant::now() >= d) {
                break 'levels StopReason::TimeLimit;
            }
            iteration += 1;

            let neighborhood = if rng.gen_bool(config.move_probability) {
                Neighborhood::MoveOrder
            } else {
                Neighborhood::SwapOrders
            };
            let Some(mv) = random_neighbor(&state, neighborhood, &mut rng) else {
                continue;
            };
            if !accept(mv.penalized_delta(), t, &mut rng) {
                continue;
            }
            if best_pending {
                let cur = state.breakdown();
                let viol = (cur.violations as i64 + mv.delta_violations) as u64;
                let total = cur.total + mv.delta_total;
                if !is_better(viol, total + IMPROVEMENT_EPS, best.violations, best.total) {
                    best_solution.clone_from(state.solution());
                    best_pending = false;
                }
            }
            state.apply(&mv)?;
            let cur = state.breakdown();
            if cur.is_better_than(&best) {
                best = cur;
                best_pending = true;
            }
        }
        samples.push(TraceSample {
            iteration,
            temperature: t,
            current: state.breakdown().total,
            best: best.total,
            violations: best.violations,
        });
        t *= config.cooling_rate;
    };
    if best_pending {
        best_solution.clone_from(state.solution());
    }
    let breakdown = evaluate(instance, &best_solution, config.objective)?;
    samples.push(TraceSample {
        iteration,
        temperature: t,
        current: state.breakdown().total,
        best: best.total,
        violations: best.violations,
    });
    Ok(SearchTrace {
        samples,
        best: best_solution,
        breakdown,
        iterations: iteration,
        elapsed: started.elapsed(),
        stop,
    })
}
