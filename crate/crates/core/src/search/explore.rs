use std::time::Instant;

use rand::Rng;

use super::Neighborhood;
use crate::delta::{EvaluationState, Move};

/// How an improving neighbor is selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exploration {
    /// First improving move, resuming after the last one found.
    #[default]
    FirstImprovementCyclic,
    /// Best move of the whole neighborhood, ties broken uniformly.
    BestImprovement,
    /// One uniformly drawn neighbor, improving or not.
    RandomNeighbor,
}

pub(crate) enum Outcome {
    Found(Move),
    Exhausted,
    TimedOut,
}

const DEADLINE_CHECK: u64 = 1024;

/// Neighborhood traversal with one saved cursor per neighborhood.
#[derive(Debug, Clone, Default)]
pub struct Explorer {
    move_cursor: usize,
    swap_cursor: (usize, usize),
}

impl Explorer {
    pub fn new() -> Self {
        Self {
            move_cursor: 0,
            swap_cursor: (0, 1),
        }
    }

    /// Returns an improving move (or any move for `RandomNeighbor`), or `None`
    /// when the neighborhood has none.
    pub fn explore<R: Rng + ?Sized>(
        &mut self,
        state: &EvaluationState<'_>,
        neighborhood: Neighborhood,
        strategy: Exploration,
        rng: &mut R,
    ) -> Option<Move> {
        match self.explore_until(state, neighborhood, strategy, rng, None) {
            Outcome::Found(mv) => Some(mv),
            Outcome::Exhausted | Outcome::TimedOut => None,
        }
    }

    pub(crate) fn explore_until<R: Rng + ?Sized>(
        &mut self,
        state: &EvaluationState<'_>,
        neighborhood: Neighborhood,
        strategy: Exploration,
        rng: &mut R,
        deadline: Option<Instant>,
    ) -> Outcome {
        match strategy {
            Exploration::RandomNeighbor => match random_neighbor(state, neighborhood, rng) {
                Some(mv) => Outcome::Found(mv),
                None => Outcome::Exhausted,
            },
            Exploration::FirstImprovementCyclic => match neighborhood {
                Neighborhood::MoveOrder => self.first_move(state, deadline),
                Neighborhood::SwapOrders => self.first_swap(state, deadline),
            },
            Exploration::BestImprovement => best_improvement(state, neighborhood, rng, deadline),
        }
    }

    fn first_move(&mut self, state: &EvaluationState<'_>, deadline: Option<Instant>) -> Outcome {
        let k = state.instance().num_orders();
        let n = state.instance().num_periods;
        let size = k * (n - 1);
        if size == 0 {
            return Outcome::Exhausted;
        }
        let start = self.move_cursor % size;
        for step in 0..size {
            if timed_out(step as u64, deadline) {
                return Outcome::TimedOut;
            }
            let idx = (start + step) % size;
            let mv = state.move_unchecked(idx / (n - 1), move_target(state, idx, n));
            if mv.is_improving() {
                self.move_cursor = (idx + 1) % size;
                return Outcome::Found(mv);
            }
        }
        Outcome::Exhausted
    }

    fn first_swap(&mut self, state: &EvaluationState<'_>, deadline: Option<Instant>) -> Outcome {
        let k = state.instance().num_orders();
        if k < 2 {
            return Outcome::Exhausted;
        }
        let pairs = k * (k - 1) / 2;
        let (mut a, mut b) = self.swap_cursor;
        if a >= k || b >= k || a >= b {
            (a, b) = (0, 1);
        }
        let periods = state.solution().periods();
        for step in 0..pairs {
            if timed_out(step as u64, deadline) {
                return Outcome::TimedOut;
            }
            let (i, j) = (a, b);
            (a, b) = next_pair(a, b, k);
            if periods[i] == periods[j] {
                continue;
            }
            let mv = state.swap_unchecked(i, j);
            if mv.is_improving() {
                self.swap_cursor = (a, b);
                return Outcome::Found(mv);
            }
        }
        Outcome::Exhausted
    }
}

fn timed_out(step: u64, deadline: Option<Instant>) -> bool {
    step % DEADLINE_CHECK == DEADLINE_CHECK - 1 && deadline.is_some_and(|d| Instant::now() >= d)
}

fn move_target(state: &EvaluationState<'_>, idx: usize, n: usize) -> usize {
    let current = state.solution().period(idx / (n - 1));
    let offset = idx % (n - 1);
    if offset < current {
        offset
    } else {
        offset + 1
    }
}

fn next_pair(a: usize, b: usize, k: usize) -> (usize, usize) {
    if b + 1 < k {
        (a, b + 1)
    } else if a + 2 < k {
        (a + 1, a + 2)
    } else {
        (0, 1)
    }
}

fn best_improvement<R: Rng + ?Sized>(
    state: &EvaluationState<'_>,
    neighborhood: Neighborhood,
    rng: &mut R,
    deadline: Option<Instant>,
) -> Outcome {
    let mut best: Option<Move> = None;
    let mut ties = 0u64;
    let mut consider = |mv: Move, rng: &mut R| match &best {
        Some(b) if mv.is_better_than(b) => {
            best = Some(mv);
            ties = 1;
        }
        Some(b) if mv.ties_with(b) => {
            ties += 1;
            if rng.gen_range(0..ties) == 0 {
                best = Some(mv);
            }
        }
        Some(_) => {}
        None => {
            best = Some(mv);
            ties = 1;
        }
    };

    let k = state.instance().num_orders();
    let n = state.instance().num_periods;
    let mut step = 0u64;
    match neighborhood {
        Neighborhood::MoveOrder => {
            for j in 0..k {
                for target in 0..n {
                    if target == state.solution().period(j) {
                        continue;
                    }
                    step += 1;
                    if timed_out(step, deadline) {
                        return Outcome::TimedOut;
                    }
                    consider(state.move_unchecked(j, target), rng);
                }
            }
        }
        Neighborhood::SwapOrders => {
            let periods = state.solution().periods();
            for a in 0..k {
                for b in a + 1..k {
                    if periods[a] == periods[b] {
                        continue;
                    }
                    step += 1;
                    if timed_out(step, deadline) {
                        return Outcome::TimedOut;
                    }
                    consider(state.swap_unchecked(a, b), rng);
                }
            }
        }
    }
    match best {
        Some(mv) if mv.is_improving() => Outcome::Found(mv),
        _ => Outcome::Exhausted,
    }
}

/// Uniformly random legal neighbor, `None` if the neighborhood is empty.
pub(crate) fn random_neighbor<R: Rng + ?Sized>(
    state: &EvaluationState<'_>,
    neighborhood: Neighborhood,
    rng: &mut R,
) -> Option<Move> {
    let k = state.instance().num_orders();
    let n = state.instance().num_periods;
    match neighborhood {
        Neighborhood::MoveOrder => {
            if n < 2 {
                return None;
            }
            let idx = rng.gen_range(0..k * (n - 1));
            Some(state.move_unchecked(idx / (n - 1), move_target(state, idx, n)))
        }
        Neighborhood::SwapOrders => {
            if k < 2 {
                return None;
            }
            let periods = state.solution().periods();
            let mut checked = false;
            let mut attempts = 0u32;
            loop {
                let a = rng.gen_range(0..k);
                let b = rng.gen_range(0..k - 1);
                let b = if b >= a { b + 1 } else { b };
                if periods[a] != periods[b] {
                    return Some(state.swap_unchecked(a.min(b), a.max(b)));
                }
                attempts += 1;
                if !checked && attempts >= 64 {
                    if (0..n).filter(|&p| state.period_size(p) > 0).count() < 2 {
                        return None;
                    }
                    checked = true;
                }
            }
        }
    }
}
