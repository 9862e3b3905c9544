//! Randomized greedy construction of initial solutions.
//!
//! Orders are taken by decreasing priority. Periods are filled one after the
//! other with orders that fit the capacity limits and improve the leveling
//! terms; whatever is left over at the end goes to the period with the most
//! remaining total capacity, even if that violates a limit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PlpError, Result};
use crate::model::{Instance, Objective, Solution};
use crate::objective::{Scales, IMPROVEMENT_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyConfig {
    /// Pick uniformly among this many best candidates; 1 is deterministic.
    pub random_selection_size: usize,
    pub seed: u64,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self {
            random_selection_size: 1,
            seed: 0,
        }
    }
}

const UNASSIGNED: usize = usize::MAX;

/// Loads of a partially built solution.
#[derive(Debug, Clone)]
pub struct PartialAssignment<'a> {
    instance: &'a Instance,
    scales: Scales,
    assignment: Vec<usize>,
    loads: Vec<u64>,
    product_loads: Vec<u64>,
}

impl<'a> PartialAssignment<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        let n = instance.num_periods;
        Self {
            instance,
            scales: Scales::new(instance, Objective::Absolute),
            assignment: vec![UNASSIGNED; instance.num_orders()],
            loads: vec![0; n],
            product_loads: vec![0; n * instance.num_products()],
        }
    }

    pub fn is_assigned(&self, order: usize) -> bool {
        self.assignment[order] != UNASSIGNED
    }

    pub fn load(&self, period: usize) -> u64 {
        self.loads[period]
    }

    /// Whether adding `order` to `period` keeps both capacity limits.
    pub fn fits(&self, order: usize, period: usize) -> bool {
        let o = &self.instance.orders[order];
        let m = self.instance.num_products();
        (self.loads[period] + o.demand) as f64 <= self.instance.capacity_total
            && (self.product_loads[period * m + o.product] + o.demand) as f64
                <= self.instance.product_capacity(o.product)
    }

    /// Weighted change of the absolute g1 and g2 terms when `order` is added
    /// to `period`. Priorities are not part of it.
    pub fn suitable_delta(&self, order: usize, period: usize) -> f64 {
        let s = &self.scales;
        let o = &self.instance.orders[order];
        let m = self.instance.num_products();
        let w = self.loads[period];
        let wt = self.product_loads[period * m + o.product];
        let tt = s.product_targets[o.product];
        let dg1 = s.total * (s.deviation(s.target, w + o.demand) - s.deviation(s.target, w));
        let dg2 = s.product[o.product] * (s.deviation(tt, wt + o.demand) - s.deviation(tt, wt));
        s.weights[0] * dg1 + s.weights[1] * dg2
    }

    pub fn assign(&mut self, order: usize, period: usize) {
        debug_assert!(!self.is_assigned(order));
        let o = &self.instance.orders[order];
        let m = self.instance.num_products();
        self.loads[period] += o.demand;
        self.product_loads[period * m + o.product] += o.demand;
        self.assignment[order] = period;
    }

    /// Returns the solution once every order is assigned.
    pub fn into_solution(self) -> Option<Solution> {
        if self.assignment.contains(&UNASSIGNED) {
            None
        } else {
            Some(Solution::new(self.assignment))
        }
    }
}

/// Builds a complete solution with the greedy heuristic.
pub fn greedy_construct(instance: &Instance, config: &GreedyConfig) -> Result<Solution> {
    if config.random_selection_size == 0 {
        return Err(PlpError::InvalidParameter(
            "random selection size must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let k = instance.num_orders();
    let n = instance.num_periods;
    let list_size = k.div_ceil(n).max(1);

    let mut remaining: Vec<usize> = (0..k).collect();
    remaining.sort_by(|&a, &b| {
        let (oa, ob) = (&instance.orders[a], &instance.orders[b]);
        ob.priority.cmp(&oa.priority).then(oa.id.cmp(&ob.id))
    });

    let mut partial = PartialAssignment::new(instance);
    let mut suitable: Vec<(f64, usize)> = Vec::with_capacity(list_size);
    for period in 0..n {
        loop {
            suitable.clear();
            for (pos, &j) in remaining.iter().enumerate() {
                if !partial.fits(j, period) {
                    continue;
                }
                let delta = partial.suitable_delta(j, period);
                if delta < -IMPROVEMENT_EPS {
                    suitable.push((delta, pos));
                    if suitable.len() == list_size {
                        break;
                    }
                }
            }
            if suitable.is_empty() {
                break;
            }
            suitable.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let pick = if config.random_selection_size == 1 {
                0
            } else {
                rng.gen_range(0..config.random_selection_size.min(suitable.len()))
            };
            let pos = suitable[pick].1;
            partial.assign(remaining.remove(pos), period);
        }
    }

    for j in remaining {
        let period = (0..n)
            .min_by_key(|&i| partial.load(i))
            .expect("at least one period");
        partial.assign(j, period);
    }
    Ok(partial.into_solution().expect("all orders assigned"))
}
