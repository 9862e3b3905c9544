//! Full (from scratch) evaluation of a solution.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{Instance, Objective, Solution};

/// Moves or solutions whose totals differ by less than this are ties.
pub const IMPROVEMENT_EPS: f64 = 1e-12;

/// Normalized objective components of one solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBreakdown {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub total: f64,
    /// Number of violated capacity inequalities (periods plus period/product cells).
    pub violations: u64,
}

impl ObjectiveBreakdown {
    /// Lexicographic (violations, total) comparison.
    pub fn is_better_than(&self, other: &ObjectiveBreakdown) -> bool {
        is_better(self.violations, self.total, other.violations, other.total)
    }
}

pub(crate) fn is_better(viol_a: u64, total_a: f64, viol_b: u64, total_b: f64) -> bool {
    viol_a < viol_b || (viol_a == viol_b && total_a < total_b - IMPROVEMENT_EPS)
}

/// Normalization factors and targets for one instance and objective variant.
#[derive(Debug, Clone)]
pub(crate) struct Scales {
    pub objective: Objective,
    pub weights: [f64; 3],
    pub target: f64,
    pub product_targets: Vec<f64>,
    pub total: f64,
    /// Zero for products without demand, which are trivially level.
    pub product: Vec<f64>,
    pub pair: f64,
}

impl Scales {
    pub fn new(instance: &Instance, objective: Objective) -> Self {
        let targets = instance.targets();
        let n = instance.num_periods as f64;
        let m = instance.num_products() as f64;
        let k = instance.num_orders() as f64;
        let norm = |t: f64| match objective {
            Objective::Absolute => t,
            Objective::Quadratic => t * t,
        };
        let total = 1.0 / (n * norm(targets.total));
        let product = targets
            .per_product
            .iter()
            .map(|&t| if t > 0.0 { 1.0 / (n * m * norm(t)) } else { 0.0 })
            .collect();
        let pair = if instance.num_orders() > 1 {
            2.0 / (k * (k - 1.0))
        } else {
            0.0
        };
        Self {
            objective,
            weights: instance.weights.as_array(),
            target: targets.total,
            product_targets: targets.per_product,
            total,
            product,
            pair,
        }
    }

    #[inline]
    pub fn deviation(&self, target: f64, load: u64) -> f64 {
        let d = target - load as f64;
        match self.objective {
            Objective::Absolute => d.abs(),
            Objective::Quadratic => d * d,
        }
    }

    #[inline]
    pub fn combine(&self, g1: f64, g2: f64, g3: f64) -> f64 {
        self.weights[0] * g1 + self.weights[1] * g2 + self.weights[2] * g3
    }

    /// Evaluates from aggregated loads. `product_loads` is period-major, `n * m`.
    pub fn breakdown(
        &self,
        instance: &Instance,
        loads: &[u64],
        product_loads: &[u64],
        inversions: u64,
    ) -> ObjectiveBreakdown {
        let m = instance.num_products();
        let g1 = self.total * loads.iter().map(|&w| self.deviation(self.target, w)).sum::<f64>();
        let mut g2 = 0.0;
        for t in 0..m {
            if self.product[t] == 0.0 {
                continue;
            }
            let dev: f64 = (0..loads.len())
                .map(|i| self.deviation(self.product_targets[t], product_loads[i * m + t]))
                .sum();
            g2 += self.product[t] * dev;
        }
        let g3 = self.pair * inversions as f64;
        let violations = count_violations(instance, loads, product_loads);
        ObjectiveBreakdown {
            g1,
            g2,
            g3,
            total: self.combine(g1, g2, g3),
            violations,
        }
    }
}

pub(crate) fn count_violations(instance: &Instance, loads: &[u64], product_loads: &[u64]) -> u64 {
    let m = instance.num_products();
    let mut violations = 0;
    for (i, &w) in loads.iter().enumerate() {
        if w as f64 > instance.capacity_total {
            violations += 1;
        }
        for t in 0..m {
            if product_loads[i * m + t] as f64 > instance.product_capacity(t) {
                violations += 1;
            }
        }
    }
    violations
}

/// Per-period loads `w_i` and period-major per-product loads `w_{i,t}`.
pub fn loads(instance: &Instance, solution: &Solution) -> (Vec<u64>, Vec<u64>) {
    let n = instance.num_periods;
    let m = instance.num_products();
    let mut loads = vec![0u64; n];
    let mut product_loads = vec![0u64; n * m];
    for (o, &p) in instance.orders.iter().zip(solution.periods()) {
        loads[p] += o.demand;
        product_loads[p * m + o.product] += o.demand;
    }
    (loads, product_loads)
}

/// Evaluates `solution` from scratch.
pub fn evaluate(
    instance: &Instance,
    solution: &Solution,
    objective: Objective,
) -> Result<ObjectiveBreakdown> {
    instance.check_solution(solution)?;
    let scales = Scales::new(instance, objective);
    let (loads, product_loads) = loads(instance, solution);
    let inversions = count_inversions_unchecked(instance, solution);
    Ok(scales.breakdown(instance, &loads, &product_loads, inversions))
}

/// Number of pairs where the higher-priority order sits in a strictly later period.
pub fn count_inversions(instance: &Instance, solution: &Solution) -> Result<u64> {
    instance.check_solution(solution)?;
    Ok(count_inversions_unchecked(instance, solution))
}

fn count_inversions_unchecked(instance: &Instance, solution: &Solution) -> u64 {
    let mut ranks: Vec<u32> = instance.orders.iter().map(|o| o.priority).collect();
    ranks.sort_unstable();
    ranks.dedup();
    let rank = |p: u32| ranks.partition_point(|&r| r < p);

    let mut by_period: Vec<usize> = (0..instance.num_orders()).collect();
    by_period.sort_by_key(|&j| solution.period(j));

    let mut tree = Fenwick::new(ranks.len());
    let mut inversions = 0u64;
    let mut start = 0;
    while start < by_period.len() {
        let period = solution.period(by_period[start]);
        let end = start
            + by_period[start..]
                .iter()
                .take_while(|&&j| solution.period(j) == period)
                .count();
        // Earlier periods holding a strictly lower priority.
        for &j in &by_period[start..end] {
            inversions += tree.prefix(rank(instance.orders[j].priority));
        }
        for &j in &by_period[start..end] {
            tree.add(rank(instance.orders[j].priority));
        }
        start = end;
    }
    inversions
}

/// `k (k - 1) / 2`, the inversion count of a fully reversed sequence.
pub fn max_inversions(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(len: usize) -> Self {
        Self {
            tree: vec![0; len + 1],
        }
    }

    fn add(&mut self, index: usize) {
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count of inserted entries with index `< end`.
    fn prefix(&self, end: usize) -> u64 {
        let mut i = end;
        let mut sum = 0;
        while i > 0 {
            sum += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        sum
    }
}
