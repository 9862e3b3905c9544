//! Incremental evaluation of move-order and swap-orders moves.
//!
//! The state keeps per-period loads, per-period/per-product loads and a sorted
//! list of the priorities planned in every period. The priority part of a
//! move's delta only needs rank queries against those lists: moving an order
//! past a period changes its inversion status against the orders there that
//! have a strictly smaller or strictly larger priority.

use crate::error::{PlpError, Result};
use crate::model::{Instance, Objective, Solution};
use crate::objective::{self, ObjectiveBreakdown, Scales, IMPROVEMENT_EPS};

/// Full re-evaluation is forced after this many applied moves.
pub const RESYNC_INTERVAL: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    /// Move `order` to period `target`.
    MoveOrder { order: usize, target: usize },
    /// Exchange the periods of orders `a` and `b`.
    SwapOrders { a: usize, b: usize },
}

/// A candidate move together with its effect on the current solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Move {
    pub kind: MoveKind,
    pub delta_g1: f64,
    pub delta_g2: f64,
    pub delta_g3: f64,
    pub delta_inversions: i64,
    pub delta_total: f64,
    pub delta_violations: i64,
    generation: u64,
}

impl Move {
    /// Fewer violations first, then a strictly lower total.
    pub fn is_improving(&self) -> bool {
        self.delta_violations < 0 || (self.delta_violations == 0 && self.delta_total < -IMPROVEMENT_EPS)
    }

    /// True if `self` is strictly better than `other` in (violations, total) order.
    pub fn is_better_than(&self, other: &Move) -> bool {
        self.delta_violations < other.delta_violations
            || (self.delta_violations == other.delta_violations
                && self.delta_total < other.delta_total - IMPROVEMENT_EPS)
    }

    pub(crate) fn ties_with(&self, other: &Move) -> bool {
        self.delta_violations == other.delta_violations
            && (self.delta_total - other.delta_total).abs() <= IMPROVEMENT_EPS
    }

    /// Scalar change combining cost and violation count at weight 1.0 each.
    pub fn penalized_delta(&self) -> f64 {
        self.delta_total + self.delta_violations as f64
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }
}

/// Evaluation bookkeeping for one complete solution.
#[derive(Debug, Clone)]
pub struct EvaluationState<'a> {
    instance: &'a Instance,
    scales: Scales,
    solution: Solution,
    period_load: Vec<u64>,
    period_product_load: Vec<u64>,
    period_priorities: Vec<Vec<u32>>,
    inversions: u64,
    breakdown: ObjectiveBreakdown,
    generation: u64,
    applies_since_sync: u64,
}

impl<'a> EvaluationState<'a> {
    pub fn new(instance: &'a Instance, solution: Solution, objective: Objective) -> Result<Self> {
        instance.check_solution(&solution)?;
        let scales = Scales::new(instance, objective);
        let (period_load, period_product_load) = objective::loads(instance, &solution);
        let mut period_priorities = vec![Vec::new(); instance.num_periods];
        for (o, &p) in instance.orders.iter().zip(solution.periods()) {
            period_priorities[p].push(o.priority);
        }
        for list in &mut period_priorities {
            list.sort_unstable();
        }
        let inversions = objective::count_inversions(instance, &solution)?;
        let breakdown = scales.breakdown(instance, &period_load, &period_product_load, inversions);
        Ok(Self {
            instance,
            scales,
            solution,
            period_load,
            period_product_load,
            period_priorities,
            inversions,
            breakdown,
            generation: 0,
            applies_since_sync: 0,
        })
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn objective(&self) -> Objective {
        self.scales.objective
    }

    pub fn solution(&self) -> &Solution {
        &self.solution
    }

    pub fn into_solution(self) -> Solution {
        self.solution
    }

    pub fn breakdown(&self) -> ObjectiveBreakdown {
        self.breakdown
    }

    pub fn inversions(&self) -> u64 {
        self.inversions
    }

    pub fn period_load(&self) -> &[u64] {
        &self.period_load
    }

    /// Period-major `n * m` loads.
    pub fn period_product_load(&self) -> &[u64] {
        &self.period_product_load
    }

    pub fn period_priorities(&self, period: usize) -> &[u32] {
        &self.period_priorities[period]
    }

    /// Number of orders currently planned in `period`.
    pub fn period_size(&self, period: usize) -> usize {
        self.period_priorities[period].len()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    /// Delta of moving `order` to `target`.
    pub fn delta_move(&self, order: usize, target: usize) -> Result<Move> {
        if order >= self.instance.num_orders() {
            return Err(PlpError::InvalidMove(format!("order {order} does not exist")));
        }
        if target >= self.instance.num_periods {
            return Err(PlpError::InvalidMove(format!("period {target} does not exist")));
        }
        if self.solution.period(order) == target {
            return Err(PlpError::InvalidMove(format!(
                "order {order} is already in period {target}"
            )));
        }
        Ok(self.move_unchecked(order, target))
    }

    /// Delta of exchanging the periods of `a` and `b`.
    pub fn delta_swap(&self, a: usize, b: usize) -> Result<Move> {
        let k = self.instance.num_orders();
        if a >= k || b >= k {
            return Err(PlpError::InvalidMove(format!("swap ({a}, {b}) out of range")));
        }
        if self.solution.period(a) == self.solution.period(b) {
            return Err(PlpError::InvalidMove(format!(
                "orders {a} and {b} are in the same period"
            )));
        }
        Ok(self.swap_unchecked(a, b))
    }

    pub(crate) fn move_unchecked(&self, order: usize, target: usize) -> Move {
        let o = &self.instance.orders[order];
        let source = self.solution.period(order);
        let m = self.instance.num_products();
        let d = o.demand as i64;
        let s = &self.scales;

        let total_cells = [(source, -d), (target, d)];
        let (dg1, dv_total) = self.total_cells_delta(&total_cells);
        let product_cells = [(source * m + o.product, -d), (target * m + o.product, d)];
        let (dg2, dv_product) = self.product_cells_delta(&product_cells);

        let dinv = self.priority_delta(o.priority, source, target);
        let dg3 = s.pair * dinv as f64;
        Move {
            kind: MoveKind::MoveOrder { order, target },
            delta_g1: dg1,
            delta_g2: dg2,
            delta_g3: dg3,
            delta_inversions: dinv,
            delta_total: s.combine(dg1, dg2, dg3),
            delta_violations: dv_total + dv_product,
            generation: self.generation,
        }
    }

    pub(crate) fn swap_unchecked(&self, a: usize, b: usize) -> Move {
        let oa = &self.instance.orders[a];
        let ob = &self.instance.orders[b];
        let pa = self.solution.period(a);
        let pb = self.solution.period(b);
        let m = self.instance.num_products();
        let (da, db) = (oa.demand as i64, ob.demand as i64);
        let s = &self.scales;

        // Loads are evaluated at their final values directly, so the shared
        // periods are not double counted.
        let (dg1, dv_total) = self.total_cells_delta(&[(pa, db - da), (pb, da - db)]);
        let (dg2, dv_product) = if oa.product == ob.product {
            self.product_cells_delta(&[(pa * m + oa.product, db - da), (pb * m + oa.product, da - db)])
        } else {
            self.product_cells_delta(&[
                (pa * m + oa.product, -da),
                (pb * m + oa.product, da),
                (pb * m + ob.product, -db),
                (pa * m + ob.product, db),
            ])
        };

        // Each single move assumes the partner stays put; the pair (a, b) is
        // then counted wrongly by both, fix it up explicitly.
        let mut dinv = self.priority_delta(oa.priority, pa, pb) + self.priority_delta(ob.priority, pb, pa);
        let pair_inverted = |ya: usize, yb: usize| {
            (ya > yb && oa.priority > ob.priority) || (yb > ya && ob.priority > oa.priority)
        };
        dinv += pair_inverted(pb, pa) as i64 + pair_inverted(pa, pb) as i64;

        let dg3 = s.pair * dinv as f64;
        Move {
            kind: MoveKind::SwapOrders { a, b },
            delta_g1: dg1,
            delta_g2: dg2,
            delta_g3: dg3,
            delta_inversions: dinv,
            delta_total: s.combine(dg1, dg2, dg3),
            delta_violations: dv_total + dv_product,
            generation: self.generation,
        }
    }

    fn total_cells_delta(&self, cells: &[(usize, i64)]) -> (f64, i64) {
        let s = &self.scales;
        let cap = self.instance.capacity_total;
        let mut dev = 0.0;
        let mut viol = 0i64;
        for &(i, change) in cells {
            let before = self.period_load[i];
            let after = (before as i64 + change) as u64;
            dev += s.deviation(s.target, after) - s.deviation(s.target, before);
            viol += (after as f64 > cap) as i64 - (before as f64 > cap) as i64;
        }
        (s.total * dev, viol)
    }

    fn product_cells_delta(&self, cells: &[(usize, i64)]) -> (f64, i64) {
        let s = &self.scales;
        let m = self.instance.num_products();
        let mut dg2 = 0.0;
        let mut viol = 0i64;
        for &(cell, change) in cells {
            let t = cell % m;
            let cap = self.instance.product_capacity(t);
            let before = self.period_product_load[cell];
            let after = (before as i64 + change) as u64;
            let target = s.product_targets[t];
            dg2 += s.product[t] * (s.deviation(target, after) - s.deviation(target, before));
            viol += (after as f64 > cap) as i64 - (before as f64 > cap) as i64;
        }
        (dg2, viol)
    }

    /// Change in inversion count when an order of `priority` moves from
    /// `source` to `target`, all other orders fixed.
    fn priority_delta(&self, priority: u32, source: usize, target: usize) -> i64 {
        let less = |q: usize| self.period_priorities[q].partition_point(|&x| x < priority) as i64;
        let greater = |q: usize| {
            let list = &self.period_priorities[q];
            (list.len() - list.partition_point(|&x| x <= priority)) as i64
        };
        let mut delta = 0;
        if source < target {
            // The order ends up later than everything in [source, target).
            delta += less(source);
            for q in source + 1..target {
                delta += less(q) - greater(q);
            }
            delta -= greater(target);
        } else {
            delta += greater(source);
            for q in target + 1..source {
                delta += greater(q) - less(q);
            }
            delta -= less(target);
        }
        delta
    }

    /// Applies a move built against the current generation of this state.
    pub fn apply(&mut self, mv: &Move) -> Result<()> {
        if mv.generation != self.generation {
            return Err(PlpError::StaleMove {
                built: mv.generation,
                current: self.generation,
            });
        }
        match mv.kind {
            MoveKind::MoveOrder { order, target } => self.relocate(order, target),
            MoveKind::SwapOrders { a, b } => {
                let (pa, pb) = (self.solution.period(a), self.solution.period(b));
                self.relocate(a, pb);
                self.relocate(b, pa);
            }
        }
        self.inversions = (self.inversions as i64 + mv.delta_inversions) as u64;
        let b = &mut self.breakdown;
        b.g1 += mv.delta_g1;
        b.g2 += mv.delta_g2;
        b.g3 = self.scales.pair * self.inversions as f64;
        b.total = self.scales.combine(b.g1, b.g2, b.g3);
        b.violations = (b.violations as i64 + mv.delta_violations) as u64;
        self.generation += 1;
        self.applies_since_sync += 1;
        if self.applies_since_sync >= RESYNC_INTERVAL {
            self.resync();
        }
        Ok(())
    }

    fn relocate(&mut self, order: usize, target: usize) {
        let o = &self.instance.orders[order];
        let source = self.solution.period(order);
        let m = self.instance.num_products();
        self.period_load[source] -= o.demand;
        self.period_load[target] += o.demand;
        self.period_product_load[source * m + o.product] -= o.demand;
        self.period_product_load[target * m + o.product] += o.demand;

        let from = &mut self.period_priorities[source];
        let pos = from.partition_point(|&x| x < o.priority);
        from.remove(pos);
        let to = &mut self.period_priorities[target];
        let pos = to.partition_point(|&x| x < o.priority);
        to.insert(pos, o.priority);

        self.solution.set(order, target);
    }

    /// Recomputes the cached breakdown from the loads, discarding drift.
    pub fn resync(&mut self) {
        self.breakdown = self.scales.breakdown(
            self.instance,
            &self.period_load,
            &self.period_product_load,
            self.inversions,
        );
        self.applies_since_sync = 0;
    }
}
