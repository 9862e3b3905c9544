//! Problem data: orders, products, periods and capacity limits, plus the
//! assignment of orders to periods.
//!
//! All indices are 0-based in memory. The JSON formats in [`crate::io`] use
//! 1-based periods and products and convert at the boundary.

use std::collections::HashSet;
use std::fmt;

use crate::error::{PlpError, Result};

/// Objective weights `(a1, a2, a3)` for total leveling, per-product leveling
/// and priority inversions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub total: f64,
    pub product: f64,
    pub priority: f64,
}

impl Weights {
    pub const fn new(total: f64, product: f64, priority: f64) -> Self {
        Self {
            total,
            product,
            priority,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.total, self.product, self.priority]
    }
}

impl Default for Weights {
    fn default() -> Self {
        Self::new(1.0, 1.0, 1.0 / 3.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Order {
    pub id: u64,
    pub demand: u64,
    pub priority: u32,
    /// 0-based product index.
    pub product: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Product {
    pub name: String,
    /// Maximum volume of this product per period.
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub orders: Vec<Order>,
    pub num_periods: usize,
    pub products: Vec<Product>,
    /// Maximum overall volume per period.
    pub capacity_total: f64,
    pub weights: Weights,
}

/// Per-period targets: the mean load over all periods, overall and per product.
#[derive(Debug, Clone, PartialEq)]
pub struct Targets {
    pub total: f64,
    pub per_product: Vec<f64>,
}

impl Instance {
    pub fn num_orders(&self) -> usize {
        self.orders.len()
    }

    pub fn num_products(&self) -> usize {
        self.products.len()
    }

    pub fn total_demand(&self) -> u64 {
        self.orders.iter().map(|o| o.demand).sum()
    }

    pub fn product_demand(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.num_products()];
        for o in &self.orders {
            sums[o.product] += o.demand;
        }
        sums
    }

    /// Target loads `d*` and `d_t*`. Always derived from the current orders.
    pub fn targets(&self) -> Targets {
        let n = self.num_periods as f64;
        Targets {
            total: self.total_demand() as f64 / n,
            per_product: self
                .product_demand()
                .into_iter()
                .map(|d| d as f64 / n)
                .collect(),
        }
    }

    pub fn product_capacity(&self, product: usize) -> f64 {
        self.products[product].capacity
    }

    /// Checks that `solution` is complete and in range for this instance.
    pub fn check_solution(&self, solution: &Solution) -> Result<()> {
        if solution.len() != self.num_orders() {
            return Err(PlpError::SolutionLength {
                expected: self.num_orders(),
                got: solution.len(),
            });
        }
        if let Some((order, &period)) = solution
            .periods()
            .iter()
            .enumerate()
            .find(|(_, &p)| p >= self.num_periods)
        {
            return Err(PlpError::PeriodOutOfRange {
                order,
                period: period + 1,
                num_periods: self.num_periods,
            });
        }
        Ok(())
    }
}

/// Assignment of every order to a period, aligned with `Instance::orders`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Solution {
    assignment: Vec<usize>,
}

impl Solution {
    /// Builds a solution from 0-based period indices.
    pub fn new(assignment: Vec<usize>) -> Self {
        Self { assignment }
    }

    /// Builds a solution from 1-based period numbers; a 0 entry is an error.
    pub fn from_one_based(periods: &[usize]) -> Result<Self> {
        periods
            .iter()
            .enumerate()
            .map(|(order, &p)| {
                p.checked_sub(1).ok_or(PlpError::PeriodOutOfRange {
                    order,
                    period: 0,
                    num_periods: 0,
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.assignment.iter().map(|p| p + 1).collect()
    }

    pub fn periods(&self) -> &[usize] {
        &self.assignment
    }

    pub fn period(&self, order: usize) -> usize {
        self.assignment[order]
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub(crate) fn set(&mut self, order: usize, period: usize) {
        self.assignment[order] = period;
    }
}

/// The two objective variants: absolute deviations or squared deviations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Objective {
    #[default]
    Absolute,
    Quadratic,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Absolute => f.write_str("abs"),
            Objective::Quadratic => f.write_str("quad"),
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = PlpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abs" | "absolute" => Ok(Objective::Absolute),
            "quad" | "quadratic" => Ok(Objective::Quadratic),
            other => Err(PlpError::InvalidParameter(format!(
                "unknown objective '{other}', expected abs or quad"
            ))),
        }
    }
}

/// A violated instance invariant. Order and product numbers in messages are
/// 1-based positions, matching the file format.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    NoOrders,
    NoPeriods,
    NoProducts,
    NonPositiveCapacity { value: f64 },
    NonPositiveProductCapacity { product: usize, value: f64 },
    NegativeWeight { component: usize, value: f64 },
    ProductOutOfRange { order: usize, product: i64 },
    ZeroDemand { order: usize },
    DuplicateId { order: usize, id: u64 },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NoOrders => write!(f, "instance has no orders"),
            Diagnostic::NoPeriods => write!(f, "number of periods must be at least 1"),
            Diagnostic::NoProducts => write!(f, "instance has no products"),
            Diagnostic::NonPositiveCapacity { value } => {
                write!(f, "total capacity must be positive, got {value}")
            }
            Diagnostic::NonPositiveProductCapacity { product, value } => {
                write!(f, "capacity of product {product} must be positive, got {value}")
            }
            Diagnostic::NegativeWeight { component, value } => {
                write!(f, "weight a{component} must be non-negative, got {value}")
            }
            Diagnostic::ProductOutOfRange { order, product } => {
                write!(f, "order {order}: product index out of range ({product})")
            }
            Diagnostic::ZeroDemand { order } => {
                write!(f, "order {order}: demand must be positive")
            }
            Diagnostic::DuplicateId { order, id } => {
                write!(f, "order {order}: duplicate id {id}")
            }
        }
    }
}

/// Returns every violated invariant of `instance`; empty means well-formed.
pub fn validate_instance(instance: &Instance) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    if instance.orders.is_empty() {
        diags.push(Diagnostic::NoOrders);
    }
    if instance.num_periods == 0 {
        diags.push(Diagnostic::NoPeriods);
    }
    if instance.products.is_empty() {
        diags.push(Diagnostic::NoProducts);
    }
    if !(instance.capacity_total > 0.0) {
        diags.push(Diagnostic::NonPositiveCapacity {
            value: instance.capacity_total,
        });
    }
    for (t, p) in instance.products.iter().enumerate() {
        if !(p.capacity > 0.0) {
            diags.push(Diagnostic::NonPositiveProductCapacity {
                product: t + 1,
                value: p.capacity,
            });
        }
    }
    for (i, w) in instance.weights.as_array().into_iter().enumerate() {
        if !(w >= 0.0) {
            diags.push(Diagnostic::NegativeWeight {
                component: i + 1,
                value: w,
            });
        }
    }
    let mut seen = HashSet::with_capacity(instance.orders.len());
    for (j, o) in instance.orders.iter().enumerate() {
        if o.product >= instance.products.len() {
            diags.push(Diagnostic::ProductOutOfRange {
                order: j + 1,
                product: o.product as i64 + 1,
            });
        }
        if o.demand == 0 {
            diags.push(Diagnostic::ZeroDemand { order: j + 1 });
        }
        if !seen.insert(o.id) {
            diags.push(Diagnostic::DuplicateId {
                order: j + 1,
                id: o.id,
            });
        }
    }
    diags
}

/// Validates and returns the instance, or the collected diagnostics as an error.
pub fn ensure_valid(instance: &Instance) -> Result<()> {
    let diags = validate_instance(instance);
    if diags.is_empty() {
        Ok(())
    } else {
        Err(PlpError::InvalidInstance(diags))
    }
}
