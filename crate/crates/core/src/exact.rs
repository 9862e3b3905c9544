//! Ground truth for tiny instances and MIP export for external solvers.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write;

use crate::error::{PlpError, Result};
use crate::model::{Instance, Objective, Solution};
use crate::objective::{count_violations, evaluate, ObjectiveBreakdown, Scales, IMPROVEMENT_EPS};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub optimal: Solution,
    pub value: ObjectiveBreakdown,
    /// Complete assignments evaluated.
    pub explored: u64,
    /// The whole search space was covered, explicitly or by pruning.
    pub proven: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub objective: Objective,
    /// Maximum number of complete assignments to evaluate.
    pub budget: u64,
    /// Disables bound pruning and enumerates all `n^k` assignments.
    pub exhaustive: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            objective: Objective::Absolute,
            budget: DEFAULT_BUDGET,
            exhaustive: false,
        }
    }
}

struct Search<'a> {
    instance: &'a Instance,
    scales: Scales,
    exhaustive: bool,
    budget: u64,
    m: usize,
    periods: Vec<usize>,
    loads: Vec<u64>,
    product_loads: Vec<u64>,
    inversions: u64,
    best: Option<(Vec<usize>, ObjectiveBreakdown)>,
    explored: u64,
    cut_off: bool,
}

impl Search<'_> {
    fn run(&mut self, depth: usize) {
        if self.cut_off {
            return;
        }
        let k = self.instance.num_orders();
        if depth == k {
            self.leaf();
            return;
        }
        let order = &self.instance.orders[depth];
        for p in 0..self.instance.num_periods {
            let added = (0..depth)
                .filter(|&l| {
                    let other = &self.instance.orders[l];
                    let y = self.periods[l];
                    (order.priority > other.priority && p > y) || (other.priority > order.priority && y > p)
                })
                .count() as u64;
            self.periods[depth] = p;
            self.loads[p] += order.demand;
            self.product_loads[p * self.m + order.product] += order.demand;
            self.inversions += added;
            if self.exhaustive || !self.prunable() {
                self.run(depth + 1);
            }
            self.inversions -= added;
            self.loads[p] -= order.demand;
            self.product_loads[p * self.m + order.product] -= order.demand;
            if self.cut_off {
                return;
            }
        }
    }

    fn leaf(&mut self) {
        if self.explored >= self.budget {
            self.cut_off = true;
            return;
        }
        self.explored += 1;
        let value = self
            .scales
            .breakdown(self.instance, &self.loads, &self.product_loads, self.inversions);
        // Enumeration runs in lexicographic order, so ties keep the earlier vector.
        if self.best.as_ref().is_none_or(|(_, b)| value.is_better_than(b)) {
            self.best = Some((self.periods.clone(), value));
        }
    }

    /// Loads only grow and the deviations of a complete assignment sum to
    /// twice the total surplus, so current surpluses, violations and
    /// inversions bound every completion from below.
    fn prunable(&self) -> bool {
        let Some((_, best)) = &self.best else {
            return false;
        };
        let violations = count_violations(self.instance, &self.loads, &self.product_loads);
        if violations != best.violations {
            return violations > best.violations;
        }
        let s = &self.scales;
        let surplus = |target: f64, load: u64| {
            let over = load as f64 - target;
            if over <= 0.0 {
                0.0
            } else {
                match s.objective {
                    Objective::Absolute => 2.0 * over,
                    Objective::Quadratic => over * over,
                }
            }
        };
        let g1 = s.total * self.loads.iter().map(|&w| surplus(s.target, w)).sum::<f64>();
        let mut g2 = 0.0;
        for t in 0..self.m {
            if s.product[t] > 0.0 {
                g2 += s.product[t]
                    * (0..self.loads.len())
                        .map(|i| surplus(s.product_targets[t], self.product_loads[i * self.m + t]))
                        .sum::<f64>();
            }
        }
        let bound = s.combine(g1, g2, s.pair * self.inversions as f64);
        // Keep a margin over rounding so no strictly better leaf is cut.
        bound - 1e-9 >= best.total - IMPROVEMENT_EPS
    }
}

/// Lexicographic (violations, total) minimum over all assignments, ties
/// broken by the lexicographically smallest assignment vector.
///
/// The search stops after `budget` complete assignments; `proven` is false
/// in that case and the best assignment seen is returned.
pub fn solve_exact(instance: &Instance, config: &OracleConfig) -> Result<OracleResult> {
    crate::model::ensure_valid(instance)?;
    if config.budget == 0 {
        return Err(PlpError::InvalidParameter("oracle budget must be at least 1".into()));
    }
    let n = instance.num_periods;
    let m = instance.num_products();
    let k = instance.num_orders();
    let mut search = Search {
        instance,
        scales: Scales::new(instance, config.objective),
        exhaustive: config.exhaustive,
        budget: config.budget,
        m,
        periods: vec![0; k],
        loads: vec![0; n],
        product_loads: vec![0; n * m],
        inversions: 0,
        best: None,
        explored: 0,
        cut_off: false,
    };
    search.run(0);
    let (periods, _) = search.best.expect("budget of at least one leaf");
    let optimal = Solution::new(periods);
    let value = evaluate(instance, &optimal, config.objective)?;
    Ok(OracleResult {
        optimal,
        value,
        explored: search.explored,
        proven: !search.cut_off,
    })
}

/// `100 * (1 - bound / found.total)`; zero when both are zero.
pub fn optimality_gap(found: &ObjectiveBreakdown, bound: f64) -> Result<f64> {
    if found.violations > 0 {
        return Err(PlpError::GapUndefined(format!(
            "solution violates {} capacity constraints",
            found.violations
        )));
    }
    if !(bound >= 0.0) {
        return Err(PlpError::GapUndefined(format!("bound must be non-negative, got {bound}")));
    }
    if found.total == 0.0 {
        return if bound == 0.0 {
            Ok(0.0)
        } else {
            Err(PlpError::GapUndefined("incumbent total is zero".into()))
        };
    }
    Ok(100.0 * (1.0 - bound / found.total))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MipExportOptions {
    pub objective: Objective,
    /// Ordering rows for interchangeable orders (same demand and product).
    pub include_symmetry: bool,
    /// Rows tying the total slacks to the per-product slacks.
    pub include_slack_link: bool,
}

impl Default for MipExportOptions {
    fn default() -> Self {
        Self {
            objective: Objective::Absolute,
            include_symmetry: true,
            include_slack_link: true,
        }
    }
}

/// Ordered pairs `(i, j)` with `p_i > p_j`, 0-based.
pub fn priority_pairs(instance: &Instance) -> Vec<(usize, usize)> {
    let k = instance.num_orders();
    let mut pairs = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if instance.orders[i].priority > instance.orders[j].priority {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Pairs `(i, j)` of interchangeable orders where `i` must not be planned
/// later than `j`: same demand and product, and either higher priority or
/// equal priority with a smaller id.
pub fn symmetry_pairs(instance: &Instance) -> Vec<(usize, usize)> {
    let mut groups: HashMap<(u64, usize), Vec<usize>> = HashMap::new();
    for (j, o) in instance.orders.iter().enumerate() {
        groups.entry((o.demand, o.product)).or_default().push(j);
    }
    let mut pairs = Vec::new();
    for members in groups.values() {
        for &i in members {
            for &j in members {
                let (a, b) = (&instance.orders[i], &instance.orders[j]);
                if a.priority > b.priority || (a.priority == b.priority && a.id < b.id) {
                    pairs.push((i, j));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Incremental writer for one linear expression, wrapping long rows.
struct Expr {
    text: String,
    terms: usize,
}

impl Expr {
    fn new(label: &str) -> Self {
        Self {
            text: format!(" {label}:"),
            terms: 0,
        }
    }

    fn term(&mut self, coef: f64, var: &str) {
        if self.terms > 0 && self.terms % 8 == 0 {
            self.text.push_str("\n   ");
        }
        let sign = if coef < 0.0 { '-' } else { '+' };
        let abs = coef.abs();
        if abs == 1.0 {
            let _ = write!(self.text, " {sign} {var}");
        } else {
            let _ = write!(self.text, " {sign} {} {var}", num(abs));
        }
        self.terms += 1;
    }

    fn finish(mut self, tail: &str) -> String {
        if self.terms == 0 {
            self.text.push_str(" 0");
        }
        self.text.push_str(tail);
        self.text.push('\n');
        self.text
    }
}

/// Shortest round-trip decimal; LP readers accept plain and exponent forms.
fn num(v: f64) -> String {
    let s = format!("{v}");
    if s.len() > 24 {
        format!("{v:e}")
    } else {
        s
    }
}

/// Writes the MIP model as a CPLEX-LP document.
///
/// Variables (1-based): `x_i_j` order `j` in period `i`, `y_j` period of
/// order `j`, `z_i_j` inversion of orders with `p_i > p_j`, `sp_i`/`sm_i`
/// surplus and missing demand of period `i`, `spp_i_t`/`smp_i_t` the same
/// per product. Row names: `one_j`, `link_xy_j`, `link_yz_i_j`, `dev_i`,
/// `dev_i_t`, `cap_i`, `cap_i_t`, `sym_i_j`, `link_s_i`.
pub fn export_mip<W: Write>(instance: &Instance, options: &MipExportOptions, mut out: W) -> Result<()> {
    crate::model::ensure_valid(instance)?;
    out.write_all(mip_text(instance, options).as_bytes())?;
    Ok(())
}

fn mip_text(instance: &Instance, options: &MipExportOptions) -> String {
    let n = instance.num_periods;
    let m = instance.num_products();
    let k = instance.num_orders();
    let targets = instance.targets();
    let scales = Scales::new(instance, options.objective);
    let [a1, a2, a3] = scales.weights;
    let pairs = priority_pairs(instance);
    let mut doc = String::new();

    let _ = writeln!(doc, "\\ production leveling problem: {k} orders, {n} periods, {m} products");
    let _ = writeln!(doc, "\\ objective: {}", options.objective);
    doc.push_str("Minimize\n");
    let mut obj = Expr::new("obj");
    let z_coef = a3 * scales.pair;
    if z_coef != 0.0 {
        for &(i, j) in &pairs {
            obj.term(z_coef, &format!("z_{}_{}", i + 1, j + 1));
        }
    }
    let total_coef = a1 * scales.total;
    let product_coef = |t: usize| a2 * scales.product[t];
    match options.objective {
        Objective::Absolute => {
            if total_coef != 0.0 {
                for i in 1..=n {
                    obj.term(total_coef, &format!("sp_{i}"));
                    obj.term(total_coef, &format!("sm_{i}"));
                }
            }
            for t in 0..m {
                let c = product_coef(t);
                if c != 0.0 {
                    for i in 1..=n {
                        obj.term(c, &format!("spp_{i}_{}", t + 1));
                        obj.term(c, &format!("smp_{i}_{}", t + 1));
                    }
                }
            }
            doc.push_str(&obj.finish(""));
        }
        Objective::Quadratic => {
            // Quadratic part is written as [ 2q x ^ 2 ] / 2.
            let mut quad: Vec<(f64, String)> = Vec::new();
            if total_coef != 0.0 {
                for i in 1..=n {
                    quad.push((2.0 * total_coef, format!("sp_{i} ^ 2")));
                    quad.push((2.0 * total_coef, format!("sm_{i} ^ 2")));
                }
            }
            for t in 0..m {
                let c = product_coef(t);
                if c != 0.0 {
                    for i in 1..=n {
                        quad.push((2.0 * c, format!("spp_{i}_{} ^ 2", t + 1)));
                        quad.push((2.0 * c, format!("smp_{i}_{} ^ 2", t + 1)));
                    }
                }
            }
            let mut text = obj.finish("");
            text.pop();
            if !quad.is_empty() {
                text.push_str(" + [");
                for (idx, (c, v)) in quad.iter().enumerate() {
                    if idx > 0 && idx % 8 == 0 {
                        text.push_str("\n   ");
                    }
                    if idx > 0 {
                        text.push_str(" +");
                    }
                    let _ = write!(text, " {} {v}", num(*c));
                }
                text.push_str(" ] / 2");
            }
            text.push('\n');
            doc.push_str(&text);
        }
    }

    doc.push_str("Subject To\n");
    for j in 1..=k {
        let mut e = Expr::new(&format!("one_{j}"));
        for i in 1..=n {
            e.term(1.0, &format!("x_{i}_{j}"));
        }
        doc.push_str(&e.finish(" = 1"));
    }
    for j in 1..=k {
        let mut e = Expr::new(&format!("link_xy_{j}"));
        for i in 1..=n {
            e.term(i as f64, &format!("x_{i}_{j}"));
        }
        e.term(-1.0, &format!("y_{j}"));
        doc.push_str(&e.finish(" = 0"));
    }
    for &(i, j) in &pairs {
        let (i, j) = (i + 1, j + 1);
        let mut e = Expr::new(&format!("link_yz_{i}_{j}"));
        e.term(1.0, &format!("y_{i}"));
        e.term(-1.0, &format!("y_{j}"));
        e.term(-((n - 1) as f64), &format!("z_{i}_{j}"));
        doc.push_str(&e.finish(" <= 0"));
    }
    for i in 1..=n {
        let mut e = Expr::new(&format!("dev_{i}"));
        for (j, o) in instance.orders.iter().enumerate() {
            e.term(o.demand as f64, &format!("x_{i}_{}", j + 1));
        }
        e.term(-1.0, &format!("sp_{i}"));
        e.term(1.0, &format!("sm_{i}"));
        doc.push_str(&e.finish(&format!(" = {}", num(targets.total))));
    }
    for i in 1..=n {
        for t in 0..m {
            let mut e = Expr::new(&format!("dev_{i}_{}", t + 1));
            for (j, o) in instance.orders.iter().enumerate() {
                if o.product == t {
                    e.term(o.demand as f64, &format!("x_{i}_{}", j + 1));
                }
            }
            e.term(-1.0, &format!("spp_{i}_{}", t + 1));
            e.term(1.0, &format!("smp_{i}_{}", t + 1));
            doc.push_str(&e.finish(&format!(" = {}", num(targets.per_product[t]))));
        }
    }
    for i in 1..=n {
        let mut e = Expr::new(&format!("cap_{i}"));
        e.term(1.0, &format!("sp_{i}"));
        doc.push_str(&e.finish(&format!(" <= {}", num(instance.capacity_total - targets.total))));
    }
    for i in 1..=n {
        for t in 0..m {
            let mut e = Expr::new(&format!("cap_{i}_{}", t + 1));
            e.term(1.0, &format!("spp_{i}_{}", t + 1));
            let rhs = instance.product_capacity(t) - targets.per_product[t];
            doc.push_str(&e.finish(&format!(" <= {}", num(rhs))));
        }
    }
    if options.include_symmetry {
        for (i, j) in symmetry_pairs(instance) {
            let (i, j) = (i + 1, j + 1);
            let mut e = Expr::new(&format!("sym_{i}_{j}"));
            e.term(1.0, &format!("y_{i}"));
            e.term(-1.0, &format!("y_{j}"));
            doc.push_str(&e.finish(" <= 0"));
        }
    }
    if options.include_slack_link {
        for i in 1..=n {
            let mut e = Expr::new(&format!("link_s_{i}"));
            for t in 1..=m {
                e.term(1.0, &format!("smp_{i}_{t}"));
                e.term(-1.0, &format!("spp_{i}_{t}"));
            }
            e.term(-1.0, &format!("sm_{i}"));
            e.term(1.0, &format!("sp_{i}"));
            doc.push_str(&e.finish(" = 0"));
        }
    }

    doc.push_str("Bounds\n");
    for j in 1..=k {
        let _ = writeln!(doc, " 1 <= y_{j} <= {n}");
    }
    for i in 1..=n {
        let _ = writeln!(doc, " sp_{i} >= 0");
        let _ = writeln!(doc, " sm_{i} >= 0");
        for t in 1..=m {
            let _ = writeln!(doc, " spp_{i}_{t} >= 0");
            let _ = writeln!(doc, " smp_{i}_{t} >= 0");
        }
    }
    doc.push_str("Generals\n");
    for j in 1..=k {
        let _ = writeln!(doc, " y_{j}");
    }
    doc.push_str("Binaries\n");
    for i in 1..=n {
        for j in 1..=k {
            let _ = writeln!(doc, " x_{i}_{j}");
        }
    }
    for &(i, j) in &pairs {
        let _ = writeln!(doc, " z_{}_{}", i + 1, j + 1);
    }
    doc.push_str("End\n");
    doc
}
