//! Python bindings. Assignments cross the boundary as 1-based period lists,
//! the same convention as the JSON solution files.

use std::time::Duration;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use plp_core::exact::{self, MipExportOptions, OracleConfig};
use plp_core::generate::{self, PerfectSpec, RandomSpec};
use plp_core::search::{self, Exploration, SaConfig, SearchTrace, VndConfig};
use plp_core::{GreedyConfig, Objective, ObjectiveBreakdown, PlpError, Solution};

fn to_py(e: PlpError) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn objective(name: &str) -> PyResult<Objective> {
    match name {
        "abs" | "absolute" => Ok(Objective::Absolute),
        "quad" | "quadratic" => Ok(Objective::Quadratic),
        other => Err(PyValueError::new_err(format!("unknown objective {other:?}, expected 'abs' or 'quad'"))),
    }
}

fn seconds(limit: Option<f64>) -> PyResult<Option<Duration>> {
    match limit {
        None => Ok(None),
        Some(s) if s.is_finite() && s > 0.0 => Ok(Some(Duration::from_secs_f64(s))),
        Some(s) => Err(PyValueError::new_err(format!("time limit must be positive, got {s}"))),
    }
}

/// A validated problem instance.
#[pyclass(frozen, skip_from_py_object, module = "plp")]
#[derive(Clone)]
pub struct Instance {
    inner: plp_core::Instance,
}

#[pymethods]
impl Instance {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        plp_core::io::parse_instance(text)
            .map(|inner| Instance { inner })
            .map_err(to_py)
    }

    fn to_json(&self) -> PyResult<String> {
        plp_core::io::instance_to_json(&self.inner).map_err(to_py)
    }

    #[getter]
    fn num_orders(&self) -> usize {
        self.inner.num_orders()
    }

    #[getter]
    fn num_periods(&self) -> usize {
        self.inner.num_periods
    }

    #[getter]
    fn num_products(&self) -> usize {
        self.inner.num_products()
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(orders={}, periods={}, products={})",
            self.inner.num_orders(),
            self.inner.num_periods,
            self.inner.num_products()
        )
    }
}

/// Objective components of one assignment.
#[pyclass(frozen, get_all, skip_from_py_object, module = "plp")]
#[derive(Clone)]
pub struct Breakdown {
    g1: f64,
    g2: f64,
    g3: f64,
    total: f64,
    violations: u64,
}

impl From<ObjectiveBreakdown> for Breakdown {
    fn from(b: ObjectiveBreakdown) -> Self {
        Breakdown {
            g1: b.g1,
            g2: b.g2,
            g3: b.g3,
            total: b.total,
            violations: b.violations,
        }
    }
}

#[pymethods]
impl Breakdown {
    fn __repr__(&self) -> String {
        format!(
            "Breakdown(total={}, g1={}, g2={}, g3={}, violations={})",
            self.total, self.g1, self.g2, self.g3, self.violations
        )
    }
}

/// Outcome of a local search: best assignment, its breakdown and run data.
#[pyclass(frozen, get_all, module = "plp")]
pub struct SearchResult {
    assignment: Vec<usize>,
    breakdown: Breakdown,
    iterations: u64,
    seconds: f64,
    stop: String,
}

impl From<SearchTrace> for SearchResult {
    fn from(t: SearchTrace) -> Self {
        SearchResult {
            assignment: t.best.to_one_based(),
            breakdown: t.breakdown.into(),
            iterations: t.iterations,
            seconds: t.elapsed.as_secs_f64(),
            stop: format!("{:?}", t.stop),
        }
    }
}

#[pyclass(frozen, get_all, module = "plp")]
pub struct OracleResult {
    assignment: Vec<usize>,
    breakdown: Breakdown,
    explored: u64,
    proven: bool,
}

fn solution(assignment: &[usize]) -> PyResult<Solution> {
    Solution::from_one_based(assignment).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (instance, assignment, objective = "abs"))]
fn evaluate(instance: &Instance, assignment: Vec<usize>, objective: &str) -> PyResult<Breakdown> {
    let s = solution(&assignment)?;
    plp_core::evaluate(&instance.inner, &s, self::objective(objective)?)
        .map(Breakdown::from)
        .map_err(to_py)
}

/// Greedy construction; `r > 1` picks randomly among the `r` best periods.
#[pyfunction]
#[pyo3(signature = (instance, r = 1, seed = 0))]
fn greedy(instance: &Instance, r: usize, seed: u64) -> PyResult<Vec<usize>> {
    let cfg = GreedyConfig {
        random_selection_size: r,
        seed,
    };
    plp_core::greedy_construct(&instance.inner, &cfg)
        .map(|s| s.to_one_based())
        .map_err(to_py)
}

fn start(instance: &Instance, assignment: Option<Vec<usize>>, seed: u64) -> PyResult<Solution> {
    match assignment {
        Some(a) => solution(&a),
        None => plp_core::greedy_construct(&instance.inner, &GreedyConfig { seed, ..Default::default() }).map_err(to_py),
    }
}

/// Variable neighborhood descent, from `assignment` or the greedy solution.
#[pyfunction]
#[pyo3(signature = (instance, assignment = None, objective = "abs", best_improvement = false, time_limit = None, iteration_limit = None, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn vnd(
    py: Python<'_>,
    instance: &Instance,
    assignment: Option<Vec<usize>>,
    objective: &str,
    best_improvement: bool,
    time_limit: Option<f64>,
    iteration_limit: Option<u64>,
    seed: u64,
) -> PyResult<SearchResult> {
    let cfg = VndConfig {
        exploration: if best_improvement {
            Exploration::BestImprovement
        } else {
            Exploration::FirstImprovementCyclic
        },
        time_limit: seconds(time_limit)?,
        iteration_limit,
        objective: self::objective(objective)?,
        seed,
        ..Default::default()
    };
    let initial = start(instance, assignment, seed)?;
    let inst = &instance.inner;
    py.detach(|| search::vnd(inst, initial, &cfg))
        .map(SearchResult::from)
        .map_err(to_py)
}

/// Simulated annealing; unset parameters keep the library defaults.
#[pyfunction]
#[pyo3(signature = (
    instance, assignment = None, objective = "abs", seed = 0, time_limit = None, iteration_limit = None,
    t_max = None, t_min = None, iterations_per_temperature = None, cooling_rate = None, move_probability = None
))]
#[allow(clippy::too_many_arguments)]
fn anneal(
    py: Python<'_>,
    instance: &Instance,
    assignment: Option<Vec<usize>>,
    objective: &str,
    seed: u64,
    time_limit: Option<f64>,
    iteration_limit: Option<u64>,
    t_max: Option<f64>,
    t_min: Option<f64>,
    iterations_per_temperature: Option<u64>,
    cooling_rate: Option<f64>,
    move_probability: Option<f64>,
) -> PyResult<SearchResult> {
    let d = SaConfig::default();
    let cfg = SaConfig {
        t_max: t_max.unwrap_or(d.t_max),
        t_min: t_min.unwrap_or(d.t_min),
        iterations_per_temperature: iterations_per_temperature.unwrap_or(d.iterations_per_temperature),
        cooling_rate: cooling_rate.unwrap_or(d.cooling_rate),
        move_probability: move_probability.unwrap_or(d.move_probability),
        time_limit: seconds(time_limit)?.or(d.time_limit),
        iteration_limit,
        objective: self::objective(objective)?,
        seed,
    };
    let initial = start(instance, assignment, seed)?;
    let inst = &instance.inner;
    py.detach(|| search::simulated_annealing(inst, initial, &cfg))
        .map(SearchResult::from)
        .map_err(to_py)
}

/// Depth-first enumeration; `proven` is false when the budget ran out.
#[pyfunction]
#[pyo3(signature = (instance, objective = "abs", budget = exact::DEFAULT_BUDGET, exhaustive = false))]
fn solve_exact(py: Python<'_>, instance: &Instance, objective: &str, budget: u64, exhaustive: bool) -> PyResult<OracleResult> {
    let cfg = OracleConfig {
        objective: self::objective(objective)?,
        budget,
        exhaustive,
    };
    let inst = &instance.inner;
    let r = py.detach(|| exact::solve_exact(inst, &cfg)).map_err(to_py)?;
    Ok(OracleResult {
        assignment: r.optimal.to_one_based(),
        breakdown: r.value.into(),
        explored: r.explored,
        proven: r.proven,
    })
}

/// Instance with a zero-cost certificate, returned as `(instance, certificate)`.
#[pyfunction]
#[pyo3(signature = (orders, periods, products, avg_demand, seed = 0))]
fn generate_perfect(orders: usize, periods: usize, products: usize, avg_demand: u64, seed: u64) -> PyResult<(Instance, Vec<usize>)> {
    let g = generate::generate_perfect(&PerfectSpec {
        num_products: products,
        num_periods: periods,
        num_orders: orders,
        avg_demand_per_order: avg_demand,
        seed,
    })
    .map_err(to_py)?;
    let cert = g.certificate.map(|c| c.to_one_based()).unwrap_or_default();
    Ok((Instance { inner: g.instance }, cert))
}

#[pyfunction]
#[pyo3(signature = (orders, periods, products, seed = 0))]
fn generate_random(orders: usize, periods: usize, products: usize, seed: u64) -> PyResult<Instance> {
    generate::generate_random(&RandomSpec {
        num_orders: orders,
        num_periods: periods,
        num_products: products,
        seed,
    })
    .map(|g| Instance { inner: g.instance })
    .map_err(to_py)
}

#[pyfunction]
fn reduce_bin_packing(bins: usize, capacity: u64, items: Vec<u64>) -> PyResult<Instance> {
    generate::reduce_bin_packing(bins, capacity, &items)
        .map(|inner| Instance { inner })
        .map_err(to_py)
}

/// CPLEX-LP text of the MIP model.
#[pyfunction]
#[pyo3(signature = (instance, objective = "abs", symmetry = true, slack_link = true))]
fn export_mip(instance: &Instance, objective: &str, symmetry: bool, slack_link: bool) -> PyResult<String> {
    let options = MipExportOptions {
        objective: self::objective(objective)?,
        include_symmetry: symmetry,
        include_slack_link: slack_link,
    };
    let mut buf = Vec::new();
    exact::export_mip(&instance.inner, &options, &mut buf).map_err(to_py)?;
    Ok(String::from_utf8(buf).expect("LP text is ASCII"))
}

#[pyfunction]
fn equivalent_schedule(alpha_1: f64, w_1: u64, alpha_2: f64) -> PyResult<u64> {
    search::equivalent_schedule(alpha_1, w_1, alpha_2).map_err(to_py)
}

#[pymodule]
fn plp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Instance>()?;
    m.add_class::<Breakdown>()?;
    m.add_class::<SearchResult>()?;
    m.add_class::<OracleResult>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(greedy, m)?)?;
    m.add_function(wrap_pyfunction!(vnd, m)?)?;
    m.add_function(wrap_pyfunction!(anneal, m)?)?;
    m.add_function(wrap_pyfunction!(solve_exact, m)?)?;
    m.add_function(wrap_pyfunction!(generate_perfect, m)?)?;
    m.add_function(wrap_pyfunction!(generate_random, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_bin_packing, m)?)?;
    m.add_function(wrap_pyfunction!(export_mip, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent_schedule, m)?)?;
    Ok(())
}
