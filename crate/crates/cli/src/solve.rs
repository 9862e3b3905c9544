use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, ValueEnum};
use plp_core::exact::{solve_exact, OracleConfig, OracleResult};
use plp_core::io::{solution_to_json, OracleDoc};
use plp_core::search::{simulated_annealing, vnd, Exploration, SaConfig, SearchTrace, StopReason, VndConfig};
use plp_core::{evaluate, greedy_construct, GreedyConfig, Instance, ObjectiveBreakdown, Solution};
use serde_json::json;

use crate::{emit, input_err, load_instance, CliResult, Failure, ObjectiveArg};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Greedy,
    Vnd,
    Sa,
    Exact,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Greedy => "greedy",
            Algo::Vnd => "vnd",
            Algo::Sa => "sa",
            Algo::Exact => "exact",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExplorationArg {
    First,
    Best,
}

/// Parameters shared by `solve` and `bench`.
#[derive(Args, Clone, Debug)]
pub struct AlgoParams {
    /// Wall-clock limit in seconds for VND and SA (SA defaults to 300).
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long, value_enum, default_value = "abs")]
    pub objective: ObjectiveArg,
    /// Greedy: size of the random candidate list (1 = deterministic).
    #[arg(long, default_value_t = 1)]
    pub greedy_r: usize,
    #[arg(long)]
    pub sa_t_max: Option<f64>,
    #[arg(long)]
    pub sa_t_min: Option<f64>,
    #[arg(long)]
    pub sa_iterations_per_temperature: Option<u64>,
    #[arg(long)]
    pub sa_cooling_rate: Option<f64>,
    /// Probability of a move-order step; swaps otherwise.
    #[arg(long)]
    pub sa_move_probability: Option<f64>,
    #[arg(long)]
    pub sa_iteration_limit: Option<u64>,
    #[arg(long, value_enum, default_value = "first")]
    pub vnd_exploration: ExplorationArg,
    #[arg(long)]
    pub vnd_iteration_limit: Option<u64>,
    /// Exact: maximum number of complete assignments to evaluate.
    #[arg(long, default_value_t = plp_core::exact::DEFAULT_BUDGET)]
    pub exact_budget: u64,
    /// Exact: enumerate every assignment without pruning.
    #[arg(long)]
    pub exhaustive: bool,
}

impl AlgoParams {
    pub fn time_limit(&self) -> CliResult<Option<Duration>> {
        match self.time_limit {
            None => Ok(None),
            Some(s) if s.is_finite() && s > 0.0 => Ok(Some(Duration::from_secs_f64(s))),
            Some(s) => Err(input_err(format!("time limit must be a positive number of seconds, got {s}"))),
        }
    }

    pub fn sa_config(&self, seed: u64) -> CliResult<SaConfig> {
        let d = SaConfig::default();
        Ok(SaConfig {
            t_max: self.sa_t_max.unwrap_or(d.t_max),
            t_min: self.sa_t_min.unwrap_or(d.t_min),
            iterations_per_temperature: self.sa_iterations_per_temperature.unwrap_or(d.iterations_per_temperature),
            cooling_rate: self.sa_cooling_rate.unwrap_or(d.cooling_rate),
            move_probability: self.sa_move_probability.unwrap_or(d.move_probability),
            time_limit: self.time_limit()?.or(d.time_limit),
            iteration_limit: self.sa_iteration_limit,
            objective: self.objective.into(),
            seed,
        })
    }

    pub fn vnd_config(&self, seed: u64) -> CliResult<VndConfig> {
        Ok(VndConfig {
            exploration: match self.vnd_exploration {
                ExplorationArg::First => Exploration::FirstImprovementCyclic,
                ExplorationArg::Best => Exploration::BestImprovement,
            },
            time_limit: self.time_limit()?,
            iteration_limit: self.vnd_iteration_limit,
            objective: self.objective.into(),
            seed,
            ..Default::default()
        })
    }
}

pub struct RunOutcome {
    pub solution: Solution,
    pub breakdown: ObjectiveBreakdown,
    pub trace: Option<SearchTrace>,
    pub oracle: Option<OracleResult>,
    pub runtime: Duration,
}

fn greedy(instance: &Instance, params: &AlgoParams, seed: u64) -> CliResult<Solution> {
    Ok(greedy_construct(
        instance,
        &GreedyConfig {
            random_selection_size: params.greedy_r,
            seed,
        },
    )?)
}

/// Runs one algorithm; VND and SA start from the greedy solution.
pub fn run_algorithm(instance: &Instance, algo: Algo, params: &AlgoParams, sa: Option<&SaConfig>, seed: u64) -> CliResult<RunOutcome> {
    let started = Instant::now();
    let objective = params.objective.into();
    let (solution, trace, oracle) = match algo {
        Algo::Greedy => (greedy(instance, params, seed)?, None, None),
        Algo::Vnd => {
            let start = greedy(instance, params, seed)?;
            let t = vnd(instance, start, &params.vnd_config(seed)?)?;
            (t.best.clone(), Some(t), None)
        }
        Algo::Sa => {
            let start = greedy(instance, params, seed)?;
            let cfg = match sa {
                Some(c) => c.clone(),
                None => params.sa_config(seed)?,
            };
            let t = simulated_annealing(instance, start, &cfg)?;
            (t.best.clone(), Some(t), None)
        }
        Algo::Exact => {
            let r = solve_exact(
                instance,
                &OracleConfig {
                    objective,
                    budget: params.exact_budget,
                    exhaustive: params.exhaustive,
                },
            )?;
            (r.optimal.clone(), None, Some(r))
        }
    };
    let breakdown = evaluate(instance, &solution, objective)?;
    Ok(RunOutcome {
        solution,
        breakdown,
        trace,
        oracle,
        runtime: started.elapsed(),
    })
}

pub fn stop_name(stop: StopReason) -> &'static str {
    match stop {
        StopReason::LocalOptimum => "local_optimum",
        StopReason::MinTemperature => "min_temperature",
        StopReason::TimeLimit => "time_limit",
        StopReason::IterationLimit => "iteration_limit",
    }
}

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long)]
    instance: PathBuf,
    /// Solution file (`{"assignment": [...]}`).
    #[arg(long)]
    out: PathBuf,
    /// Search trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Also write the solve report printed on stdout to this file.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    params: AlgoParams,
}

pub fn run(args: SolveArgs) -> CliResult<()> {
    let instance = load_instance(&args.instance)?;
    let outcome = run_algorithm(&instance, args.algo, &args.params, None, args.seed)?;
    fs::write(&args.out, solution_to_json(&outcome.solution)? + "\n")
        .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", args.out.display())))?;

    if let Some(path) = &args.trace {
        let mut buf = Vec::new();
        match &outcome.trace {
            Some(t) => t.write_csv(&mut buf)?,
            None => {
                use std::io::Write;
                let b = &outcome.breakdown;
                writeln!(buf, "{}", SearchTrace::CSV_HEADER)?;
                writeln!(buf, "0,0,{},{},{}", b.total, b.total, b.violations)?;
            }
        }
        fs::write(path, buf)?;
    }

    let b = &outcome.breakdown;
    let mut report = json!({
        "algorithm": args.algo.name(),
        "objective": plp_core::Objective::from(args.params.objective).to_string(),
        "seed": args.seed,
        "g1": b.g1,
        "g2": b.g2,
        "g3": b.g3,
        "total": b.total,
        "violations": b.violations,
        "runtime_seconds": outcome.runtime.as_secs_f64(),
    });
    if let Some(t) = &outcome.trace {
        report["iterations"] = json!(t.iterations);
        report["stop"] = json!(stop_name(t.stop));
    }
    if let Some(r) = &outcome.oracle {
        report["oracle"] = serde_json::to_value(OracleDoc::from(r))?;
    }
    let text = serde_json::to_string_pretty(&report)? + "\n";
    if let Some(path) = &args.report {
        emit(Some(path), &text)?;
    }
    emit(None, &text)
}
