use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use plp_core::objective::loads;
use plp_core::{evaluate, Instance, Objective, ObjectiveBreakdown, Solution};
use serde::Serialize;

use crate::{emit, input_err, load_instance, load_solution, read_input, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["solution", "certificate"]))]
pub struct EvaluateArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Solution file.
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Generator sidecar whose certificate is evaluated.
    #[arg(long)]
    certificate: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Also write the load table as CSV.
    #[arg(long)]
    loads_csv: Option<PathBuf>,
}

/// One row of the load table; `product` is absent for the period total.
#[derive(Debug, Serialize)]
struct LoadRow {
    period: usize,
    product: Option<usize>,
    load: u64,
    target: f64,
    capacity: f64,
    /// Amount above capacity, 0 when within.
    excess: f64,
    violated: bool,
}

#[derive(Serialize)]
struct Report {
    absolute: ObjectiveBreakdown,
    quadratic: ObjectiveBreakdown,
    total_excess: f64,
    loads: Vec<LoadRow>,
}

fn load_table(instance: &Instance, solution: &Solution) -> Vec<LoadRow> {
    let (w, wt) = loads(instance, solution);
    let targets = instance.targets();
    let m = instance.num_products();
    let row = |period: usize, product: Option<usize>, load: u64, target: f64, capacity: f64| {
        let excess = (load as f64 - capacity).max(0.0);
        LoadRow {
            period: period + 1,
            product: product.map(|t| t + 1),
            load,
            target,
            capacity,
            excess,
            violated: excess > 0.0,
        }
    };
    let mut rows = Vec::new();
    for (i, &load) in w.iter().enumerate() {
        rows.push(row(i, None, load, targets.total, instance.capacity_total));
        for t in 0..m {
            rows.push(row(i, Some(t), wt[i * m + t], targets.per_product[t], instance.product_capacity(t)));
        }
    }
    rows
}

fn text(report: &Report) -> String {
    let mut s = String::new();
    for (name, b) in [("absolute", &report.absolute), ("quadratic", &report.quadratic)] {
        let _ = writeln!(
            s,
            "{name:<9} g1 {:.6}  g2 {:.6}  g3 {:.6}  total {:.6}  violations {}",
            b.g1, b.g2, b.g3, b.total, b.violations
        );
    }
    let _ = writeln!(s, "\nperiod  product      load      target    capacity");
    for r in &report.loads {
        let product = r.product.map_or("all".to_string(), |t| t.to_string());
        let flag = if r.violated { "  OVER" } else { "" };
        let _ = writeln!(
            s,
            "{:>6}  {:>7}  {:>8}  {:>10.3}  {:>10}{flag}",
            r.period, product, r.load, r.target, r.capacity
        );
    }
    s
}

pub fn run(args: EvaluateArgs) -> CliResult<()> {
    let instance = load_instance(&args.instance)?;
    let solution = match (&args.solution, &args.certificate) {
        (Some(p), _) => load_solution(p)?,
        (None, Some(p)) => {
            let doc: plp_core::io::SidecarDoc = serde_json::from_str(&read_input(p)?)
                .map_err(|e| input_err(format!("{}: {e}", p.display())))?;
            let cert = doc
                .certificate
                .ok_or_else(|| input_err(format!("{} holds no certificate", p.display())))?;
            Solution::from_one_based(&cert)?
        }
        (None, None) => unreachable!("clap enforces one source"),
    };
    let absolute = evaluate(&instance, &solution, Objective::Absolute)?;
    let quadratic = evaluate(&instance, &solution, Objective::Quadratic)?;
    let loads = load_table(&instance, &solution);
    let report = Report {
        absolute,
        quadratic,
        total_excess: loads.iter().map(|r| r.excess).sum(),
        loads,
    };
    if let Some(path) = &args.loads_csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &report.loads {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Failure::Internal(e.to_string()))?;
        std::fs::write(path, bytes)?;
    }
    let out = match args.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Text => text(&report),
    };
    emit(None, &out)
}
