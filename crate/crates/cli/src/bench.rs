use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use plp_core::exact::optimality_gap;
use plp_core::search::{equivalent_schedule, SaConfig};
use plp_core::Instance;
use rayon::prelude::*;
use serde::Serialize;

use crate::solve::{run_algorithm, Algo, AlgoParams};
use crate::{input_err, load_instance, read_input, CliResult, Failure};

pub const COOLING_RATES: [f64; 5] = [0.5, 0.75, 0.9, 0.95, 0.99];
const REFERENCE_RATE: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    /// Equivalent cooling schedules for several cooling rates.
    Cooling,
    /// Move/swap probability grid from 0 to 1 in steps of 0.2.
    Weighting,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Directory of instance files (`*.json`, sidecars are skipped).
    #[arg(long)]
    instances: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "greedy,vnd,sa")]
    algos: Vec<Algo>,
    /// Runs per (instance, algorithm, configuration).
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    /// Named SA experiment; replaces the algorithm list.
    #[arg(long, value_enum)]
    experiment: Option<Experiment>,
    /// JSON object mapping instance names to lower bounds.
    #[arg(long)]
    bounds: Option<PathBuf>,
    /// Per-run CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Median summary CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    params: AlgoParams,
}

/// One run. Column order is part of the output format.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub algorithm: String,
    pub config: String,
    pub seed: Option<u64>,
    pub total: Option<f64>,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub g3: Option<f64>,
    pub violations: Option<u64>,
    pub runtime_seconds: Option<f64>,
    pub gap_percent: Option<f64>,
    pub status: String,
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    instance: String,
    algorithm: String,
    config: String,
    runs: usize,
    median_total: f64,
    median_g1: f64,
    median_g2: f64,
    median_g3: f64,
    median_violations: f64,
    median_runtime_seconds: f64,
    median_gap_percent: Option<f64>,
}

struct Variant {
    algo: Algo,
    config: String,
    sa: Option<SaConfig>,
}

/// Label `x - y` with `x` the move share and `y` the swap share in percent.
pub fn weighting_label(step: u32) -> String {
    format!("{} - {}", 20 * step, 100 - 20 * step)
}

fn variants(args: &BenchArgs) -> CliResult<Vec<Variant>> {
    let base = args.params.sa_config(0)?;
    Ok(match args.experiment {
        None => args
            .algos
            .iter()
            .map(|&algo| Variant {
                algo,
                config: String::new(),
                sa: None,
            })
            .collect(),
        Some(Experiment::Cooling) => COOLING_RATES
            .iter()
            .map(|&alpha| {
                let w = equivalent_schedule(REFERENCE_RATE, base.iterations_per_temperature, alpha)?;
                Ok(Variant {
                    algo: Algo::Sa,
                    config: format!("alpha={alpha} w={w}"),
                    sa: Some(SaConfig {
                        cooling_rate: alpha,
                        iterations_per_temperature: w,
                        ..base.clone()
                    }),
                })
            })
            .collect::<CliResult<_>>()?,
        Some(Experiment::Weighting) => (0..=5u32)
            .map(|step| Variant {
                algo: Algo::Sa,
                config: weighting_label(step),
                sa: Some(SaConfig {
                    move_probability: f64::from(step) / 5.0,
                    ..base.clone()
                }),
            })
            .collect(),
    })
}

fn instance_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| input_err(format!("cannot read {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            name.ends_with(".json") && !name.ends_with(".sidecar.json")
        })
        .collect();
    files.sort();
    Ok(files)
}

fn instance_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn summarize(rows: &[BenchRow]) -> Vec<SummaryRow> {
    let mut order: Vec<(String, String, String)> = Vec::new();
    let mut groups: HashMap<(String, String, String), Vec<&BenchRow>> = HashMap::new();
    for r in rows.iter().filter(|r| r.status == "ok") {
        let key = (r.instance.clone(), r.algorithm.clone(), r.config.clone());
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let runs = &groups[&key];
            let col = |f: &dyn Fn(&BenchRow) -> Option<f64>| -> Vec<f64> { runs.iter().filter_map(|r| f(r)).collect() };
            let gaps = col(&|r| r.gap_percent);
            SummaryRow {
                runs: runs.len(),
                median_total: median(&mut col(&|r| r.total)),
                median_g1: median(&mut col(&|r| r.g1)),
                median_g2: median(&mut col(&|r| r.g2)),
                median_g3: median(&mut col(&|r| r.g3)),
                median_violations: median(&mut col(&|r| r.violations.map(|v| v as f64))),
                median_runtime_seconds: median(&mut col(&|r| r.runtime_seconds)),
                median_gap_percent: (!gaps.is_empty()).then(|| median(&mut gaps.clone())),
                instance: key.0,
                algorithm: key.1,
                config: key.2,
            }
        })
        .collect()
}

fn write_csv<T: Serialize>(path: Option<&Path>, rows: &[T], empty_header: &str) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let mut bytes = w.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
    if rows.is_empty() {
        bytes = format!("{empty_header}\n").into_bytes();
    }
    crate::emit(path, &String::from_utf8(bytes).expect("CSV is UTF-8"))
}

const RUN_HEADER: &str = "instance,algorithm,config,seed,total,g1,g2,g3,violations,runtime_seconds,gap_percent,status";
const SUMMARY_HEADER: &str = "instance,algorithm,config,runs,median_total,median_g1,median_g2,median_g3,median_violations,median_runtime_seconds,median_gap_percent";

pub fn run(args: BenchArgs) -> CliResult<()> {
    let variants = variants(&args)?;
    let bounds: BTreeMap<String, f64> = match &args.bounds {
        Some(p) => serde_json::from_str(&read_input(p)?)
            .map_err(|e| input_err(format!("{}: {e}", p.display())))?,
        None => BTreeMap::new(),
    };
    let mut instances: Vec<(String, Result<Instance, String>)> = Vec::new();
    for path in instance_files(&args.instances)? {
        let loaded = load_instance(&path).map_err(|e| match e {
            Failure::Input(m) | Failure::Internal(m) => m,
        });
        if let Err(msg) = &loaded {
            eprintln!("warning: skipping {msg}");
        }
        instances.push((instance_name(&path), loaded));
    }

    let mut cells: Vec<(usize, usize, u64)> = Vec::new();
    for (i, (_, inst)) in instances.iter().enumerate() {
        if inst.is_err() {
            cells.push((i, usize::MAX, 0));
            continue;
        }
        for v in 0..variants.len() {
            for s in 0..args.seeds {
                cells.push((i, v, args.seed_base + s));
            }
        }
    }

    let run_cell = |&(i, v, seed): &(usize, usize, u64)| -> BenchRow {
        let (name, inst) = &instances[i];
        let inst = match inst {
            Ok(inst) => inst,
            Err(msg) => {
                return BenchRow {
                    instance: name.clone(),
                    algorithm: String::new(),
                    config: String::new(),
                    seed: None,
                    total: None,
                    g1: None,
                    g2: None,
                    g3: None,
                    violations: None,
                    runtime_seconds: None,
                    gap_percent: None,
                    status: format!("skipped: {msg}"),
                }
            }
        };
        let variant = &variants[v];
        let sa = variant.sa.as_ref().map(|c| SaConfig { seed, ..c.clone() });
        let mut row = BenchRow {
            instance: name.clone(),
            algorithm: variant.algo.name().to_string(),
            config: variant.config.clone(),
            seed: Some(seed),
            total: None,
            g1: None,
            g2: None,
            g3: None,
            violations: None,
            runtime_seconds: None,
            gap_percent: None,
            status: "ok".into(),
        };
        match run_algorithm(inst, variant.algo, &args.params, sa.as_ref(), seed) {
            Ok(out) => {
                let b = out.breakdown;
                row.total = Some(b.total);
                row.g1 = Some(b.g1);
                row.g2 = Some(b.g2);
                row.g3 = Some(b.g3);
                row.violations = Some(b.violations);
                row.runtime_seconds = Some(out.runtime.as_secs_f64());
                row.gap_percent = bounds.get(name).and_then(|&bound| optimality_gap(&b, bound).ok());
            }
            Err(Failure::Input(m) | Failure::Internal(m)) => row.status = format!("failed: {m}"),
        }
        row
    };

    let rows: Vec<BenchRow> = match args.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Failure::Internal(e.to_string()))?
            .install(|| cells.par_iter().map(run_cell).collect()),
        None => cells.par_iter().map(run_cell).collect(),
    };

    write_csv(args.out.as_deref(), &rows, RUN_HEADER)?;
    if let Some(path) = &args.summary {
        write_csv(Some(path), &summarize(&rows), SUMMARY_HEADER)?;
    }
    Ok(())
}
