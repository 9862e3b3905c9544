use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use plp_core::generate::{generate_perfect, generate_random, reduce_bin_packing, PerfectSpec, RandomSpec};
use plp_core::io::{instance_to_json, SidecarDoc};

use crate::{emit, input_err, CliResult};

#[derive(Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    kind: Kind,
}

#[derive(Args)]
struct Output {
    /// Instance file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sidecar with generator metadata (and the certificate for perfect
    /// instances). Perfect instances default to `<out>.sidecar.json`.
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Kind {
    /// Instance with a known zero-cost solution.
    Perfect {
        #[arg(short = 'k', long)]
        orders: usize,
        #[arg(short = 'n', long)]
        periods: usize,
        #[arg(short = 'm', long)]
        products: usize,
        /// Average demand per order.
        #[arg(long)]
        avg: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Practice-like instance with few distinct demand values per product.
    Random {
        #[arg(short = 'k', long)]
        orders: usize,
        #[arg(short = 'n', long)]
        periods: usize,
        #[arg(short = 'm', long)]
        products: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Bin packing instance as a single-product leveling instance.
    Binpack {
        #[arg(long)]
        bins: usize,
        #[arg(long)]
        capacity: u64,
        /// Comma-separated item sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        items: Vec<u64>,
        #[command(flatten)]
        output: Output,
    },
}

fn default_sidecar(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.sidecar.json"))
}

pub fn run(args: GenerateArgs) -> CliResult<()> {
    let (generated, output) = match args.kind {
        Kind::Perfect {
            orders,
            periods,
            products,
            avg,
            seed,
            output,
        } => {
            let spec = PerfectSpec {
                num_products: products,
                num_periods: periods,
                num_orders: orders,
                avg_demand_per_order: avg,
                seed,
            };
            (generate_perfect(&spec)?, output)
        }
        Kind::Random {
            orders,
            periods,
            products,
            seed,
            output,
        } => {
            let spec = RandomSpec {
                num_orders: orders,
                num_periods: periods,
                num_products: products,
                seed,
            };
            (generate_random(&spec)?, output)
        }
        Kind::Binpack {
            bins,
            capacity,
            items,
            output,
        } => {
            let instance = reduce_bin_packing(bins, capacity, &items)?;
            return emit(output.out.as_deref(), &(instance_to_json(&instance)? + "\n"));
        }
    };
    let sidecar = match (&output.sidecar, &output.out, generated.certificate.is_some()) {
        (Some(p), _, _) => Some(p.clone()),
        (None, Some(out), true) => Some(default_sidecar(out)),
        (None, None, true) => {
            return Err(input_err("perfect instances on stdout need --sidecar for the certificate"))
        }
        _ => None,
    };
    emit(output.out.as_deref(), &(instance_to_json(&generated.instance)? + "\n"))?;
    if let Some(path) = sidecar {
        let doc = serde_json::to_string_pretty(&SidecarDoc::from(&generated))? + "\n";
        emit(Some(&path), &doc)?;
    }
    Ok(())
}
