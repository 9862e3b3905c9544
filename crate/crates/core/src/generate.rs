//! Instance generators.
//!
//! * [`partition`]: random composition of an integer with a per-part minimum.
//! * [`generate_perfect`]: instances with a known zero-cost solution.
//! * [`generate_random`]: practice-like instances with few distinct demands.
//! * [`reduce_bin_packing`]: bin packing as a single-product leveling instance.
//!
//! All randomness comes from ChaCha8 seeded through `seed_from_u64`, recorded
//! in [`GeneratorInfo::rng`].

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PlpError, Result};
use crate::model::{Instance, Order, Product, Solution, Weights};

pub const RNG_ID: &str = "chacha8/seed_from_u64";
pub const GENERATOR_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionSpec {
    pub total: u64,
    pub parts: usize,
    pub min_value: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfectSpec {
    pub num_products: usize,
    pub num_periods: usize,
    pub num_orders: usize,
    pub avg_demand_per_order: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub num_orders: usize,
    pub num_periods: usize,
    pub num_products: usize,
    pub seed: u64,
}

/// Provenance recorded next to a generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorInfo {
    pub kind: String,
    pub version: u32,
    pub rng: String,
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub instance: Instance,
    /// Zero-cost solution known from construction, for perfect instances.
    pub certificate: Option<Solution>,
    pub generator: GeneratorInfo,
}

/// Splits `total` into `parts` integers of at least `min_value` each.
///
/// Draws `parts - 1` separator positions uniformly among the
/// `total - parts * min_value` remaining units, so every composition is
/// equally likely.
pub fn partition<R: Rng + ?Sized>(spec: PartitionSpec, rng: &mut R) -> Result<Vec<u64>> {
    let PartitionSpec {
        total,
        parts,
        min_value,
    } = spec;
    let floor = (parts as u64).checked_mul(min_value);
    if parts == 0 || floor.is_none_or(|f| f > total) {
        return Err(PlpError::InfeasiblePartition {
            total,
            parts,
            min_value,
        });
    }
    let free = (total - parts as u64 * min_value) as usize;
    let slots = free + parts - 1;
    let mut separators = index::sample(rng, slots, parts - 1).into_vec();
    separators.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0usize;
    for s in separators {
        out.push((s - prev) as u64 + min_value);
        prev = s + 1;
    }
    out.push((slots - prev) as u64 + min_value);
    Ok(out)
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn product_name<R: Rng + ?Sized>(index: usize, rng: &mut R) -> String {
    format!("product-{}-{:04x}", index + 1, rng.gen::<u16>())
}

/// Generates an instance whose `certificate` has total cost 0 and no violations.
pub fn generate_perfect(spec: &PerfectSpec) -> Result<GeneratedInstance> {
    let (m, n, k) = (spec.num_products, spec.num_periods, spec.num_orders);
    if m == 0 || n == 0 {
        return Err(PlpError::InvalidParameter(
            "need at least one product and one period".into(),
        ));
    }
    if k < n * m {
        return Err(PlpError::InvalidParameter(format!(
            "k >= n * m required: every period needs an order per product ({k} < {})",
            n * m
        )));
    }
    if spec.avg_demand_per_order == 0 {
        return Err(PlpError::InvalidParameter(
            "average demand per order must be positive".into(),
        ));
    }
    let mut rng = rng_for(spec.seed);
    let orders_per_period = partition(
        PartitionSpec {
            total: k as u64,
            parts: n,
            min_value: m as u64,
        },
        &mut rng,
    )?;
    let mut cell_orders = Vec::with_capacity(n);
    for &count in &orders_per_period {
        cell_orders.push(partition(
            PartitionSpec {
                total: count,
                parts: m,
                min_value: 1,
            },
            &mut rng,
        )?);
    }
    // A product's per-period demand must cover its most crowded cell.
    let min_product_demand: Vec<u64> = (0..m)
        .map(|t| cell_orders.iter().map(|c| c[t]).max().unwrap_or(1))
        .collect();
    let floor: u64 = min_product_demand.iter().sum();

    let nominal = k as f64 * spec.avg_demand_per_order as f64 / n as f64;
    let planned = ((nominal * rng.gen_range(0.9..=1.1)).round() as u64)
        .max((n * m) as u64)
        .max(floor);
    let spread = partition(
        PartitionSpec {
            total: planned - floor,
            parts: m,
            min_value: 0,
        },
        &mut rng,
    )?;
    let product_demand: Vec<u64> = spread
        .iter()
        .zip(&min_product_demand)
        .map(|(s, f)| s + f)
        .collect();

    let block = k.div_ceil(n) as u32 + 1;
    let mut rows: Vec<(u64, u32, usize, usize)> = Vec::with_capacity(k);
    for (period, cells) in cell_orders.iter().enumerate() {
        // Later periods get strictly lower priorities, so nothing is inverted.
        let low = (n - 1 - period) as u32 * block + 1;
        for (t, &count) in cells.iter().enumerate() {
            let demands = partition(
                PartitionSpec {
                    total: product_demand[t],
                    parts: count as usize,
                    min_value: 1,
                },
                &mut rng,
            )?;
            for d in demands {
                rows.push((d, rng.gen_range(low..low + block), t, period));
            }
        }
    }
    rows.shuffle(&mut rng);
    let products = (0..m)
        .map(|t| Product {
            name: product_name(t, &mut rng),
            capacity: (1.3 * product_demand[t] as f64).ceil(),
        })
        .collect();
    let orders = rows
        .iter()
        .enumerate()
        .map(|(j, &(demand, priority, product, _))| Order {
            id: j as u64 + 1,
            demand,
            priority,
            product,
        })
        .collect();
    let certificate = Solution::new(rows.iter().map(|r| r.3).collect());
    Ok(GeneratedInstance {
        instance: Instance {
            orders,
            num_periods: n,
            products,
            capacity_total: (1.3 * planned as f64).ceil(),
            weights: Weights::default(),
        },
        certificate: Some(certificate),
        generator: GeneratorInfo {
            kind: "perfect".into(),
            version: GENERATOR_VERSION,
            rng: RNG_ID.into(),
            params: serde_json::to_value(spec)?,
        },
    })
}

/// Generates a practice-like instance: each product draws its demands from a
/// small set of allowed values.
pub fn generate_random(spec: &RandomSpec) -> Result<GeneratedInstance> {
    let (k, n, m) = (spec.num_orders, spec.num_periods, spec.num_products);
    if k == 0 || n == 0 || m == 0 {
        return Err(PlpError::InvalidParameter(
            "orders, periods and products must all be at least 1".into(),
        ));
    }
    let mut rng = rng_for(spec.seed);
    let per_product = partition(
        PartitionSpec {
            total: k as u64,
            parts: m,
            min_value: u64::from(k >= m),
        },
        &mut rng,
    )?;
    let max_priority = rng.gen_range(1..=3 * n as u32);

    let mut orders = Vec::with_capacity(k);
    let mut demand_by_product = vec![0u64; m];
    for (t, &count) in per_product.iter().enumerate() {
        let upper = rng.gen_range(1000..=5000u64);
        let allowed_count = rng.gen_range(1..=50usize);
        let allowed: Vec<u64> = (0..allowed_count).map(|_| rng.gen_range(1..=upper)).collect();
        for _ in 0..count {
            let demand = *allowed.choose(&mut rng).expect("non-empty");
            demand_by_product[t] += demand;
            orders.push(Order {
                id: orders.len() as u64 + 1,
                demand,
                priority: rng.gen_range(0..max_priority),
                product: t,
            });
        }
    }
    let total: u64 = demand_by_product.iter().sum();
    let products = demand_by_product
        .iter()
        .enumerate()
        .map(|(t, &d)| Product {
            name: product_name(t, &mut rng),
            capacity: (1.5 * d as f64 / n as f64).ceil().max(1.0),
        })
        .collect();
    Ok(GeneratedInstance {
        instance: Instance {
            orders,
            num_periods: n,
            products,
            capacity_total: (1.2 * total as f64 / n as f64).ceil(),
            weights: Weights::default(),
        },
        certificate: None,
        generator: GeneratorInfo {
            kind: "random".into(),
            version: GENERATOR_VERSION,
            rng: RNG_ID.into(),
            params: serde_json::to_value(spec)?,
        },
    })
}

/// Bin packing with `bins` bins of size `capacity` as a leveling instance:
/// one product, one order per item, equal priorities, `c = c_1 = capacity`.
/// A violation-free assignment exists iff the items can be packed.
pub fn reduce_bin_packing(bins: usize, capacity: u64, items: &[u64]) -> Result<Instance> {
    if bins == 0 || capacity == 0 {
        return Err(PlpError::InvalidParameter(
            "bin count and capacity must be at least 1".into(),
        ));
    }
    if items.is_empty() || items.contains(&0) {
        return Err(PlpError::InvalidParameter(
            "items must be non-empty and every size at least 1".into(),
        ));
    }
    Ok(Instance {
        orders: items
            .iter()
            .enumerate()
            .map(|(j, &a)| Order {
                id: j as u64 + 1,
                demand: a,
                priority: 1,
                product: 0,
            })
            .collect(),
        num_periods: bins,
        products: vec![Product {
            name: "bin".into(),
            capacity: capacity as f64,
        }],
        capacity_total: capacity as f64,
        weights: Weights::default(),
    })
}
