//! Production leveling: assign orders to periods so that total and
//! per-product loads stay level, capacities hold and high-priority orders
//! are not planned after low-priority ones.
//!
//! ```
//! use plp_core::{evaluate, greedy_construct, GreedyConfig, Objective};
//! use plp_core::generate::{generate_perfect, PerfectSpec};
//!
//! let g = generate_perfect(&PerfectSpec {
//!     num_products: 2,
//!     num_periods: 4,
//!     num_orders: 40,
//!     avg_demand_per_order: 25,
//!     seed: 1,
//! })
//! .unwrap();
//! let start = greedy_construct(&g.instance, &GreedyConfig::default()).unwrap();
//! let value = evaluate(&g.instance, &start, Objective::Absolute).unwrap();
//! assert!(value.total >= 0.0);
//! ```

pub mod construct;
pub mod delta;
pub mod error;
pub mod exact;
pub mod generate;
pub mod io;
pub mod model;
pub mod objective;
pub mod search;

pub use construct::{greedy_construct, GreedyConfig};
pub use delta::{EvaluationState, Move, MoveKind};
pub use error::{PlpError, Result};
pub use exact::{export_mip, optimality_gap, solve_exact, MipExportOptions, OracleConfig, OracleResult};
pub use model::{
    ensure_valid, validate_instance, Diagnostic, Instance, Objective, Order, Product, Solution,
    Weights,
};
pub use objective::{count_inversions, evaluate, max_inversions, ObjectiveBreakdown};
pub use search::{
    simulated_annealing, vnd, Exploration, Neighborhood, SaConfig, SearchTrace, StopReason,
    VndConfig,
};
