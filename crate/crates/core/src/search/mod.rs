//! Neighborhoods, exploration strategies and the two local search drivers.

mod annealing;
mod explore;
mod vnd;

use std::io::Write;
use std::time::Duration;

pub use annealing::{equivalent_schedule, metropolis_accept, simulated_annealing, SaConfig};
pub use explore::{Exploration, Explorer};
pub use vnd::{vnd, VndConfig};

use crate::model::Solution;
use crate::objective::ObjectiveBreakdown;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Neighborhood {
    /// Relocate one order to another period; `k * (n - 1)` neighbors.
    MoveOrder,
    /// Exchange the periods of two orders planned in different periods.
    SwapOrders,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// No neighborhood yields an improving move.
    LocalOptimum,
    /// Temperature dropped below the minimum.
    MinTemperature,
    TimeLimit,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub iteration: u64,
    pub temperature: f64,
    pub current: f64,
    pub best: f64,
    /// Violations of the best solution so far.
    pub violations: u64,
}

#[derive(Debug, Clone)]
pub struct SearchTrace {
    pub samples: Vec<TraceSample>,
    pub best: Solution,
    pub breakdown: ObjectiveBreakdown,
    pub iterations: u64,
    pub elapsed: Duration,
    pub stop: StopReason,
}

impl SearchTrace {
    pub const CSV_HEADER: &'static str = "iteration,temperature,current,best,violations";

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for s in &self.samples {
            writeln!(
                out,
                "{},{},{},{},{}",
                s.iteration, s.temperature, s.current, s.best, s.violations
            )?;
        }
        Ok(())
    }
}
