use thiserror::Error;

use crate::model::Diagnostic;

#[derive(Debug, Error)]
pub enum PlpError {
    #[error("solution has {got} entries but the instance has {expected} orders")]
    SolutionLength { expected: usize, got: usize },

    #[error("order {order} is assigned to period {period}, valid periods are 1..={num_periods}")]
    PeriodOutOfRange {
        order: usize,
        period: usize,
        num_periods: usize,
    },

    #[error("invalid instance: {}", format_diagnostics(.0))]
    InvalidInstance(Vec<Diagnostic>),

    #[error("invalid move: {0}")]
    InvalidMove(String),

    #[error("stale move: built at state generation {built}, state is at {current}")]
    StaleMove { built: u64, current: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot partition {total} into {parts} parts of at least {min_value}")]
    InfeasiblePartition {
        total: u64,
        parts: usize,
        min_value: u64,
    },

    #[error("optimality gap undefined: {0}")]
    GapUndefined(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PlpError {
    /// True for errors caused by bad user input, as opposed to internal failures.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, PlpError::Io(_) | PlpError::StaleMove { .. })
    }
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, PlpError>;
