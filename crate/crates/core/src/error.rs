use thiserror::Error;

/// Errors raised by the simulation, oracle and verification layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("step-size schedule exhausted: index {index} requested, {available} values available")]
    ScheduleExhausted { index: u64, available: u64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("kernel not representable as rho*delta_y + (1-rho)*q: K(1)(1)={k1_to_1} < K(0)(1)={k0_to_1} gives rho < 0")]
    KernelNotRepresentable { k0_to_1: f64, k1_to_1: f64 },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid urn: {0}")]
    InvalidUrn(String),

    #[error("invalid recording grid: {0}")]
    InvalidGrid(String),

    #[error("grid does not cover the requested index: {0}")]
    GridMismatch(String),

    #[error("inadmissible limit-variance spec: {0}")]
    Inadmissible(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
