//! Deterministic moment recursions for the pure-reinforcement case and the
//! contraction sequence x_{n+1} = (1 - a r_n) x_n + K r_n^2.

use std::io::Write;

use crate::error::Result;
use crate::model::StepSchedule;

/// x_0, ..., x_horizon with x_{n+1} = (1 - r_n^2) x_n, where x_n = 1/4 - Var[Z_n]
/// for a single walk with rho = 1 and alpha = 0.
pub fn variance_recursion_alpha0(x0: f64, schedule: &StepSchedule, horizon: u64) -> Result<Vec<f64>> {
    let rates = schedule.materialize(horizon)?;
    let mut out = Vec::with_capacity(rates.len() + 1);
    let mut x = x0;
    out.push(x);
    for r in rates {
        x *= 1.0 - r * r;
        out.push(x);
    }
    Ok(out)
}

/// x_0 prod_{k<n} (1 - r_k^2), evaluated as x_0 exp(sum ln(1 - r_k^2)).
pub fn variance_product_alpha0(x0: f64, schedule: &StepSchedule, n: u64) -> Result<f64> {
    let log_sum: f64 = schedule
        .materialize(n)?
        .iter()
        .map(|r| (-r * r).ln_1p())
        .sum();
    Ok(x0 * log_sum.exp())
}

/// Envelopes for x_n = 1/4 - Var[Z_n] with N interacting walkers and rho = 1:
/// the lower chain contracts by (1 - r_n^2 / N) and the upper chain by
/// (1 - C r_n^2) with C = (1 - (1 - alpha)^2) / N.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceEnvelope {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

pub fn variance_bounds_interacting(
    x0: f64,
    schedule: &StepSchedule,
    alpha: f64,
    n_walkers: usize,
    horizon: u64,
) -> Result<VarianceEnvelope> {
    let rates = schedule.materialize(horizon)?;
    let n = n_walkers as f64;
    let c = (1.0 - (1.0 - alpha).powi(2)) / n;
    let mut lower = Vec::with_capacity(rates.len() + 1);
    let mut upper = Vec::with_capacity(rates.len() + 1);
    let (mut lo, mut hi) = (x0, x0);
    lower.push(lo);
    upper.push(hi);
    for r in rates {
        lo *= 1.0 - r * r / n;
        hi *= 1.0 - c * r * r;
        lower.push(lo);
        upper.push(hi);
    }
    Ok(VarianceEnvelope { lower, upper })
}

/// x_0, ..., x_horizon of x_{n+1} = (1 - a r_n) x_n + K r_n^2.
pub fn lemma_a1_iterate(
    a: f64,
    schedule: &StepSchedule,
    k_bound: f64,
    x0: f64,
    horizon: u64,
) -> Result<Vec<f64>> {
    let rates = schedule.materialize(horizon)?;
    let mut out = Vec::with_capacity(rates.len() + 1);
    let mut x = x0;
    out.push(x);
    for r in rates {
        x = (1.0 - a * r) * x + k_bound * r * r;
        out.push(x);
    }
    Ok(out)
}

/// Rows `n,<column>` for a recursion output.
pub fn write_sequence_csv<W: Write>(column: &str, values: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", column])?;
    for (n, v) in values.iter().enumerate() {
        w.write_record([n.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
