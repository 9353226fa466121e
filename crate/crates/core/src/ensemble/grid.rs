use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Steps at which replications are snapshotted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RecordingGrid {
    /// round(base_n * ratio^k) for k < count; repeated values are dropped.
    Geometric { base_n: u64, ratio: f64, count: usize },
    /// Literal steps, strictly increasing.
    ExplicitSteps { steps: Vec<u64> },
    /// floor(n + n^gamma t) for each t (floor(n + n t) when gamma = 1).
    TimeWindow {
        n: u64,
        gamma_exp: f64,
        t_grid: Vec<f64>,
    },
}

/// floor(n + n^gamma t), the time change of the synchronization limits.
pub fn time_window_index(n: u64, gamma: f64, t: f64) -> u64 {
    let nf = n as f64;
    let width = if gamma == 1.0 { nf } else { nf.powf(gamma) };
    (nf + width * t).floor() as u64
}

/// floor(n t), the time change of the fluctuation limits.
pub fn fluct_index(n: u64, t: f64) -> u64 {
    (n as f64 * t).floor() as u64
}

impl RecordingGrid {
    pub fn explicit(steps: Vec<u64>) -> Self {
        RecordingGrid::ExplicitSteps { steps }
    }

    /// Sorted union of the steps of several grids.
    pub fn merged(parts: &[RecordingGrid]) -> Result<Self> {
        let mut steps = Vec::new();
        for p in parts {
            steps.extend(p.steps()?);
        }
        steps.sort_unstable();
        steps.dedup();
        Ok(RecordingGrid::ExplicitSteps { steps })
    }

    /// The recorded step indices, strictly increasing.
    pub fn steps(&self) -> Result<Vec<u64>> {
        let steps = match self {
            RecordingGrid::Geometric {
                base_n,
                ratio,
                count,
            } => {
                if !(*ratio > 1.0) || *count == 0 {
                    return Err(Error::InvalidGrid(
                        "geometric grid needs ratio > 1 and count >= 1".into(),
                    ));
                }
                let mut steps: Vec<u64> = (0..*count)
                    .map(|k| (*base_n as f64 * ratio.powi(k as i32)).round() as u64)
                    .collect();
                steps.dedup();
                steps
            }
            RecordingGrid::ExplicitSteps { steps } => steps.clone(),
            RecordingGrid::TimeWindow {
                n,
                gamma_exp,
                t_grid,
            } => {
                if !(*gamma_exp > 0.0 && *gamma_exp <= 1.0) {
                    return Err(Error::InvalidGrid(format!(
                        "time window exponent must lie in (0, 1], got {gamma_exp}"
                    )));
                }
                if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                    return Err(Error::InvalidGrid("time window needs t >= 0".into()));
                }
                t_grid
                    .iter()
                    .map(|t| time_window_index(*n, *gamma_exp, *t))
                    .collect()
            }
        };
        if steps.is_empty() {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        if let Some(w) = steps.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(format!(
                "grid steps must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
        Ok(steps)
    }
}
