use serde::{Deserialize, Serialize};

use crate::applications::urn::UrnSpec;
use crate::error::{Error, Result};

/// Upper clamp `1 - EPSILON_GUARD` applied to power-law steps so r_n < 1 always.
pub const EPSILON_GUARD: f64 = 1e-9;

fn default_offset() -> u64 {
    1
}

fn default_graph_start() -> u64 {
    2
}

/// The deterministic gain sequence r_n driving every walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSchedule {
    /// r_n = c / (n + offset)^gamma, so n^gamma r_n -> c.
    ///
    /// Validation rejects c / offset^gamma >= 1 unless `clamp` is set, in which
    /// case early steps are capped at `1 - EPSILON_GUARD`.
    PowerLaw {
        c: f64,
        gamma: f64,
        #[serde(default = "default_offset")]
        offset: u64,
        #[serde(default)]
        clamp: bool,
    },
    /// Literal r_0, r_1, ...
    Explicit { values: Vec<f64> },
    /// Balanced urn with reinforcement c_n A.
    UrnDerived { urn: UrnSpec },
    /// Opinion dynamics driven by the hub of a preferential-attachment graph.
    ///
    /// `max_degrees[k]` is the maximal degree of the graph at graph time
    /// `start_time + k`; walk step k uses r = lambda * d_max / (start_time + k + 1).
    GraphDerived {
        lambda: f64,
        max_degrees: Vec<u64>,
        #[serde(default = "default_graph_start")]
        start_time: u64,
    },
}

/// Whether sum r_n^2 diverges, which decides polarization for rho = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SquareSummability {
    Divergent,
    Convergent,
    Unknown,
}

impl StepSchedule {
    pub fn power_law(c: f64, gamma: f64) -> Self {
        StepSchedule::PowerLaw {
            c,
            gamma,
            offset: 1,
            clamp: false,
        }
    }

    pub fn power_law_with_offset(c: f64, gamma: f64, offset: u64) -> Self {
        StepSchedule::PowerLaw {
            c,
            gamma,
            offset,
            clamp: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            StepSchedule::PowerLaw {
                c,
                gamma,
                offset,
                clamp,
            } => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::InvalidSchedule(format!("power law needs c > 0, got {c}")));
                }
                if !(*gamma > 0.0 && *gamma <= 1.0) {
                    return Err(Error::InvalidSchedule(format!(
                        "power law needs gamma in (0, 1], got {gamma}"
                    )));
                }
                if *offset < 1 {
                    return Err(Error::InvalidSchedule("power law offset must be >= 1".into()));
                }
                let r0 = c / (*offset as f64).powf(*gamma);
                if r0 >= 1.0 && !clamp {
                    return Err(Error::InvalidSchedule(format!(
                        "c / offset^gamma = {r0} >= 1; raise the offset or enable clamp"
                    )));
                }
                Ok(())
            }
            StepSchedule::Explicit { values } => {
                if let Some((i, v)) = values
                    .iter()
                    .enumerate()
                    .find(|(_, v)| !(**v >= 0.0 && **v < 1.0))
                {
                    return Err(Error::InvalidSchedule(format!(
                        "explicit r_{i} = {v} outside [0, 1)"
                    )));
                }
                Ok(())
            }
            StepSchedule::UrnDerived { urn } => urn.validate(),
            StepSchedule::GraphDerived {
                lambda,
                max_degrees,
                start_time,
            } => {
                if !(*lambda > 0.0 && *lambda < 1.0) {
                    return Err(Error::InvalidSchedule(format!(
                        "graph lambda must lie in (0, 1), got {lambda}"
                    )));
                }
                if *start_time < 2 {
                    return Err(Error::InvalidSchedule("graph time starts at n = 2".into()));
                }
                for (k, d) in max_degrees.iter().enumerate() {
                    let n = start_time + k as u64;
                    if *d == 0 || *d >= n {
                        return Err(Error::InvalidSchedule(format!(
                            "max degree {d} at graph time {n} is not in [1, n-1]"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Number of defined steps, `None` for unbounded schedules.
    pub fn len(&self) -> Option<u64> {
        match self {
            StepSchedule::PowerLaw { .. } | StepSchedule::UrnDerived { .. } => None,
            StepSchedule::Explicit { values } => Some(values.len() as u64),
            StepSchedule::GraphDerived { max_degrees, .. } => Some(max_degrees.len() as u64),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// (c, gamma) when the schedule is a power law.
    pub fn power_law_params(&self) -> Option<(f64, f64)> {
        match self {
            StepSchedule::PowerLaw { c, gamma, .. } => Some((*c, *gamma)),
            _ => None,
        }
    }

    pub fn square_summability(&self) -> SquareSummability {
        match self {
            StepSchedule::PowerLaw { gamma, .. } if *gamma <= 0.5 => SquareSummability::Divergent,
            StepSchedule::PowerLaw { .. } => SquareSummability::Convergent,
            _ => SquareSummability::Unknown,
        }
    }

    /// r_0, ..., r_{horizon-1}.
    pub fn materialize(&self, horizon: u64) -> Result<Vec<f64>> {
        if let Some(len) = self.len() {
            if horizon > len {
                return Err(Error::ScheduleExhausted {
                    index: horizon - 1,
                    available: len,
                });
            }
        }
        match self {
            StepSchedule::UrnDerived { urn } => urn.step_sizes(horizon),
            _ => (0..horizon).map(|n| step_size(self, n)).collect(),
        }
    }
}

/// r_n for the given schedule.
pub fn step_size(schedule: &StepSchedule, n: u64) -> Result<f64> {
    match schedule {
        StepSchedule::PowerLaw {
            c, gamma, offset, ..
        } => {
            let r = c / ((n + offset) as f64).powf(*gamma);
            Ok(r.min(1.0 - EPSILON_GUARD))
        }
        StepSchedule::Explicit { values } => {
            values
                .get(n as usize)
                .copied()
                .ok_or(Error::ScheduleExhausted {
                    index: n,
                    available: values.len() as u64,
                })
        }
        StepSchedule::UrnDerived { urn } => {
            let rates = urn.step_sizes(n + 1)?;
            Ok(rates[n as usize])
        }
        StepSchedule::GraphDerived {
            lambda,
            max_degrees,
            start_time,
        } => {
            let d = max_degrees.get(n as usize).ok_or(Error::ScheduleExhausted {
                index: n,
                available: max_degrees.len() as u64,
            })?;
            Ok(crate::applications::graph::hub_rate(*lambda, *d, start_time + n))
        }
    }
}
