//! Balanced two-colour urns with reinforcement matrices c_n A.
//!
//! Colour 1 plays the role of state 1: the walk tracks the proportion of
//! colour-1 balls, and drawing colour y adds c_n A(y, x) balls of colour x.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{kernel_decompose, InitialLaw, KernelSpec, ModelParams, StepSchedule};
use crate::rng::RandomStream;

/// The scale factors c_n of A_n = c_n A.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScaleRule {
    /// c_n = c.
    Constant { c: f64 },
    /// c_n = (n + 1)^exponent.
    PowerGrowth { exponent: f64 },
    /// c_n = exp(n^beta), 0 < beta < 1.
    ExpPower { beta: f64 },
}

impl ScaleRule {
    /// c_n / c_{n+1}, computed without forming c_n itself.
    fn ratio(&self, n: u64) -> f64 {
        let x = n as f64;
        match self {
            ScaleRule::Constant { .. } => 1.0,
            ScaleRule::PowerGrowth { exponent } => ((x + 1.0) / (x + 2.0)).powf(*exponent),
            ScaleRule::ExpPower { beta } => (x.powf(*beta) - (x + 1.0).powf(*beta)).exp(),
        }
    }

    fn first(&self) -> f64 {
        match self {
            ScaleRule::Constant { c } => *c,
            ScaleRule::PowerGrowth { .. } => 1.0,
            ScaleRule::ExpPower { .. } => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UrnSpec {
    /// A(y, x): balls of colour x added after drawing colour y.
    pub base_matrix: [[u64; 2]; 2],
    pub scale: ScaleRule,
    /// N(0), the initial number of balls.
    pub initial_total: u64,
    /// Initial number of colour-1 balls; defaults to half of `initial_total`.
    #[serde(default)]
    pub initial_color1: Option<u64>,
}

/// Walk-side description of an urn: gains, kernel decomposition and Z_0.
#[derive(Debug, Clone, PartialEq)]
pub struct UrnMapping {
    pub schedule: StepSchedule,
    pub rho: f64,
    /// `None` for rho = 1, where q does not enter the dynamics.
    pub q: Option<f64>,
    pub z0: f64,
}

impl UrnSpec {
    pub fn polya(initial_total: u64) -> Self {
        Self {
            base_matrix: [[1, 0], [0, 1]],
            scale: ScaleRule::Constant { c: 1.0 },
            initial_total,
            initial_color1: None,
        }
    }

    pub fn friedman(a: u64, b: u64, initial_total: u64) -> Self {
        Self {
            base_matrix: [[a, b], [b, a]],
            scale: ScaleRule::Constant { c: 1.0 },
            initial_total,
            initial_color1: None,
        }
    }

    /// The common row sum A-bar.
    pub fn row_sum(&self) -> u64 {
        self.base_matrix[0][0] + self.base_matrix[0][1]
    }

    pub fn initial_color1(&self) -> u64 {
        self.initial_color1.unwrap_or(self.initial_total / 2)
    }

    pub fn validate(&self) -> Result<()> {
        let [r0, r1] = self.base_matrix;
        if r0[0] + r0[1] != r1[0] + r1[1] {
            return Err(Error::InvalidUrn(format!(
                "rows of A must have equal sums, got {} and {}",
                r0[0] + r0[1],
                r1[0] + r1[1]
            )));
        }
        if self.row_sum() == 0 {
            return Err(Error::InvalidUrn("A must add at least one ball".into()));
        }
        if self.initial_total == 0 {
            return Err(Error::InvalidUrn("initial_total must be positive".into()));
        }
        if self.initial_color1() > self.initial_total {
            return Err(Error::InvalidUrn("initial_color1 exceeds initial_total".into()));
        }
        match self.scale {
            ScaleRule::Constant { c } if !(c.is_finite() && c > 0.0) => {
                Err(Error::InvalidUrn(format!("constant scale must be > 0, got {c}")))
            }
            ScaleRule::PowerGrowth { exponent } if !exponent.is_finite() => {
                Err(Error::InvalidUrn("power growth exponent must be finite".into()))
            }
            ScaleRule::ExpPower { beta } if !(beta > 0.0 && beta < 1.0) => {
                Err(Error::InvalidUrn(format!("exp-power beta must lie in (0, 1), got {beta}")))
            }
            _ => Ok(()),
        }
    }

    /// K(0)(1) and K(1)(1) from the rows of A.
    pub fn kernel(&self) -> KernelSpec {
        let abar = self.row_sum() as f64;
        KernelSpec {
            k0_to_1: self.base_matrix[0][1] as f64 / abar,
            k1_to_1: self.base_matrix[1][1] as f64 / abar,
        }
    }

    /// r_n = c_n A-bar / (N(0) + A-bar sum_{k <= n} c_k) for n < horizon.
    ///
    /// Uses R_n = N(n) / (c_n A-bar), r_n = 1 / (R_n + 1) and
    /// R_{n+1} = (R_n + 1) c_n / c_{n+1}, which never forms c_n, so
    /// exponentially growing scales do not overflow.
    pub fn step_sizes(&self, horizon: u64) -> Result<Vec<f64>> {
        self.validate()?;
        let abar = self.row_sum() as f64;
        let mut ratio = self.initial_total as f64 / (abar * self.scale.first());
        let mut out = Vec::with_capacity(horizon as usize);
        for n in 0..horizon {
            out.push(1.0 / (ratio + 1.0));
            ratio = (ratio + 1.0) * self.scale.ratio(n);
        }
        Ok(out)
    }
}

/// Explicit schedule for the first `horizon` draws plus the kernel parameters.
pub fn urn_to_schedule(spec: &UrnSpec, horizon: u64) -> Result<UrnMapping> {
    if horizon == 0 {
        return Err(Error::InvalidUrn("horizon must be >= 1".into()));
    }
    let values = spec.step_sizes(horizon)?;
    let decomposition = kernel_decompose(spec.kernel())?;
    Ok(UrnMapping {
        schedule: StepSchedule::Explicit { values },
        rho: decomposition.rho,
        q: decomposition.q,
        z0: spec.initial_color1() as f64 / spec.initial_total as f64,
    })
}

impl UrnMapping {
    /// A single walk (N = 1) with the urn's gains and kernel.
    pub fn model_params(&self) -> Result<ModelParams> {
        ModelParams::new(
            1,
            self.rho,
            0.0,
            self.q.unwrap_or(0.5),
            self.schedule.clone(),
            InitialLaw::Deterministic {
                values: vec![self.z0],
            },
        )
    }
}

/// Draws balls from the urn with integer counts and returns the colour-1
/// proportion after each of `horizon` draws. Only constant integer scales
/// are supported, since other scales do not add whole balls.
pub fn simulate_urn(spec: &UrnSpec, horizon: u64, rng: &mut RandomStream) -> Result<Vec<f64>> {
    spec.validate()?;
    let c = match spec.scale {
        ScaleRule::Constant { c } if c.fract() == 0.0 => c as u64,
        _ => {
            return Err(Error::InvalidUrn(
                "direct simulation needs a constant integer scale".into(),
            ))
        }
    };
    let mut color1 = spec.initial_color1();
    let mut total = spec.initial_total;
    let mut out = Vec::with_capacity(horizon as usize);
    for _ in 0..horizon {
        // Pick a ball uniformly: balls 0..color1 have colour 1.
        let ball = (rng.uniform() * total as f64) as u64;
        let drawn = usize::from(ball < color1);
        color1 += c * spec.base_matrix[drawn][1];
        total += c * spec.row_sum();
        out.push(color1 as f64 / total as f64);
    }
    Ok(out)
}
