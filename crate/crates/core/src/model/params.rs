use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use super::schedule::StepSchedule;
use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Law of the initial configuration Z_0(1..N). Coordinates are sampled
/// independently, so every non-deterministic family is permutation invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialLaw {
    /// Fixed vector; a single value is broadcast to all walkers.
    Deterministic { values: Vec<f64> },
    /// Each coordinate Beta(a, a).
    SymmetricBeta { a: f64 },
    /// Each coordinate equals `lo` with probability `p`, otherwise `hi`.
    TwoPoint { p: f64, lo: f64, hi: f64 },
}

impl Default for InitialLaw {
    fn default() -> Self {
        InitialLaw::Deterministic { values: vec![0.5] }
    }
}

impl InitialLaw {
    pub fn validate(&self, n_walkers: usize) -> Result<()> {
        let in_unit = |x: f64| (0.0..=1.0).contains(&x);
        match self {
            InitialLaw::Deterministic { values } => {
                if values.len() != 1 && values.len() != n_walkers {
                    return Err(Error::InvalidParams(format!(
                        "initial values: expected 1 or {n_walkers} entries, got {}",
                        values.len()
                    )));
                }
                if values.iter().any(|v| !in_unit(*v)) {
                    return Err(Error::InvalidParams("initial values must lie in [0, 1]".into()));
                }
            }
            InitialLaw::SymmetricBeta { a } => {
                if !(a.is_finite() && *a > 0.0) {
                    return Err(Error::InvalidParams(format!("beta parameter must be > 0, got {a}")));
                }
            }
            InitialLaw::TwoPoint { p, lo, hi } => {
                if !in_unit(*p) || !in_unit(*lo) || !in_unit(*hi) {
                    return Err(Error::InvalidParams("two-point law needs p, lo, hi in [0, 1]".into()));
                }
            }
        }
        Ok(())
    }

    /// Mean of one coordinate.
    pub fn coordinate_mean(&self) -> f64 {
        match self {
            InitialLaw::Deterministic { values } => values.iter().sum::<f64>() / values.len() as f64,
            InitialLaw::SymmetricBeta { .. } => 0.5,
            InitialLaw::TwoPoint { p, lo, hi } => p * lo + (1.0 - p) * hi,
        }
    }

    /// E[Z_0 (1 - Z_0)] for the walker average Z_0 of `n_walkers` coordinates.
    pub fn mean_bernoulli_variance(&self, n_walkers: usize) -> f64 {
        let n = n_walkers as f64;
        match self {
            InitialLaw::Deterministic { values } => {
                let zbar = if values.len() == 1 {
                    values[0]
                } else {
                    values.iter().sum::<f64>() / n
                };
                zbar * (1.0 - zbar)
            }
            InitialLaw::SymmetricBeta { a } => {
                let var = 1.0 / (4.0 * (2.0 * a + 1.0));
                0.25 - var / n
            }
            InitialLaw::TwoPoint { p, lo, hi } => {
                let m = self.coordinate_mean();
                let var = p * (1.0 - p) * (hi - lo) * (hi - lo);
                m * (1.0 - m) - var / n
            }
        }
    }

    /// The standing assumptions of the limit theorems: permutation invariance,
    /// coordinate mean 1/2 and E[Z_0(1 - Z_0)] > 0.
    pub fn check_theorem_assumptions(&self, n_walkers: usize) -> Result<()> {
        self.validate(n_walkers)?;
        if let InitialLaw::Deterministic { values } = self {
            if values.windows(2).any(|w| w[0] != w[1]) {
                return Err(Error::InvalidParams(
                    "deterministic initial vector must have equal entries to be permutation invariant".into(),
                ));
            }
        }
        let mean = self.coordinate_mean();
        if (mean - 0.5).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!("initial coordinate mean is {mean}, not 1/2")));
        }
        if self.mean_bernoulli_variance(n_walkers) <= 0.0 {
            return Err(Error::InvalidParams("E[Z_0 (1 - Z_0)] must be positive".into()));
        }
        Ok(())
    }

    /// Draws Z_0. Deterministic laws consume no randomness.
    pub fn sample(&self, n_walkers: usize, rng: &mut RandomStream) -> Vec<f64> {
        match self {
            InitialLaw::Deterministic { values } => {
                if values.len() == 1 {
                    vec![values[0]; n_walkers]
                } else {
                    values.clone()
                }
            }
            InitialLaw::SymmetricBeta { a } => {
                let beta = Beta::new(*a, *a).expect("validated beta parameter");
                (0..n_walkers).map(|_| beta.sample(rng.rng_mut())).collect()
            }
            InitialLaw::TwoPoint { p, lo, hi } => (0..n_walkers)
                .map(|_| if rng.bernoulli(*p) { *lo } else { *hi })
                .collect(),
        }
    }
}

/// One dynamics instance: N walkers, kernel (rho, q), interaction alpha,
/// gain schedule and initial law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_walkers: usize,
    pub rho: f64,
    pub alpha: f64,
    /// Ignored by the dynamics when rho = 1.
    #[serde(default = "half")]
    pub q: f64,
    pub schedule: StepSchedule,
    #[serde(default)]
    pub initial: InitialLaw,
}

fn half() -> f64 {
    0.5
}

impl ModelParams {
    pub fn new(
        n_walkers: usize,
        rho: f64,
        alpha: f64,
        q: f64,
        schedule: StepSchedule,
        initial: InitialLaw,
    ) -> Result<Self> {
        let params = Self {
            n_walkers,
            rho,
            alpha,
            q,
            schedule,
            initial,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_walkers == 0 {
            return Err(Error::InvalidParams("n_walkers must be >= 1".into()));
        }
        for (name, v) in [("rho", self.rho), ("alpha", self.alpha), ("q", self.q)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParams(format!("{name} = {v} outside [0, 1]")));
            }
        }
        self.schedule.validate()?;
        self.initial.validate(self.n_walkers)
    }

    pub fn dynamics(&self) -> Dynamics {
        Dynamics {
            rho: self.rho,
            alpha: self.alpha,
            q: self.q,
        }
    }
}

/// The per-step constants of the update rule, detached from schedule and law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dynamics {
    pub rho: f64,
    pub alpha: f64,
    pub q: f64,
}

impl Dynamics {
    /// Moves every walker one step in place and returns the new average.
    ///
    /// Uniforms are consumed in walker order, one per walker. When `last_draw`
    /// is given it receives the draw of the final walker (walker 0 when N = 1).
    #[inline]
    pub fn advance(
        &self,
        z: &mut [f64],
        z_bar: f64,
        r: f64,
        rng: &mut RandomStream,
        last_draw: Option<&mut bool>,
    ) -> f64 {
        let keep = 1.0 - r;
        let own = 1.0 - self.alpha;
        let shared = self.alpha * z_bar;
        let q_part = (1.0 - self.rho) * self.q;
        let mut sum = 0.0;
        let mut draw = false;
        // rho = 1 must not read q at all, so trajectories are identical for every stored q.
        if self.rho == 1.0 {
            for zi in z.iter_mut() {
                draw = rng.uniform() < own * *zi + shared;
                *zi = keep * *zi + if draw { r } else { 0.0 };
                sum += *zi;
            }
        } else {
            for zi in z.iter_mut() {
                draw = rng.uniform() < own * *zi + shared;
                let target = if draw { self.rho + q_part } else { q_part };
                *zi = keep * *zi + r * target;
                sum += *zi;
            }
        }
        if let Some(out) = last_draw {
            *out = draw;
        }
        // A multiply keeps the per-step latency chain short; the result is within
        // one ulp of sum / N.
        sum * (1.0 / z.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schedule() -> StepSchedule {
        StepSchedule::power_law(0.5, 0.75)
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(ModelParams::new(0, 1.0, 0.5, 0.5, schedule(), InitialLaw::default()).is_err());
        assert!(ModelParams::new(2, 1.2, 0.5, 0.5, schedule(), InitialLaw::default()).is_err());
        assert!(ModelParams::new(2, 1.0, -0.1, 0.5, schedule(), InitialLaw::default()).is_err());
        assert!(ModelParams::new(2, 1.0, 0.5, 1.5, schedule(), InitialLaw::default()).is_err());
        assert!(ModelParams::new(2, 1.0, 0.5, 0.5, schedule(), InitialLaw::default()).is_ok());
    }

    #[test]
    fn initial_law_assumptions() {
        InitialLaw::default().check_theorem_assumptions(4).unwrap();
        InitialLaw::SymmetricBeta { a: 2.0 }.check_theorem_assumptions(3).unwrap();
        InitialLaw::TwoPoint { p: 0.5, lo: 0.2, hi: 0.8 }
            .check_theorem_assumptions(2)
            .unwrap();
        // Z_0 in {0, 1} for a single walker has E[Z_0(1-Z_0)] = 0.
        assert!(InitialLaw::TwoPoint { p: 0.5, lo: 0.0, hi: 1.0 }
            .check_theorem_assumptions(1)
            .is_err());
        assert!(InitialLaw::Deterministic { values: vec![0.4, 0.6] }
            .check_theorem_assumptions(2)
            .is_err());
        assert!(InitialLaw::Deterministic { values: vec![0.3] }
            .check_theorem_assumptions(2)
            .is_err());
    }

    #[test]
    fn beta_initial_law_has_mean_half() {
        let law = InitialLaw::SymmetricBeta { a: 1.5 };
        let mut rng = RandomStream::new(11, 0);
        let m = 200_000;
        let draws: Vec<f64> = (0..m).flat_map(|_| law.sample(1, &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / m as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m as f64;
        let se = (var / m as f64).sqrt();
        assert!((mean - 0.5).abs() < 4.0 * se);
        assert!((var - 1.0 / (4.0 * 4.0)).abs() < 0.002);
    }

    #[test]
    fn deterministic_law_broadcasts() {
        let mut rng = RandomStream::new(0, 0);
        assert_eq!(InitialLaw::default().sample(3, &mut rng), vec![0.5; 3]);
    }
}
