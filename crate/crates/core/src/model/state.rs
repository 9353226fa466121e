use serde::{Deserialize, Serialize};

use super::params::ModelParams;
use super::schedule::step_size;
use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Configuration of the N walkers after `step` updates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkState {
    pub step: u64,
    pub z: Vec<f64>,
    pub z_bar: f64,
}

pub(crate) fn mean(z: &[f64]) -> f64 {
    z.iter().sum::<f64>() / z.len() as f64
}

impl WalkState {
    pub fn new(z: Vec<f64>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::InvalidInput("state needs at least one walker".into()));
        }
        if z.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidInput("walker states must lie in [0, 1]".into()));
        }
        let z_bar = mean(&z);
        Ok(Self { step: 0, z, z_bar })
    }

    /// Samples Z_0 from the initial law of `params`.
    pub fn initial(params: &ModelParams, rng: &mut RandomStream) -> Self {
        let z = params.initial.sample(params.n_walkers, rng);
        let z_bar = mean(&z);
        Self { step: 0, z, z_bar }
    }

    pub fn n_walkers(&self) -> usize {
        self.z.len()
    }

    /// (1 - alpha) Z_n(i) + alpha Z_n for each walker.
    pub fn draw_probabilities(&self, alpha: f64) -> Vec<f64> {
        self.z
            .iter()
            .map(|zi| ((1.0 - alpha) * zi + alpha * self.z_bar).clamp(0.0, 1.0))
            .collect()
    }

    /// One transition with freshly sampled draws, one uniform per walker in
    /// ascending walker order.
    pub fn step(&self, params: &ModelParams, rng: &mut RandomStream) -> Result<Self> {
        let r = step_size(&params.schedule, self.step)?;
        let mut z = self.z.clone();
        let z_bar = params.dynamics().advance(&mut z, self.z_bar, r, rng, None);
        Ok(Self {
            step: self.step + 1,
            z,
            z_bar,
        })
    }

    /// One transition with the draws I_{n+1}(i) given explicitly.
    pub fn apply_draws(&self, params: &ModelParams, draws: &[bool]) -> Result<Self> {
        if draws.len() != self.z.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} draws, got {}",
                self.z.len(),
                draws.len()
            )));
        }
        let r = step_size(&params.schedule, self.step)?;
        let z: Vec<f64> = self
            .z
            .iter()
            .zip(draws)
            .map(|(zi, &d)| {
                let x = if d { 1.0 } else { 0.0 };
                let target = if params.rho == 1.0 {
                    x
                } else {
                    params.rho * x + (1.0 - params.rho) * params.q
                };
                (1.0 - r) * zi + r * target
            })
            .collect();
        let z_bar = mean(&z);
        Ok(Self {
            step: self.step + 1,
            z,
            z_bar,
        })
    }

    /// Returns E[Z_{n+1} - q | F_n] and the factor multiplying Z_n(i) - Z_n in
    /// E[Z_{n+1}(i) - Z_{n+1} | F_n].
    pub fn conditional_mean_increments(&self, params: &ModelParams) -> Result<(f64, f64)> {
        let r = step_size(&params.schedule, self.step)?;
        let drift = (1.0 - (1.0 - params.rho) * r) * (self.z_bar - params.q);
        let factor = 1.0 - (1.0 - params.rho * (1.0 - params.alpha)) * r;
        Ok((drift, factor))
    }

    /// Conditional variances of Z_{n+1}(i) - Z_{n+1} for every i, and of Z_{n+1}.
    pub fn conditional_variances(&self, params: &ModelParams) -> Result<(Vec<f64>, f64)> {
        let r = step_size(&params.schedule, self.step)?;
        let n = self.z.len() as f64;
        let v: Vec<f64> = self
            .draw_probabilities(params.alpha)
            .into_iter()
            .map(|p| p * (1.0 - p))
            .collect();
        let total: f64 = v.iter().sum();
        let scale = r * r * params.rho * params.rho;
        let diff = v
            .iter()
            .map(|vi| {
                let others = total - vi;
                scale * ((1.0 - 1.0 / n).powi(2) * vi + others / (n * n))
            })
            .collect();
        Ok((diff, scale * total / (n * n)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{InitialLaw, StepSchedule};
    use approx::assert_relative_eq;

    fn params(n: usize, rho: f64, alpha: f64, q: f64, r: Vec<f64>) -> ModelParams {
        ModelParams::new(
            n,
            rho,
            alpha,
            q,
            StepSchedule::Explicit { values: r },
            InitialLaw::default(),
        )
        .unwrap()
    }

    #[test]
    fn draw_probability_examples() {
        let s = WalkState::new(vec![0.2, 0.6]).unwrap();
        let p = s.draw_probabilities(0.5);
        assert_relative_eq!(p[0], 0.3, epsilon = 1e-15);
        assert_relative_eq!(p[1], 0.5, epsilon = 1e-15);
        assert_eq!(s.draw_probabilities(0.0), vec![0.2, 0.6]);
        let p = s.draw_probabilities(1.0);
        assert_relative_eq!(p[0], 0.4, epsilon = 1e-15);
        assert_relative_eq!(p[1], 0.4, epsilon = 1e-15);
    }

    #[test]
    fn forced_draw_examples() {
        let s = WalkState::new(vec![0.5]).unwrap();
        let next = s.apply_draws(&params(1, 1.0, 0.0, 0.5, vec![0.1]), &[true]).unwrap();
        assert_relative_eq!(next.z[0], 0.55, epsilon = 1e-15);
        let next = s.apply_draws(&params(1, 0.5, 0.0, 0.5, vec![0.2]), &[false]).unwrap();
        assert_relative_eq!(next.z[0], 0.45, epsilon = 1e-15);
        assert_eq!(next.step, 1);
    }

    #[test]
    fn zero_is_absorbing_for_pure_reinforcement() {
        let p = params(2, 1.0, 0.3, 0.5, vec![0.4; 5]);
        let mut s = WalkState::new(vec![0.0, 0.0]).unwrap();
        let mut rng = RandomStream::new(3, 0);
        for _ in 0..5 {
            s = s.step(&p, &mut rng).unwrap();
        }
        assert_eq!(s.z, vec![0.0, 0.0]);
        assert_eq!(s.step, 5);
    }

    #[test]
    fn sampled_step_matches_forced_draws() {
        // Re-derive the draws from the same uniforms and replay them.
        let p = params(3, 0.7, 0.4, 0.3, vec![0.25]);
        let s = WalkState::new(vec![0.1, 0.5, 0.9]).unwrap();
        let mut rng = RandomStream::new(5, 2);
        let sampled = s.step(&p, &mut rng).unwrap();
        let mut replay = RandomStream::new(5, 2);
        let draws: Vec<bool> = s
            .draw_probabilities(0.4)
            .iter()
            .map(|pi| replay.uniform() < *pi)
            .collect();
        let forced = s.apply_draws(&p, &draws).unwrap();
        for (a, b) in sampled.z.iter().zip(&forced.z) {
            assert_relative_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn conditional_mean_examples() {
        let s = WalkState::new(vec![0.3, 0.7]).unwrap();
        let (drift, factor) = s
            .conditional_mean_increments(&params(2, 0.5, 0.5, 0.5, vec![0.1]))
            .unwrap();
        assert_relative_eq!(factor, 0.925, epsilon = 1e-15);
        assert_relative_eq!(drift, 0.0, epsilon = 1e-15);

        let s = WalkState::new(vec![0.8]).unwrap();
        let (drift, _) = s
            .conditional_mean_increments(&params(1, 0.0, 0.0, 0.5, vec![0.5]))
            .unwrap();
        assert_relative_eq!(drift, 0.15, epsilon = 1e-15);

        let (drift, _) = s
            .conditional_mean_increments(&params(1, 1.0, 0.0, 0.2, vec![0.5]))
            .unwrap();
        assert_relative_eq!(drift, 0.8 - 0.2, epsilon = 1e-15);
    }

    #[test]
    fn conditional_variance_single_walker_is_zero_for_difference() {
        let s = WalkState::new(vec![0.4]).unwrap();
        let (diff, total) = s
            .conditional_variances(&params(1, 1.0, 0.0, 0.5, vec![0.5]))
            .unwrap();
        assert_relative_eq!(diff[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(total, 0.25 * 0.24, epsilon = 1e-15);
    }
}
