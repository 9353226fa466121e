//! Scaled fluctuation and synchronization processes built from ensembles,
//! with their per-replication limit covariances.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::vt::{v_t, LimitTheorem, VtSpec};
use crate::ensemble::{fluct_index, time_window_index, EnsembleResult};
use crate::error::{Error, Result};
use crate::rng::{RandomStream, StreamDomain};

/// Samples of a scaled process on a time grid, one row per replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledProcess {
    pub spec: VtSpec,
    pub times: Vec<f64>,
    /// `values[rep][k]` is the sample at `times[k]`.
    pub values: Vec<Vec<f64>>,
    /// Plug-in limit used for V_t in each replication.
    pub z_hat: Vec<f64>,
    /// For the fluctuation process centred at Z_T instead of Z: T / n.
    pub plugin_tau: Option<f64>,
}

impl ScaledProcess {
    pub fn replications(&self) -> usize {
        self.values.len()
    }

    /// Column k across replications.
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[k]).collect()
    }

    /// Limit covariance of the samples at times[j] and times[k] in replication `rep`.
    ///
    /// Centring the fluctuation process at Z_T = Z_{n tau} rather than at Z
    /// subtracts (t / tau)^{2gamma-1} X_tau from X_t; with V_t proportional to
    /// t^{2gamma-1} the covariance becomes V_{min} (1 - (max / tau)^{2gamma-1}).
    pub fn limit_covariance(&self, rep: usize, j: usize, k: usize) -> Result<f64> {
        let (s, t) = (self.times[j].min(self.times[k]), self.times[j].max(self.times[k]));
        let v = v_t(&self.spec.with_z(self.z_hat[rep]), s)?;
        Ok(match self.plugin_tau {
            Some(tau) => v * (1.0 - (t / tau).powf(2.0 * self.spec.gamma - 1.0)),
            None => v,
        })
    }

    /// Limit variance at times[k] for each replication.
    pub fn limit_variances(&self, k: usize) -> Result<Vec<f64>> {
        (0..self.replications())
            .map(|rep| self.limit_covariance(rep, k, k))
            .collect()
    }
}

/// Grid indices and scales of the requested times for `spec` at base time n.
fn indices(spec: &VtSpec, n: u64, times: &[f64]) -> Vec<u64> {
    times
        .iter()
        .map(|t| match spec.theorem {
            LimitTheorem::FluctZ => fluct_index(n, *t),
            _ => time_window_index(n, spec.gamma, *t),
        })
        .collect()
}

/// Grid steps an ensemble must record to build the process for `spec`.
pub fn required_steps(spec: &VtSpec, n: u64, times: &[f64]) -> Vec<u64> {
    indices(spec, n, times)
}

/// Builds the scaled process selected by `spec.theorem` at base time `n`.
///
/// The rho = 1 limits use each replication's value of Z at the last grid step
/// as plug-in for Z; the q limits use q.
pub fn scaled_process(result: &EnsembleResult, spec: &VtSpec, n: u64, times: &[f64]) -> Result<ScaledProcess> {
    spec.check_admissible()?;
    if times.is_empty() {
        return Err(Error::InvalidInput("no times requested".into()));
    }
    if spec.theorem == LimitTheorem::FluctZ && times.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidInput("fluctuation times must be positive".into()));
    }
    let idx: Vec<usize> = indices(spec, n, times)
        .into_iter()
        .map(|m| result.grid_index(m))
        .collect::<Result<_>>()?;
    let last = result.grid_len() - 1;
    let scales: Vec<f64> = times.iter().map(|t| spec.process_scale(n, *t)).collect();
    let mut values = Vec::with_capacity(result.replications as usize);
    let mut z_hat = Vec::with_capacity(result.replications as usize);
    for snaps in result.replication_iter() {
        let z_end = snaps[last].z_bar;
        let row = idx
            .iter()
            .zip(&scales)
            .map(|(&g, scale)| {
                let s = &snaps[g];
                let raw = match spec.theorem {
                    LimitTheorem::FluctZ => s.z_bar - z_end,
                    LimitTheorem::FluctQ => s.z_bar - spec.q,
                    LimitTheorem::SyncRho1 | LimitTheorem::SyncQ => s.lead_dev,
                };
                scale * raw
            })
            .collect();
        values.push(row);
        z_hat.push(match spec.theorem {
            LimitTheorem::FluctZ | LimitTheorem::SyncRho1 => z_end,
            _ => spec.q,
        });
    }
    let plugin_tau = match spec.theorem {
        LimitTheorem::FluctZ => {
            let tau = result.grid[last] as f64 / n as f64;
            if times.iter().any(|t| *t >= tau) {
                return Err(Error::GridMismatch(format!(
                    "fluctuation times must precede the plug-in horizon tau = {tau}"
                )));
            }
            Some(tau)
        }
        _ => None,
    };
    Ok(ScaledProcess {
        spec: *spec,
        times: times.to_vec(),
        values,
        z_hat,
        plugin_tau,
    })
}

/// t^{2gamma-1} n^{gamma-1/2} (Z_{floor(nt)} - Z_T).
pub fn scaled_fluct_process(result: &EnsembleResult, spec: &VtSpec, n: u64, times: &[f64]) -> Result<ScaledProcess> {
    if spec.theorem != LimitTheorem::FluctZ {
        return Err(Error::InvalidInput("expected a fluctuation spec".into()));
    }
    scaled_process(result, spec, n, times)
}

/// Scaled Z_m(1) - Z_m at m = floor(n + n^gamma t) (rho = 1 or rho < 1 variant).
pub fn scaled_sync_process(result: &EnsembleResult, spec: &VtSpec, n: u64, times: &[f64]) -> Result<ScaledProcess> {
    if !matches!(spec.theorem, LimitTheorem::SyncRho1 | LimitTheorem::SyncQ) {
        return Err(Error::InvalidInput("expected a synchronization spec".into()));
    }
    scaled_process(result, spec, n, times)
}

/// Scaled Z_m - q at m = floor(n + n^gamma t).
pub fn scaled_q_process(result: &EnsembleResult, spec: &VtSpec, n: u64, times: &[f64]) -> Result<ScaledProcess> {
    if spec.theorem != LimitTheorem::FluctQ {
        return Err(Error::InvalidInput("expected a q-fluctuation spec".into()));
    }
    scaled_process(result, spec, n, times)
}

/// Draws `replications` paths of W_{V_t} directly: each replication takes its
/// plug-in limit from `z_hat` and accumulates independent Gaussian increments
/// with variances V_{t_k} - V_{t_{k-1}}.
pub fn simulate_time_changed_wiener(
    spec: &VtSpec,
    times: &[f64],
    z_hat: &[f64],
    master_seed: u64,
) -> Result<ScaledProcess> {
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("times must be strictly increasing".into()));
    }
    let mut values = Vec::with_capacity(z_hat.len());
    for (rep, z) in z_hat.iter().enumerate() {
        let s = spec.with_z(*z);
        let mut rng = RandomStream::for_domain(StreamDomain::Synthetic, master_seed, rep as u64);
        let mut w = 0.0;
        let mut prev = 0.0;
        let mut row = Vec::with_capacity(times.len());
        for t in times {
            let v = v_t(&s, *t)?;
            let xi: f64 = StandardNormal.sample(rng.rng_mut());
            w += (v - prev).max(0.0).sqrt() * xi;
            prev = v;
            row.push(w);
        }
        values.push(row);
    }
    Ok(ScaledProcess {
        spec: *spec,
        times: times.to_vec(),
        values,
        z_hat: z_hat.to_vec(),
        plugin_tau: None,
    })
}
