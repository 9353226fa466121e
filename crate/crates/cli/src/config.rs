//! Run configuration: a TOML document with `[model]`, `[ensemble]`, `[grid]`,
//! `[verify]` and `[oracle]` tables. A manifest written by `irw simulate` is
//! accepted in place of a config file.

use std::path::Path;

use irw_core::ensemble::{read_manifest, EnsembleConfig, RecordingGrid};
use irw_core::model::{InitialLaw, ModelParams, StepSchedule};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    pub ensemble: EnsembleConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
}

/// A recording grid plus extra steps merged into it, typically a plug-in
/// horizon beyond a geometric grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    #[serde(flatten)]
    pub base: RecordingGrid,
    #[serde(default)]
    pub extra_steps: Vec<u64>,
}

impl GridConfig {
    pub fn resolve(&self, more: &[u64]) -> irw_core::Result<RecordingGrid> {
        let mut extra = self.extra_steps.clone();
        extra.extend_from_slice(more);
        if extra.is_empty() {
            return Ok(self.base.clone());
        }
        RecordingGrid::merged(&[self.base.clone(), RecordingGrid::explicit(extra)])
    }
}

/// Thresholds and settings of `irw verify` and `irw rates`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Significance level of the KS and chi-square tests.
    pub level: f64,
    /// Polarization: largest admissible 1/4 - Var[Z_T] when sum r_n^2 diverges.
    pub max_gap: f64,
    /// Convergence to q: largest admissible mean |Z_T - q|.
    pub q_tolerance: f64,
    /// Fixation: required fraction (or, for a control run, the ceiling).
    pub fixation_bound: f64,
    pub expect_fixation: bool,
    /// Synchronization: ceiling on the terminal mean square distance.
    pub max_sync_msq: f64,
    /// Rate fits use grid steps in [fit_window[0], fit_window[1]].
    pub fit_window: [u64; 2],
    pub slope_tolerance: f64,
    pub prefactor_tolerance: f64,
    /// Required gap between the convergence and synchronization slopes;
    /// a negative value disables the check.
    pub min_separation: f64,
    /// Base time n of the scaled processes.
    pub fclt_n: u64,
    pub times: Vec<f64>,
    pub covariance_times: Vec<f64>,
    pub max_covariance_error: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            level: 0.01,
            max_gap: 0.02,
            q_tolerance: 0.01,
            fixation_bound: 0.95,
            expect_fixation: true,
            max_sync_msq: 0.01,
            fit_window: [1_000, 100_000],
            slope_tolerance: 0.1,
            prefactor_tolerance: 0.15,
            min_separation: 0.15,
            fclt_n: 10_000,
            times: vec![0.5, 1.0, 2.0],
            covariance_times: vec![0.5, 1.0, 2.0, 4.0],
            max_covariance_error: 0.2,
        }
    }
}

/// Settings of `irw oracle` and of the enumeration check in `irw verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    /// Steps of the exact enumeration.
    pub horizon: u64,
    /// Steps of the variance recursions.
    pub recursion_horizon: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            horizon: 4,
            recursion_horizon: 10_000,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelParams {
                n_walkers: 8,
                rho: 1.0,
                alpha: 0.5,
                q: 0.5,
                schedule: StepSchedule::power_law_with_offset(1.0, 0.75, 2),
                initial: InitialLaw::default(),
            },
            ensemble: EnsembleConfig::new(1_000, 1),
            grid: GridConfig {
                base: RecordingGrid::Geometric {
                    base_n: 1_000,
                    ratio: 10f64.powf(0.2),
                    count: 11,
                },
                extra_steps: vec![1_000_000],
            },
            verify: VerifyConfig::default(),
            oracle: OracleConfig::default(),
        }
    }
}

impl RunConfig {
    /// Reads a TOML config, or a JSON manifest when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let config = if path.extension().is_some_and(|e| e == "json") {
            let manifest = read_manifest(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            match manifest.config {
                Some(value) => serde_json::from_value(value)
                    .map_err(|e| CliError::config(format!("{}: embedded config: {e}", path.display())))?,
                None => RunConfig {
                    model: manifest.params,
                    ensemble: EnsembleConfig::new(manifest.replications, manifest.master_seed),
                    grid: GridConfig {
                        base: RecordingGrid::explicit(manifest.grid),
                        extra_steps: Vec::new(),
                    },
                    ..RunConfig::default()
                },
            }
        } else {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?
        };
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.model.validate()?;
        if self.ensemble.replications == 0 {
            return Err(CliError::config("ensemble.replications must be >= 1"));
        }
        self.grid.resolve(&[])?.steps()?;
        let v = &self.verify;
        if !(v.level > 0.0 && v.level < 1.0) {
            return Err(CliError::config(format!("verify.level = {} outside (0, 1)", v.level)));
        }
        if v.fit_window[0] >= v.fit_window[1] {
            return Err(CliError::config("verify.fit_window must be increasing"));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string_pretty(self).map_err(|e| CliError::config(format!("cannot render config: {e}")))
    }
}
