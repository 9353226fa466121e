//! Decay rates of the synchronization and convergence mean squares for
//! rho = 1, fitted on a window of the recording grid.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::regression::{
    fixed_slope_prefactor, rate_regression, truncated_fixed_prefactor, truncated_power_fit, RateFit,
    TruncatedPowerFit,
};
use super::report::TestReport;
use crate::ensemble::{moment_stream, EnsembleResult, MomentRecord};
use crate::error::{Error, Result};

/// Theoretical rates and constants of the two mean squares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTheory {
    /// E[(Z_n(i) - Z_n)^2] ~ sync_prefactor n^{sync_slope}.
    pub sync_slope: f64,
    pub sync_prefactor: f64,
    /// E[(Z_n - Z)^2] ~ conv_prefactor n^{conv_slope}.
    pub conv_slope: f64,
    pub conv_prefactor: f64,
}

impl RateTheory {
    /// Constants for E[Z(1 - Z)] = `bernoulli_variance`. For gamma < 1 the
    /// synchronization constant is (1 - 1/N) c E / (2 alpha) at rate n^{-gamma}
    /// and the convergence constant c^2 E / (N (2 gamma - 1)) at rate
    /// n^{-(2 gamma - 1)}. For gamma = 1 both decay like 1/n, with constants
    /// (1 - 1/N) c^2 E / (2 c alpha - 1) and c^2 E / N.
    pub fn new(c: f64, gamma: f64, alpha: f64, n_walkers: usize, bernoulli_variance: f64) -> Result<Self> {
        let n = n_walkers as f64;
        let e = bernoulli_variance;
        if !(gamma > 0.5 && gamma <= 1.0) {
            return Err(Error::Inadmissible(format!("rates need 1/2 < gamma <= 1, got {gamma}")));
        }
        if gamma < 1.0 {
            Ok(Self {
                sync_slope: -gamma,
                sync_prefactor: (1.0 - 1.0 / n) * c * e / (2.0 * alpha),
                conv_slope: -(2.0 * gamma - 1.0),
                conv_prefactor: c * c * e / (n * (2.0 * gamma - 1.0)),
            })
        } else {
            if !(2.0 * c * alpha > 1.0) {
                return Err(Error::Inadmissible("gamma = 1 requires 2 c alpha > 1".into()));
            }
            Ok(Self {
                sync_slope: -1.0,
                sync_prefactor: (1.0 - 1.0 / n) * c * c * e / (2.0 * c * alpha - 1.0),
                conv_slope: -1.0,
                conv_prefactor: c * c * e / n,
            })
        }
    }
}

/// Fitted decay of both mean squares on the grid window [n_min, n_max].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateAnalysis {
    pub window: (u64, u64),
    /// Last grid step, whose Z_T is the plug-in for Z.
    pub horizon: u64,
    pub mean_bernoulli_variance: f64,
    pub theory: RateTheory,
    pub sync_fit: RateFit,
    pub sync_prefactor: f64,
    /// Fit of E[(Z_n - Z_T)^2] = A (n^{-beta} - T^{-beta}).
    pub conv_fit: TruncatedPowerFit,
    pub conv_prefactor: f64,
    pub moments: Vec<MomentRecord>,
}

impl RateAnalysis {
    pub fn conv_slope(&self) -> f64 {
        -self.conv_fit.beta
    }

    /// `n,sync_msq,conv_msq,sync_fit,conv_fit` rows over the whole grid.
    pub fn write_table_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "sync_msq", "conv_msq", "sync_fit", "conv_fit"])?;
        for m in &self.moments {
            let n = m.n as f64;
            let sync_fit = if n > 0.0 { self.sync_fit.predict(n) } else { f64::NAN };
            let conv_fit = if n > 0.0 { self.conv_fit.predict(n) } else { f64::NAN };
            w.write_record([
                m.n.to_string(),
                m.mean_sq_sync.to_string(),
                m.mean_sq_conv_proxy.to_string(),
                sync_fit.to_string(),
                conv_fit.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// `quantity,fitted,theory` rows for slopes and prefactors.
    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["quantity", "fitted", "theory"])?;
        let rows = [
            ("sync_slope", self.sync_fit.slope, self.theory.sync_slope),
            ("sync_prefactor", self.sync_prefactor, self.theory.sync_prefactor),
            ("conv_slope", self.conv_slope(), self.theory.conv_slope),
            ("conv_prefactor", self.conv_prefactor, self.theory.conv_prefactor),
        ];
        for (q, f, t) in rows {
            w.write_record([q.to_string(), f.to_string(), t.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fits both rates for a rho = 1 power-law ensemble. The last grid step must
/// lie beyond `n_max`; its Z_T serves as plug-in for Z.
pub fn analyze_rates(result: &EnsembleResult, n_min: u64, n_max: u64) -> Result<RateAnalysis> {
    let params = &result.params;
    if params.rho != 1.0 {
        return Err(Error::InvalidParams("rate analysis requires rho = 1".into()));
    }
    let (c, gamma) = params
        .schedule
        .power_law_params()
        .ok_or_else(|| Error::InvalidSchedule("rate analysis requires a power-law schedule".into()))?;
    let horizon = *result.grid.last().expect("nonempty grid");
    if horizon <= n_max {
        return Err(Error::GridMismatch(format!(
            "plug-in horizon {horizon} must exceed the fit window end {n_max}"
        )));
    }
    let moments = moment_stream(result);
    let window: Vec<&MomentRecord> = moments.iter().filter(|m| m.n >= n_min && m.n <= n_max).collect();
    let sync_points: Vec<(f64, f64)> = window.iter().map(|m| (m.n as f64, m.mean_sq_sync)).collect();
    let conv_points: Vec<(f64, f64)> = window.iter().map(|m| (m.n as f64, m.mean_sq_conv_proxy)).collect();
    let e = result.terminal_zbar().iter().map(|z| z * (1.0 - z)).sum::<f64>() / result.replications as f64;
    let theory = RateTheory::new(c, gamma, params.alpha, params.n_walkers, e)?;
    let sync_fit = rate_regression(&sync_points)?;
    let sync_prefactor = fixed_slope_prefactor(&sync_points, theory.sync_slope)?;
    let conv_fit = truncated_power_fit(&conv_points, horizon as f64)?;
    let conv_prefactor = truncated_fixed_prefactor(&conv_points, horizon as f64, -theory.conv_slope)?;
    Ok(RateAnalysis {
        window: (n_min, n_max),
        horizon,
        mean_bernoulli_variance: e,
        theory,
        sync_fit,
        sync_prefactor,
        conv_fit,
        conv_prefactor,
        moments,
    })
}

/// Tolerances for [`rate_tests`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTolerances {
    pub slope: f64,
    pub prefactor_rel: f64,
    /// Required gap between conv and sync slopes; `None` skips the check.
    pub min_separation: Option<f64>,
}

impl Default for RateTolerances {
    fn default() -> Self {
        Self {
            slope: 0.1,
            prefactor_rel: 0.15,
            min_separation: Some(0.15),
        }
    }
}

pub fn sync_rate_tests(a: &RateAnalysis, tol: &RateTolerances) -> Vec<TestReport> {
    let n = a.moments.len() as u64;
    vec![
        TestReport::at_most("sync-slope", (a.sync_fit.slope - a.theory.sync_slope).abs(), tol.slope, n)
            .with("fitted", a.sync_fit.slope)
            .with("theory", a.theory.sync_slope)
            .with("r2", a.sync_fit.r2),
        TestReport::at_most(
            "sync-prefactor",
            (a.sync_prefactor / a.theory.sync_prefactor - 1.0).abs(),
            tol.prefactor_rel,
            n,
        )
        .with("fitted", a.sync_prefactor)
        .with("theory", a.theory.sync_prefactor),
    ]
}

pub fn conv_rate_tests(a: &RateAnalysis, tol: &RateTolerances) -> Vec<TestReport> {
    let n = a.moments.len() as u64;
    vec![
        TestReport::at_most("conv-slope", (a.conv_slope() - a.theory.conv_slope).abs(), tol.slope, n)
            .with("fitted", a.conv_slope())
            .with("theory", a.theory.conv_slope),
        TestReport::at_most(
            "conv-prefactor",
            (a.conv_prefactor / a.theory.conv_prefactor - 1.0).abs(),
            tol.prefactor_rel,
            n,
        )
        .with("fitted", a.conv_prefactor)
        .with("theory", a.theory.conv_prefactor),
    ]
}

/// Slopes and prefactors of both mean squares, plus the slope gap when requested.
pub fn rate_tests(a: &RateAnalysis, tol: &RateTolerances) -> TestReport {
    let mut parts = sync_rate_tests(a, tol);
    parts.extend(conv_rate_tests(a, tol));
    if let Some(gap) = tol.min_separation {
        let sep = a.conv_slope() - a.sync_fit.slope;
        parts.push(TestReport::at_least("rate-separation", sep, gap, a.moments.len() as u64));
    }
    TestReport::all("rates", parts)
}
