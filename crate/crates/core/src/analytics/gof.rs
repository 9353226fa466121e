//! Goodness-of-fit statistics: one-sample Kolmogorov-Smirnov against the
//! standard normal and Pearson's chi-square with pooled sparse cells.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use super::report::TestReport;
use crate::error::{Error, Result};

/// Asymptotic KS critical constant sqrt(-ln(level / 2) / 2); 1.6276 at 1%.
pub fn ks_critical_constant(level: f64) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt()
}

/// sup_x |F_M(x) - Phi(x)| for the empirical distribution of `samples`.
pub fn ks_statistic_normal(samples: &[f64]) -> f64 {
    let normal = Normal::standard();
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, x)| {
            let f = normal.cdf(*x);
            let above = (i as f64 + 1.0) / m - f;
            let below = f - i as f64 / m;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Pearson chi-square test of observed counts against cell probabilities.
/// Cells with expected count below 5 are pooled in order of increasing
/// expectation until every pooled cell reaches 5.
pub fn chi_square_gof(name: &str, observed: &[u64], probs: &[f64], level: f64) -> Result<TestReport> {
    if observed.len() != probs.len() || observed.is_empty() {
        return Err(Error::InvalidInput("observed and expected cells differ in length".into()));
    }
    let total: u64 = observed.iter().sum();
    let m = total as f64;
    let mut cells: Vec<(f64, f64)> = observed
        .iter()
        .zip(probs)
        .map(|(o, p)| (*o as f64, p * m))
        .collect();
    cells.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (o, e) in cells {
        acc.0 += o;
        acc.1 += e;
        if acc.1 >= 5.0 {
            pooled.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.1 > 0.0 || acc.0 > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => pooled.push(acc),
        }
    }
    let statistic: f64 = pooled.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = pooled.len().saturating_sub(1);
    if dof == 0 {
        let passed = (pooled[0].0 - pooled[0].1).abs() < 1e-9 * m.max(1.0);
        return Ok(TestReport::new(name, statistic, 0.0, passed, total).with("cells", 1));
    }
    let threshold = ChiSquared::new(dof as f64)
        .map_err(|e| Error::InvalidInput(e.to_string()))?
        .inverse_cdf(1.0 - level);
    Ok(TestReport::at_most(name, statistic, threshold, total)
        .with("cells", pooled.len())
        .with("dof", dof)
        .with("level", level))
}
