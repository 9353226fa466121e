//! Power-law fits on log-log scale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

impl RateFit {
    /// exp(intercept) n^slope.
    pub fn predict(&self, n: f64) -> f64 {
        (self.intercept + self.slope * n.ln()).exp()
    }
}

fn check_points(points: &[(f64, f64)]) -> Result<()> {
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "rate regression needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some((n, y)) = points.iter().find(|(n, y)| !(*n > 0.0 && *y > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "rate regression needs positive n and y, got ({n}, {y})"
        )));
    }
    Ok(())
}

/// Ordinary least squares of ln y on ln n.
pub fn rate_regression(points: &[(f64, f64)]) -> Result<RateFit> {
    check_points(points)?;
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, y)| y.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("rate regression needs distinct n".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(RateFit {
        slope,
        intercept,
        r2,
    })
}

/// Prefactor A of y ~ A n^slope with the slope held fixed: the geometric
/// mean of y_n n^{-slope} over the points.
pub fn fixed_slope_prefactor(points: &[(f64, f64)], slope: f64) -> Result<f64> {
    check_points(points)?;
    let mean_log = points
        .iter()
        .map(|(n, y)| y.ln() - slope * n.ln())
        .sum::<f64>()
        / points.len() as f64;
    Ok(mean_log.exp())
}

/// Fit of y_n = A (n^{-beta} - T^{-beta}), the mean square distance between a
/// martingale at time n and at a finite horizon T when E[(Z_n - Z)^2] ~ A n^{-beta}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedPowerFit {
    pub beta: f64,
    pub prefactor: f64,
    pub horizon: f64,
    /// Residual sum of squares on log scale.
    pub rss: f64,
}

impl TruncatedPowerFit {
    pub fn predict(&self, n: f64) -> f64 {
        self.prefactor * (n.powf(-self.beta) - self.horizon.powf(-self.beta))
    }
}

fn truncated_rss(points: &[(f64, f64)], horizon: f64, beta: f64) -> (f64, f64) {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|(n, y)| (y.ln(), (n.powf(-beta) - horizon.powf(-beta)).ln()))
        .collect();
    let log_a = logs.iter().map(|(ly, lb)| ly - lb).sum::<f64>() / logs.len() as f64;
    let rss = logs.iter().map(|(ly, lb)| (ly - log_a - lb).powi(2)).sum();
    (rss, log_a.exp())
}

/// Prefactor A of y_n = A (n^{-beta} - T^{-beta}) with beta held fixed.
pub fn truncated_fixed_prefactor(points: &[(f64, f64)], horizon: f64, beta: f64) -> Result<f64> {
    check_points(points)?;
    if points.iter().any(|(n, _)| *n >= horizon) {
        return Err(Error::InvalidInput("all fit points must lie before the horizon".into()));
    }
    Ok(truncated_rss(points, horizon, beta).1)
}

/// Least squares on log scale over beta in (0, 4], by golden-section search
/// with A profiled out in closed form.
pub fn truncated_power_fit(points: &[(f64, f64)], horizon: f64) -> Result<TruncatedPowerFit> {
    check_points(points)?;
    if points.iter().any(|(n, _)| *n >= horizon) {
        return Err(Error::InvalidInput("all fit points must lie before the horizon".into()));
    }
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (1e-3, 4.0);
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let mut fa = truncated_rss(points, horizon, a).0;
    let mut fb = truncated_rss(points, horizon, b).0;
    while hi - lo > 1e-10 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = truncated_rss(points, horizon, a).0;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = truncated_rss(points, horizon, b).0;
        }
    }
    let beta = 0.5 * (lo + hi);
    let (rss, prefactor) = truncated_rss(points, horizon, beta);
    Ok(TruncatedPowerFit {
        beta,
        prefactor,
        horizon,
        rss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 100.0, 1000.0, 5000.0]
            .iter()
            .map(|n: &f64| (*n, 3.0 * n.powf(-0.75)))
            .collect();
        let fit = rate_regression(&pts).unwrap();
        assert_relative_eq!(fit.slope, -0.75, epsilon = 1e-12);
        assert_relative_eq!(fit.intercept.exp(), 3.0, epsilon = 1e-10);
        assert_relative_eq!(fit.r2, 1.0, epsilon = 1e-12);
        assert_relative_eq!(fixed_slope_prefactor(&pts, -0.75).unwrap(), 3.0, epsilon = 1e-10);
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let pts = [(1.0, 5.0), (10.0, 5.0), (100.0, 5.0)];
        assert_relative_eq!(rate_regression(&pts).unwrap().slope, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(rate_regression(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(rate_regression(&[(1.0, 1.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn truncated_fit_recovers_parameters() {
        let horizon: f64 = 1e6;
        let pts: Vec<(f64, f64)> = [1e3, 3e3, 1e4, 3e4, 1e5]
            .iter()
            .map(|n: &f64| (*n, 0.4 * (n.powf(-0.5) - horizon.powf(-0.5))))
            .collect();
        let fit = truncated_power_fit(&pts, horizon).unwrap();
        assert_relative_eq!(fit.beta, 0.5, epsilon = 1e-6);
        assert_relative_eq!(fit.prefactor, 0.4, max_relative = 1e-6);
    }
}
