//! Verification procedures for the convergence, fixation and fluctuation
//! results, each producing a [`TestReport`].

use std::collections::HashMap;

use super::gof::{chi_square_gof, ks_critical_constant, ks_statistic_normal};
use super::report::TestReport;
use super::scaled::ScaledProcess;
use crate::ensemble::{moment_stream, EnsembleResult, MomentAccumulator};
use crate::error::{Error, Result};
use crate::model::SquareSummability;
use crate::oracle::{variance_bounds_interacting, ExactDistribution};

/// Replications whose plug-in Z(1 - Z) falls below this are not standardized.
pub const MIN_BERNOULLI_VARIANCE: f64 = 0.01;

/// Index (1-based) from which the draws are constant, reported only when the
/// constant tail has at least `min_tail` draws.
pub fn fixation_index_with_tail(draws: &[bool], min_tail: usize) -> Option<usize> {
    let last = *draws.last()?;
    let start = draws.iter().rposition(|d| *d != last).map_or(0, |p| p + 1);
    let tail = draws.len() - start;
    (tail >= min_tail.max(1)).then_some(start + 1)
}

/// Fixation index under the default rule: the constant tail must cover at
/// least half of the recorded draws.
pub fn fixation_detector(draws: &[bool]) -> Option<usize> {
    fixation_index_with_tail(draws, draws.len().div_ceil(2))
}

/// Fraction of replications with a fixation index. With `expect_fixation`
/// the fraction must reach `bound`, otherwise it must stay at or below it.
pub fn fixation_test(result: &EnsembleResult, expect_fixation: bool, bound: f64) -> Result<TestReport> {
    let draws = result
        .draws
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("ensemble was run without draw recording".into()))?;
    let indices: Vec<Option<usize>> = draws.iter().map(|d| fixation_detector(&d.to_bits())).collect();
    let fixed = indices.iter().filter(|m| m.is_some()).count();
    let fraction = fixed as f64 / draws.len() as f64;
    let name = if expect_fixation { "fixation" } else { "fixation-control" };
    let report = if expect_fixation {
        TestReport::at_least(name, fraction, bound, draws.len() as u64)
    } else {
        TestReport::at_most(name, fraction, bound, draws.len() as u64)
    };
    let median = {
        let mut m: Vec<usize> = indices.iter().flatten().copied().collect();
        m.sort_unstable();
        m.get(m.len() / 2).copied()
    };
    Ok(report
        .with("fixed", fixed)
        .with("horizon", draws.first().map_or(0, |d| d.len()))
        .with("median_fixation_index", median))
}

fn require_rho(result: &EnsembleResult, want_one: bool) -> Result<()> {
    let rho = result.params.rho;
    if want_one && rho != 1.0 {
        return Err(Error::InvalidParams(format!("test requires rho = 1, got {rho}")));
    }
    if !want_one && rho >= 1.0 {
        return Err(Error::InvalidParams("test requires rho < 1".into()));
    }
    Ok(())
}

/// Sample estimate of 1/4 - Var[Z_n] and its standard error at grid position g.
fn polarization_gap(result: &EnsembleResult, g: usize) -> (f64, f64) {
    let zs: Vec<f64> = result.replication_iter().map(|r| r[g].z_bar).collect();
    let acc: MomentAccumulator = zs.iter().copied().collect();
    let dev: MomentAccumulator = zs.iter().map(|z| (z - acc.mean).powi(2)).collect();
    (0.25 - acc.variance(), dev.std_error())
}

/// Polarization dichotomy for rho = 1.
///
/// With sum r_n^2 divergent, 1/4 - Var[Z_T] must be at most `max_gap` and
/// Var[Z_n] must not decrease along the grid beyond 4 standard errors. With a
/// convergent sum, 1/4 - Var[Z_T] must stay above the lower envelope
/// x_0 prod (1 - r_k^2 / N) minus 4 standard errors.
pub fn polarization_test(result: &EnsembleResult, max_gap: f64) -> Result<TestReport> {
    require_rho(result, true)?;
    let params = &result.params;
    let g_last = result.grid_len() - 1;
    let horizon = result.grid[g_last];
    let m = result.replications;
    let (gap, se) = polarization_gap(result, g_last);
    let near_poles = result
        .terminal_zbar()
        .iter()
        .filter(|z| z.min(1.0 - *z) <= 0.05)
        .count() as f64
        / m as f64;
    match params.schedule.square_summability() {
        SquareSummability::Divergent => {
            let mut monotone = true;
            let mut prev: Option<(f64, f64)> = None;
            for g in 0..result.grid_len() {
                let (x, s) = polarization_gap(result, g);
                if let Some((px, ps)) = prev {
                    if x > px + 4.0 * (s * s + ps * ps).sqrt() {
                        monotone = false;
                    }
                }
                prev = Some((x, s));
            }
            let mut report = TestReport::at_most("polarization", gap, max_gap, m);
            report.passed &= monotone;
            Ok(report
                .with("regime", "divergent")
                .with("horizon", horizon)
                .with("std_error", se)
                .with("variance_monotone", monotone)
                .with("fraction_near_poles", near_poles))
        }
        SquareSummability::Convergent | SquareSummability::Unknown => {
            let x0 = params.initial.mean_bernoulli_variance(params.n_walkers);
            let env = variance_bounds_interacting(x0, &params.schedule, params.alpha, params.n_walkers, horizon)?;
            let lower = env.lower[horizon as usize];
            let threshold = lower - 4.0 * se;
            Ok(TestReport::at_least("polarization", gap, threshold, m)
                .with("regime", "convergent")
                .with("horizon", horizon)
                .with("std_error", se)
                .with("lower_envelope", lower)
                .with("upper_envelope", env.upper[horizon as usize])
                .with("fraction_near_poles", near_poles))
        }
    }
}

/// Mean |Z_T - q| over replications must not exceed `tol`.
pub fn convergence_to_q_test(result: &EnsembleResult, tol: f64) -> Result<TestReport> {
    require_rho(result, false)?;
    let q = result.params.q;
    let dev: MomentAccumulator = result.terminal_zbar().iter().map(|z| (z - q).abs()).collect();
    Ok(TestReport::at_most("convergence-q", dev.mean, tol, result.replications)
        .with("std_error", dev.std_error())
        .with("horizon", *result.grid.last().expect("nonempty grid")))
}

/// Mean square distance of the walkers to their average must fall along the
/// grid and end below `max_msq`.
pub fn synchronization_test(result: &EnsembleResult, max_msq: f64) -> Result<TestReport> {
    let rho = result.params.rho;
    let alpha = result.params.alpha;
    if rho * (1.0 - alpha) >= 1.0 {
        return Err(Error::InvalidParams(
            "synchronization needs rho (1 - alpha) < 1".into(),
        ));
    }
    let moments = moment_stream(result);
    let first = moments.first().expect("nonempty grid");
    let last = moments.last().expect("nonempty grid");
    let mut report = TestReport::at_most("synchronization", last.mean_sq_sync, max_msq, result.replications);
    let decreased = last.mean_sq_sync < first.mean_sq_sync;
    report.passed &= decreased;
    Ok(report
        .with("first_n", first.n)
        .with("first_mean_sq_sync", first.mean_sq_sync)
        .with("last_n", last.n)
        .with("decreased", decreased))
}

/// Kolmogorov-Smirnov test of x_r / sqrt(v_r) against N(0, 1).
///
/// Replications with z_r (1 - z_r) below [`MIN_BERNOULLI_VARIANCE`] are
/// excluded. Passes when D < c(level) / sqrt(M). With every replication
/// excluded the report fails and is marked inconclusive.
pub fn mixed_gaussian_test(
    name: &str,
    samples: &[f64],
    variances: &[f64],
    z_hats: &[f64],
    level: f64,
) -> Result<TestReport> {
    if samples.len() != variances.len() || samples.len() != z_hats.len() {
        return Err(Error::InvalidInput("samples, variances and plug-ins differ in length".into()));
    }
    let standardized: Vec<f64> = samples
        .iter()
        .zip(variances)
        .zip(z_hats)
        .filter(|(_, z)| *z * (1.0 - *z) >= MIN_BERNOULLI_VARIANCE)
        .filter(|((_, v), _)| **v > 0.0)
        .map(|((x, v), _)| x / v.sqrt())
        .collect();
    let m = standardized.len();
    let excluded = samples.len() - m;
    if m == 0 {
        return Ok(TestReport::new(name, f64::NAN, f64::NAN, false, 0)
            .with("inconclusive", true)
            .with("excluded", excluded));
    }
    let d = ks_statistic_normal(&standardized);
    let threshold = ks_critical_constant(level) / (m as f64).sqrt();
    let sd = MomentAccumulator::from_iter(standardized.iter().copied());
    Ok(TestReport::new(name, d, threshold, d < threshold, m as u64)
        .with("excluded", excluded)
        .with("level", level)
        .with("standardized_mean", sd.mean)
        .with("standardized_variance", sd.variance()))
}

/// KS tests at every time of the process with Bonferroni level `level / K`;
/// passes iff all do.
pub fn marginal_tests(name: &str, process: &ScaledProcess, level: f64) -> Result<TestReport> {
    let k = process.times.len();
    let mut parts = Vec::with_capacity(k);
    for j in 0..k {
        let variances = process.limit_variances(j)?;
        let report = mixed_gaussian_test(
            &format!("{name} t={}", process.times[j]),
            &process.column(j),
            &variances,
            &process.z_hat,
            level / k as f64,
        )?;
        parts.push(report.with("t", process.times[j]));
    }
    Ok(TestReport::all(name, parts))
}

/// Empirical Cov(X_s, X_t) against the average plug-in limit covariance over
/// all pairs of grid times; passes when the largest relative error is at most
/// `max_rel_err`.
pub fn covariance_structure_test(process: &ScaledProcess, max_rel_err: f64) -> Result<TestReport> {
    let k = process.times.len();
    let mut distinct = process.times.clone();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InvalidInput("covariance test needs at least 3 distinct times".into()));
    }
    let m = process.replications();
    if m < 2 {
        return Err(Error::InvalidInput("covariance test needs at least 2 replications".into()));
    }
    let means: Vec<f64> = (0..k)
        .map(|j| process.values.iter().map(|r| r[j]).sum::<f64>() / m as f64)
        .collect();
    let mut worst: f64 = 0.0;
    let mut cells = Vec::new();
    for j in 0..k {
        for l in j..k {
            let empirical = process
                .values
                .iter()
                .map(|r| (r[j] - means[j]) * (r[l] - means[l]))
                .sum::<f64>()
                / (m - 1) as f64;
            let expected = (0..m)
                .map(|rep| process.limit_covariance(rep, j, l))
                .sum::<Result<f64>>()?
                / m as f64;
            if expected <= 0.0 {
                return Err(Error::InvalidInput("limit covariance vanishes on the grid".into()));
            }
            let rel = (empirical - expected).abs() / expected;
            worst = worst.max(rel);
            cells.push(serde_json::json!({
                "s": process.times[j],
                "t": process.times[l],
                "empirical": empirical,
                "expected": expected,
                "relative_error": rel,
            }));
        }
    }
    Ok(TestReport::at_most("covariance-structure", worst, max_rel_err, m as u64).with("cells", cells))
}

/// Cov(X_t - X_s, X_s) for times[j] < times[k] must be within 4 standard
/// errors of zero.
pub fn increment_independence_test(process: &ScaledProcess, j: usize, k: usize) -> Result<TestReport> {
    if !(process.times[j] < process.times[k]) {
        return Err(Error::InvalidInput("need times[j] < times[k]".into()));
    }
    let xs = process.column(j);
    let inc: Vec<f64> = process.values.iter().map(|r| r[k] - r[j]).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let mi = inc.iter().sum::<f64>() / inc.len() as f64;
    let products: MomentAccumulator = xs.iter().zip(&inc).map(|(x, d)| (x - mx) * (d - mi)).collect();
    let se = products.std_error();
    Ok(TestReport::at_most("increment-independence", products.mean.abs(), 4.0 * se, products.count)
        .with("s", process.times[j])
        .with("t", process.times[k])
        .with("covariance", products.mean))
}

/// Chi-square test of the simulated walker vectors at grid step `step`
/// against the exact law. Each sample is matched to the atom within 1e-9;
/// unmatched samples form an extra cell of zero probability, which fails
/// the test.
pub fn enumeration_gof_test(
    result: &EnsembleResult,
    exact: &ExactDistribution,
    step: u64,
    level: f64,
) -> Result<TestReport> {
    let g = result.grid_index(step)?;
    if step > exact.horizon() {
        return Err(Error::GridMismatch(format!("exact law stops at step {}", exact.horizon())));
    }
    if result.full_z.is_none() {
        return Err(Error::InvalidInput("enumeration test needs full snapshots".into()));
    }
    let atoms = exact.at(step);
    let key = |z: &[f64]| -> Vec<i64> { z.iter().map(|x| (x * 1e9).round() as i64).collect() };
    let lookup: HashMap<Vec<i64>, usize> = atoms.iter().enumerate().map(|(i, a)| (key(&a.z), i)).collect();
    let mut observed = vec![0u64; atoms.len() + 1];
    for rep in 0..result.replications as usize {
        let z = result.walker_values(rep, g).expect("full snapshots present");
        let cell = lookup.get(&key(z)).copied().or_else(|| {
            atoms
                .iter()
                .position(|a| a.z.iter().zip(z).all(|(x, y)| (x - y).abs() <= 1e-9))
        });
        observed[cell.unwrap_or(atoms.len())] += 1;
    }
    let unmatched = observed[atoms.len()];
    let mut probs: Vec<f64> = atoms.iter().map(|a| a.prob).collect();
    probs.push(0.0);
    let mut report = chi_square_gof("enumeration-gof", &observed, &probs, level)?;
    report.passed &= unmatched == 0;
    Ok(report.with("atoms", atoms.len()).with("unmatched", unmatched).with("step", step))
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn fixation_examples() {
        assert_eq!(fixation_detector(&[false, true, true, true, true]), Some(2));
        assert_eq!(fixation_detector(&[false, true, false, true]), None);
        assert_eq!(fixation_detector(&[true; 6]), Some(1));
        assert_eq!(fixation_detector(&[]), None);
        assert_eq!(fixation_index_with_tail(&[false, true, false, true], 1), Some(4));
    }

    #[test]
    fn exact_quantiles_pass_and_zeros_fail() {
        let normal = Normal::standard();
        let m = 2000;
        let v: f64 = 0.3;
        let xs: Vec<f64> = (0..m)
            .map(|i| v.sqrt() * normal.inverse_cdf((i as f64 + 0.5) / m as f64))
            .collect();
        let r = mixed_gaussian_test("q", &xs, &vec![v; m], &vec![0.5; m], 0.01).unwrap();
        assert!(r.passed);
        let r = mixed_gaussian_test("z", &vec![0.0; m], &vec![v; m], &vec![0.5; m], 0.01).unwrap();
        assert!(!r.passed);
        assert!((r.statistic - 0.5).abs() < 1e-12);
    }

    #[test]
    fn all_excluded_is_inconclusive() {
        let r = mixed_gaussian_test("x", &[0.1, 0.2], &[1.0, 1.0], &[0.0, 1.0], 0.01).unwrap();
        assert!(!r.passed);
        assert_eq!(r.details["inconclusive"], true);
    }
}
