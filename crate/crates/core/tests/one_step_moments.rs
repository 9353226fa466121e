//! Monte Carlo checks of the one-step conditional moments and of small
//! ensemble examples whose answers are known in closed form.

use irw_core::ensemble::{moment_stream, run_ensemble, EnsembleConfig, MomentAccumulator, RecordingGrid};
use irw_core::model::{InitialLaw, ModelParams, StepSchedule, WalkState};
use irw_core::RandomStream;

const DRAWS: u64 = 100_000;

fn explicit(n: usize, rho: f64, alpha: f64, q: f64, r: Vec<f64>, z0: Vec<f64>) -> ModelParams {
    ModelParams::new(
        n,
        rho,
        alpha,
        q,
        StepSchedule::Explicit { values: r },
        InitialLaw::Deterministic { values: z0 },
    )
    .unwrap()
}

fn within(est: &MomentAccumulator, target: f64) -> bool {
    (est.mean - target).abs() <= 4.0 * est.std_error()
}

#[test]
fn pure_reinforcement_mean_is_a_martingale() {
    let z0 = vec![0.15, 0.4, 0.7, 0.9];
    let p = explicit(4, 1.0, 0.35, 0.5, vec![0.3], z0.clone());
    let s = WalkState::new(z0).unwrap();
    let inc: MomentAccumulator = (0..DRAWS)
        .map(|k| {
            let mut rng = RandomStream::new(17, k);
            s.step(&p, &mut rng).unwrap().z_bar - s.z_bar
        })
        .collect();
    assert!(within(&inc, 0.0), "mean increment {} +- {}", inc.mean, inc.std_error());
}

#[test]
fn conditional_mean_and_variances_match_formulas() {
    let z0 = vec![0.1, 0.35, 0.8];
    let p = explicit(3, 0.6, 0.4, 0.3, vec![0.25], z0.clone());
    let s = WalkState::new(z0).unwrap();
    let (drift, factor) = s.conditional_mean_increments(&p).unwrap();
    let (diff_var, mean_var) = s.conditional_variances(&p).unwrap();

    let mut zbar = MomentAccumulator::new();
    let mut diffs = [MomentAccumulator::new(); 3];
    let mut diff_sq = [MomentAccumulator::new(); 3];
    let mut zbar_sq = MomentAccumulator::new();
    let mut samples = Vec::with_capacity(DRAWS as usize);
    for k in 0..DRAWS {
        let mut rng = RandomStream::new(99, k);
        let next = s.step(&p, &mut rng).unwrap();
        zbar.push(next.z_bar - p.q);
        for (acc, zi) in diffs.iter_mut().zip(&next.z) {
            acc.push(zi - next.z_bar);
        }
        samples.push(next);
    }
    assert!(within(&zbar, drift), "drift {} vs {}", zbar.mean, drift);
    for (i, (acc, zi)) in diffs.iter().zip(&s.z).enumerate() {
        let target = factor * (zi - s.z_bar);
        assert!(within(acc, target), "walker {i}: {} vs {}", acc.mean, target);
    }
    // Second moments about the exact conditional means.
    let mean_zbar = drift + p.q;
    for next in &samples {
        zbar_sq.push((next.z_bar - mean_zbar).powi(2));
        for ((acc, zi), zi_next) in diff_sq.iter_mut().zip(&s.z).zip(&next.z) {
            let m = factor * (zi - s.z_bar);
            acc.push((zi_next - next.z_bar - m).powi(2));
        }
    }
    assert!(within(&zbar_sq, mean_var), "Var Z: {} vs {}", zbar_sq.mean, mean_var);
    for i in 0..3 {
        assert!(
            within(&diff_sq[i], diff_var[i]),
            "Var diff {i}: {} vs {}",
            diff_sq[i].mean,
            diff_var[i]
        );
    }
}

#[test]
fn single_walk_first_step_variance() {
    // Z_1 is 0.25 or 0.75 with probability 1/2 each, so Var[Z_1] = 0.0625.
    let p = explicit(1, 1.0, 0.0, 0.5, vec![0.5], vec![0.5]);
    let res = run_ensemble(&p, &RecordingGrid::explicit(vec![1]), &EnsembleConfig::new(DRAWS, 3)).unwrap();
    let z = res.terminal_zbar();
    assert!(z.iter().all(|x| *x == 0.25 || *x == 0.75));
    // With two atoms at 0.5 +- 0.25 the variance is 0.0625 * 4 p (1 - p); the
    // sample variance can only drift through the frequency of the upper atom.
    let up: MomentAccumulator = z.iter().map(|x| f64::from(u8::from(*x == 0.75))).collect();
    assert!((up.mean - 0.5).abs() <= 4.0 * up.std_error());
    let acc: MomentAccumulator = z.iter().copied().collect();
    let p_hat = up.mean;
    let implied = 0.0625 * 4.0 * p_hat * (1.0 - p_hat);
    assert!((acc.population_variance() - implied).abs() < 1e-12);
    assert!((implied - 0.0625).abs() <= 0.0625 * 4.0 * (4.0 * up.std_error()).powi(2) + 1e-12);
}

#[test]
fn full_interaction_first_step_sync_variance() {
    // alpha = 1 and equal starting points: every walker draws with p = Z_0,
    // so E[(1/N) sum (Z_1(i) - Z_1)^2] = r^2 rho^2 (1 - 1/N) p (1 - p).
    let (n, r, rho, z) = (4usize, 0.3, 0.8, 0.35);
    let p = explicit(n, rho, 1.0, 0.5, vec![r], vec![z]);
    let res = run_ensemble(&p, &RecordingGrid::explicit(vec![1]), &EnsembleConfig::new(DRAWS, 8)).unwrap();
    let sync: MomentAccumulator = res.replication_iter().map(|s| s[0].sync_msq).collect();
    let target = r * r * rho * rho * (1.0 - 1.0 / n as f64) * z * (1.0 - z);
    assert!(within(&sync, target), "{} vs {}", sync.mean, target);
    let moments = moment_stream(&res);
    assert_eq!(moments[0].mean_sq_sync, sync.mean);
}

#[test]
fn constant_kernel_is_deterministic() {
    let p = ModelParams::new(
        3,
        0.0,
        0.5,
        0.5,
        StepSchedule::power_law(0.5, 0.75),
        InitialLaw::default(),
    )
    .unwrap();
    let res = run_ensemble(&p, &RecordingGrid::explicit(vec![1, 10, 100]), &EnsembleConfig::new(200, 2)).unwrap();
    for m in moment_stream(&res) {
        assert_eq!(m.var_zbar, 0.0);
        assert_eq!(m.mean_sq_sync, 0.0);
    }
}

#[test]
fn identical_snapshots_have_zero_sync() {
    let p = explicit(3, 0.0, 0.0, 0.5, vec![0.2; 4], vec![0.3]);
    let res = run_ensemble(&p, &RecordingGrid::explicit(vec![0, 4]), &EnsembleConfig::new(5, 0)).unwrap();
    // Only the rounding of the walker average separates the coordinates from Z_n.
    assert!(moment_stream(&res).iter().all(|m| m.mean_sq_sync < 1e-28));
}

#[test]
fn replications_are_uncorrelated() {
    let p = explicit(1, 1.0, 0.0, 0.5, vec![0.5], vec![0.5]);
    let res = run_ensemble(&p, &RecordingGrid::explicit(vec![1]), &EnsembleConfig::new(2 * DRAWS, 12)).unwrap();
    let z = res.terminal_zbar();
    let products: MomentAccumulator = z
        .chunks(2)
        .map(|pair| (pair[0] - 0.5) * (pair[1] - 0.5))
        .collect();
    assert!(within(&products, 0.0), "covariance {} +- {}", products.mean, products.std_error());
}
