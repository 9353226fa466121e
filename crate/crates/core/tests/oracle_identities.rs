//! The enumerated law is exact, so identities that hold in expectation must
//! hold on it up to rounding.

use irw_core::model::{InitialLaw, ModelParams, StepSchedule, WalkState};
use irw_core::oracle::{enumerate_distribution, variance_bounds_interacting, variance_recursion_alpha0};
use irw_core::model::step_size;

const TOL: f64 = 1e-12;

fn params(n: usize, rho: f64, alpha: f64, q: f64, schedule: StepSchedule) -> ModelParams {
    ModelParams::new(n, rho, alpha, q, schedule, InitialLaw::default()).unwrap()
}

/// Deep enough to mix several step sizes while staying inside the atom budget.
fn horizon(n: usize) -> u64 {
    if n >= 4 { 5 } else { 6 }
}

fn configs() -> Vec<(ModelParams, Vec<f64>)> {
    let sched = StepSchedule::Explicit {
        values: vec![0.5, 0.3, 0.25, 0.2, 0.1, 0.4],
    };
    let power = StepSchedule::power_law(0.5, 0.75);
    vec![
        (params(1, 1.0, 0.0, 0.5, power.clone()), vec![0.5]),
        (params(2, 1.0, 0.5, 0.5, sched.clone()), vec![0.2, 0.7]),
        (params(2, 0.5, 0.3, 0.2, sched.clone()), vec![0.5, 0.5]),
        (params(3, 0.7, 1.0, 0.9, sched.clone()), vec![0.1, 0.4, 0.95]),
        (params(3, 0.0, 0.2, 0.35, power.clone()), vec![0.3, 0.6, 0.8]),
        (params(4, 0.4, 0.6, 0.6, power), vec![0.25, 0.25, 0.75, 1.0]),
    ]
}

#[test]
fn probability_mass_is_conserved() {
    for (p, z0) in configs() {
        let h = horizon(z0.len());
        let exact = enumerate_distribution(&p, &z0, h).unwrap();
        for k in 0..=h {
            assert!((exact.total_mass(k) - 1.0).abs() < TOL);
        }
    }
}

#[test]
fn mean_contracts_towards_q() {
    for (p, z0) in configs() {
        let h = horizon(z0.len());
        let exact = enumerate_distribution(&p, &z0, h).unwrap();
        for k in 0..h {
            let r = step_size(&p.schedule, k).unwrap();
            let lhs = exact.mean_zbar(k + 1) - p.q;
            let rhs = (1.0 - (1.0 - p.rho) * r) * (exact.mean_zbar(k) - p.q);
            assert!((lhs - rhs).abs() < TOL, "step {k}: {lhs} vs {rhs}");
            if p.rho == 1.0 {
                assert!((exact.mean_zbar(k + 1) - exact.mean_zbar(0)).abs() < TOL);
            }
        }
    }
}

#[test]
fn one_step_conditional_moments_agree_with_closed_forms() {
    for (p, z0) in configs() {
        let exact = enumerate_distribution(&p, &z0, 3).unwrap();
        for k in 0..3u64 {
            for atom in exact.at(k) {
                // Re-enumerate one step from this atom with the step size in force.
                let r = step_size(&p.schedule, k).unwrap();
                let local = ModelParams {
                    schedule: StepSchedule::Explicit { values: vec![r] },
                    ..p.clone()
                };
                let child = enumerate_distribution(&local, &atom.z, 1).unwrap();
                let state = WalkState::new(atom.z.clone()).unwrap();
                let (drift, factor) = state.conditional_mean_increments(&local).unwrap();
                let (diff_var, mean_var) = state.conditional_variances(&local).unwrap();

                let mean = child.mean_zbar(1);
                assert!((mean - p.q - drift).abs() < TOL);
                assert!((child.var_zbar(1) - mean_var).abs() < TOL);
                for (i, expected_var) in diff_var.iter().enumerate() {
                    let target = factor * (atom.z[i] - state.z_bar);
                    let m = child.expect(1, |a| a.z[i] - a.z_bar());
                    assert!((m - target).abs() < TOL);
                    let v = child.expect(1, |a| (a.z[i] - a.z_bar() - target).powi(2));
                    assert!((v - expected_var).abs() < TOL, "walker {i}: {v} vs {expected_var}");
                }
            }
        }
    }
}

#[test]
fn single_walk_variance_recursion_is_exact() {
    for gamma in [0.4, 0.8] {
        let sched = StepSchedule::power_law(0.5, gamma);
        let p = params(1, 1.0, 0.0, 0.5, sched.clone());
        let exact = enumerate_distribution(&p, &[0.5], 8).unwrap();
        let x = variance_recursion_alpha0(0.25, &sched, 8).unwrap();
        for k in 0..=8u64 {
            let e = exact.expect(k, |a| a.z[0] * (1.0 - a.z[0]));
            assert!((e - x[k as usize]).abs() < TOL);
            assert!((0.25 - exact.var_zbar(k) - x[k as usize]).abs() < TOL);
        }
    }
}

#[test]
fn interacting_variance_lies_between_envelopes() {
    for alpha in [0.0, 0.3, 1.0] {
        for n in [2usize, 3] {
            let sched = StepSchedule::power_law(0.5, 0.75);
            let p = params(n, 1.0, alpha, 0.5, sched.clone());
            let exact = enumerate_distribution(&p, &vec![0.5; n], 7).unwrap();
            let env = variance_bounds_interacting(0.25, &sched, alpha, n, 7).unwrap();
            for k in 0..=7u64 {
                let x = 0.25 - exact.var_zbar(k);
                let i = k as usize;
                assert!(env.lower[i] - TOL <= x && x <= env.upper[i] + TOL, "alpha {alpha} N {n} step {k}");
            }
        }
    }
}

#[test]
fn enumeration_refuses_large_problems() {
    let p = params(5, 1.0, 0.0, 0.5, StepSchedule::power_law(0.5, 0.75));
    assert!(enumerate_distribution(&p, &[0.5; 5], 2).is_err());
    let p = params(1, 1.0, 0.0, 0.5, StepSchedule::power_law(0.5, 0.75));
    assert!(enumerate_distribution(&p, &[0.5], 9).is_err());
}
