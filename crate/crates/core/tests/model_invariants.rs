use irw_core::ensemble::{run_ensemble, EnsembleConfig, RecordingGrid};
use irw_core::model::{InitialLaw, ModelParams, StepSchedule, WalkState};
use irw_core::RandomStream;
use proptest::prelude::*;

fn params(n: usize, rho: f64, alpha: f64, q: f64, c: f64, gamma: f64) -> ModelParams {
    ModelParams::new(
        n,
        rho,
        alpha,
        q,
        StepSchedule::PowerLaw {
            c,
            gamma,
            offset: 1,
            clamp: true,
        },
        InitialLaw::SymmetricBeta { a: 0.7 },
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn states_stay_in_unit_interval_and_mean_is_exact(
        n in 1usize..7,
        rho in 0.0f64..=1.0,
        alpha in 0.0f64..=1.0,
        q in 0.0f64..=1.0,
        c in 0.05f64..1.5,
        gamma in 0.1f64..=1.0,
        seed in any::<u64>(),
    ) {
        let p = params(n, rho, alpha, q, c, gamma);
        let mut rng = RandomStream::new(seed, 0);
        let mut s = WalkState::initial(&p, &mut rng);
        for _ in 0..300 {
            s = s.step(&p, &mut rng).unwrap();
            prop_assert!(s.z.iter().all(|x| (0.0..=1.0).contains(x)));
            let mean = s.z.iter().sum::<f64>() / n as f64;
            prop_assert!((s.z_bar - mean).abs() <= 1e-12);
            let probs = s.draw_probabilities(alpha);
            prop_assert!(probs.iter().all(|x| (0.0..=1.0).contains(x)));
        }
    }

    #[test]
    fn q_never_influences_pure_reinforcement(
        n in 1usize..5,
        alpha in 0.0f64..=1.0,
        q1 in 0.0f64..=1.0,
        q2 in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let a = params(n, 1.0, alpha, q1, 0.5, 0.7);
        let b = params(n, 1.0, alpha, q2, 0.5, 0.7);
        let (mut ra, mut rb) = (RandomStream::new(seed, 1), RandomStream::new(seed, 1));
        let (mut sa, mut sb) = (WalkState::initial(&a, &mut ra), WalkState::initial(&b, &mut rb));
        for _ in 0..200 {
            sa = sa.step(&a, &mut ra).unwrap();
            sb = sb.step(&b, &mut rb).unwrap();
        }
        prop_assert_eq!(sa, sb);
    }

    #[test]
    fn trajectories_are_reproducible(seed in any::<u64>(), rep in 0u64..1000) {
        let p = params(3, 0.6, 0.3, 0.2, 0.5, 0.8);
        let run = || {
            let mut rng = RandomStream::new(seed, rep);
            let mut s = WalkState::initial(&p, &mut rng);
            for _ in 0..100 {
                s = s.step(&p, &mut rng).unwrap();
            }
            s
        };
        prop_assert_eq!(run(), run());
    }
}

#[test]
fn ensemble_matches_stepwise_evolution() {
    // The ensemble engine and WalkState::step must produce the same trajectory.
    let p = params(4, 0.7, 0.4, 0.3, 0.5, 0.75);
    let res = run_ensemble(&p, &RecordingGrid::explicit(vec![0, 7, 50]), &EnsembleConfig::new(3, 21)).unwrap();
    for rep in 0..3 {
        let mut rng = RandomStream::new(21, rep as u64);
        let mut s = WalkState::initial(&p, &mut rng);
        for (g, target) in [0u64, 7, 50].iter().enumerate() {
            while s.step < *target {
                s = s.step(&p, &mut rng).unwrap();
            }
            assert_eq!(res.walker_values(rep, g).unwrap(), s.z.as_slice());
        }
    }
}

#[test]
fn q_irrelevance_holds_for_whole_ensembles() {
    let grid = RecordingGrid::explicit(vec![10, 1000]);
    let cfg = EnsembleConfig::new(50, 5);
    let a = run_ensemble(&params(3, 1.0, 0.5, 0.1, 0.5, 0.75), &grid, &cfg).unwrap();
    let b = run_ensemble(&params(3, 1.0, 0.5, 0.9, 0.5, 0.75), &grid, &cfg).unwrap();
    assert_eq!(a.snapshots, b.snapshots);
    assert_eq!(a.full_z, b.full_z);
}

#[test]
fn schedule_exhaustion_propagates() {
    let p = ModelParams::new(
        2,
        1.0,
        0.5,
        0.5,
        StepSchedule::Explicit { values: vec![0.1, 0.1] },
        InitialLaw::default(),
    )
    .unwrap();
    let mut rng = RandomStream::new(0, 0);
    let s = WalkState::initial(&p, &mut rng);
    let s = s.step(&p, &mut rng).unwrap().step(&p, &mut rng).unwrap();
    assert!(matches!(
        s.step(&p, &mut rng),
        Err(irw_core::Error::ScheduleExhausted { index: 2, available: 2 })
    ));
    assert!(run_ensemble(&p, &RecordingGrid::explicit(vec![3]), &EnsembleConfig::new(1, 0)).is_err());
}
