//! Verification of the limit theorems on simulated ensembles: limit
//! variances, scaled processes, rate fits and distributional tests.

mod gof;
mod rates;
mod regression;
mod report;
mod scaled;
mod verify;
mod vt;

pub use gof::{chi_square_gof, ks_critical_constant, ks_statistic_normal};
pub use rates::{
    analyze_rates, conv_rate_tests, rate_tests, sync_rate_tests, RateAnalysis, RateTheory,
    RateTolerances,
};
pub use regression::{
    fixed_slope_prefactor, rate_regression, truncated_fixed_prefactor, truncated_power_fit,
    RateFit, TruncatedPowerFit,
};
pub use report::TestReport;
pub use scaled::{
    required_steps, scaled_fluct_process, scaled_process, scaled_q_process, scaled_sync_process,
    simulate_time_changed_wiener, ScaledProcess,
};
pub use verify::{
    convergence_to_q_test, covariance_structure_test, fixation_detector, fixation_index_with_tail,
    enumeration_gof_test, fixation_test, increment_independence_test, marginal_tests, mixed_gaussian_test,
    polarization_test, synchronization_test, MIN_BERNOULLI_VARIANCE,
};
pub use vt::{v_t, LimitTheorem, Regime, VtSpec};
