use std::path::Path;

use irw_core::analytics::{
    analyze_rates, conv_rate_tests, convergence_to_q_test, covariance_structure_test, enumeration_gof_test,
    fixation_test, marginal_tests, polarization_test, rate_tests, required_steps, scaled_process,
    sync_rate_tests, synchronization_test, LimitTheorem, RateAnalysis, RateTolerances, TestReport, VtSpec,
};
use irw_core::applications::{grow_with_max_degrees, hub_rate, urn_to_schedule, UrnSpec};
use irw_core::ensemble::{
    moment_stream, run_ensemble, write_moments_csv, EnsembleResult, RecordingGrid, SnapshotMode,
};
use irw_core::model::InitialLaw;
use irw_core::oracle::{enumerate_distribution, variance_bounds_interacting, variance_recursion_alpha0};
use irw_core::rng::{RandomStream, StreamDomain};

use crate::config::RunConfig;
use crate::output::OutDir;
use crate::CliError;

/// Names accepted by `irw verify --theorem`.
pub const THEOREMS: [&str; 13] = [
    "polarization",
    "convergence-q",
    "fixation",
    "synchronization",
    "sync-rate",
    "conv-rate",
    "rates",
    "fclt-fluct",
    "fclt-sync",
    "fclt-q",
    "fclt-sync-q",
    "covariance",
    "enumeration",
];

fn run(cfg: &RunConfig, grid: &RecordingGrid, threads: Option<usize>) -> Result<EnsembleResult, CliError> {
    let mut ensemble = cfg.ensemble.clone();
    ensemble.threads = threads;
    Ok(run_ensemble(&cfg.model, grid, &ensemble)?)
}

pub fn simulate(cfg: &RunConfig, threads: Option<usize>, out: &mut OutDir) -> Result<(), CliError> {
    let res = run(cfg, &cfg.grid.resolve(&[])?, threads)?;
    out.table("snapshots", |w| res.write_snapshots_csv(w).map(|_| ()))?;
    out.table("moments", |w| write_moments_csv(&moment_stream(&res), w))?;
    if let Some(draws) = &res.draws {
        out.table("draws", |w| {
            let mut w = csv::Writer::from_writer(w);
            w.write_record(["rep", "n", "draw"])?;
            for (rep, d) in draws.iter().enumerate() {
                for (k, bit) in d.to_bits().iter().enumerate() {
                    w.write_record([rep.to_string(), (k + 1).to_string(), u8::from(*bit).to_string()])?;
                }
            }
            w.flush()?;
            Ok(())
        })?;
    }
    let embedded = serde_json::to_value(cfg).map_err(irw_core::Error::from)?;
    out.json("manifest.json", &res.manifest(Some(embedded)))?;
    println!(
        "simulated {} replications of {} walkers to step {} (digest {})",
        res.replications,
        res.n_walkers,
        res.grid.last().copied().unwrap_or(0),
        res.params_digest
    );
    Ok(())
}

fn rate_tolerances(cfg: &RunConfig) -> RateTolerances {
    let v = &cfg.verify;
    RateTolerances {
        slope: v.slope_tolerance,
        prefactor_rel: v.prefactor_tolerance,
        min_separation: (v.min_separation >= 0.0).then_some(v.min_separation),
    }
}

fn rate_analysis(cfg: &RunConfig, threads: Option<usize>, out: &mut OutDir) -> Result<RateAnalysis, CliError> {
    let res = run(cfg, &cfg.grid.resolve(&[])?, threads)?;
    let [lo, hi] = cfg.verify.fit_window;
    let analysis = analyze_rates(&res, lo, hi)?;
    out.table("rates_table", |w| analysis.write_table_csv(w))?;
    out.table("rates_summary", |w| analysis.write_summary_csv(w))?;
    out.table("moments", |w| write_moments_csv(&analysis.moments, w))?;
    Ok(analysis)
}

pub fn rates(cfg: &RunConfig, threads: Option<usize>, out: &mut OutDir) -> Result<(), CliError> {
    let a = rate_analysis(cfg, threads, out)?;
    println!(
        "sync slope {:.4} (theory {:.4}), prefactor {:.5} (theory {:.5})",
        a.sync_fit.slope, a.theory.sync_slope, a.sync_prefactor, a.theory.sync_prefactor
    );
    println!(
        "conv slope {:.4} (theory {:.4}), prefactor {:.5} (theory {:.5})",
        a.conv_slope(),
        a.theory.conv_slope,
        a.conv_prefactor,
        a.theory.conv_prefactor
    );
    Ok(())
}

fn vt_spec(cfg: &RunConfig, theorem: LimitTheorem) -> Result<VtSpec, CliError> {
    let m = &cfg.model;
    let (c, gamma) = m
        .schedule
        .power_law_params()
        .ok_or_else(|| CliError::config("limit theorems need a power_law schedule"))?;
    Ok(VtSpec::new(theorem, c, gamma, m.alpha, m.rho, m.q, m.n_walkers, 0.5)?)
}

fn fclt(
    cfg: &RunConfig,
    threads: Option<usize>,
    theorem: LimitTheorem,
    times: &[f64],
) -> Result<(EnsembleResult, irw_core::analytics::ScaledProcess), CliError> {
    let spec = vt_spec(cfg, theorem)?;
    let n = cfg.verify.fclt_n;
    let grid = cfg.grid.resolve(&required_steps(&spec, n, times))?;
    let res = run(cfg, &grid, threads)?;
    let process = scaled_process(&res, &spec, n, times)?;
    Ok((res, process))
}

fn initial_vector(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    match &cfg.model.initial {
        InitialLaw::Deterministic { values } if values.len() == 1 => Ok(vec![values[0]; cfg.model.n_walkers]),
        InitialLaw::Deterministic { values } => Ok(values.clone()),
        _ => Err(CliError::config("exact enumeration needs a deterministic initial law")),
    }
}

pub fn verify(cfg: &RunConfig, theorem: &str, threads: Option<usize>, out: &mut OutDir) -> Result<bool, CliError> {
    let v = &cfg.verify;
    let plain = || -> Result<EnsembleResult, CliError> { run(cfg, &cfg.grid.resolve(&[])?, threads) };
    let report: TestReport = match theorem {
        "polarization" => polarization_test(&plain()?, v.max_gap)?,
        "convergence-q" => convergence_to_q_test(&plain()?, v.q_tolerance)?,
        "synchronization" => synchronization_test(&plain()?, v.max_sync_msq)?,
        "fixation" => {
            let mut with_draws = cfg.clone();
            with_draws.ensemble.record_draws = true;
            let res = run(&with_draws, &cfg.grid.resolve(&[])?, threads)?;
            fixation_test(&res, v.expect_fixation, v.fixation_bound)?
        }
        "sync-rate" | "conv-rate" | "rates" => {
            let a = rate_analysis(cfg, threads, out)?;
            let tol = rate_tolerances(cfg);
            match theorem {
                "sync-rate" => TestReport::all("sync-rate", sync_rate_tests(&a, &tol)),
                "conv-rate" => TestReport::all("conv-rate", conv_rate_tests(&a, &tol)),
                _ => rate_tests(&a, &tol),
            }
        }
        "fclt-fluct" | "fclt-sync" | "fclt-q" | "fclt-sync-q" => {
            let limit = match theorem {
                "fclt-fluct" => LimitTheorem::FluctZ,
                "fclt-sync" => LimitTheorem::SyncRho1,
                "fclt-q" => LimitTheorem::FluctQ,
                _ => LimitTheorem::SyncQ,
            };
            let (_, process) = fclt(cfg, threads, limit, &v.times)?;
            marginal_tests(theorem, &process, v.level)?
        }
        "covariance" => {
            let (_, process) = fclt(cfg, threads, LimitTheorem::FluctZ, &v.covariance_times)?;
            covariance_structure_test(&process, v.max_covariance_error)?
        }
        "enumeration" => {
            let horizon = cfg.oracle.horizon;
            let exact = enumerate_distribution(&cfg.model, &initial_vector(cfg)?, horizon)?;
            let mut full = cfg.clone();
            full.ensemble.snapshot_mode = SnapshotMode::Full;
            let res = run(&full, &RecordingGrid::explicit((1..=horizon).collect()), threads)?;
            let parts = (1..=horizon)
                .map(|step| enumeration_gof_test(&res, &exact, step, v.level))
                .collect::<irw_core::Result<Vec<_>>>()?;
            TestReport::all("enumeration", parts)
        }
        other => {
            return Err(CliError::config(format!(
                "unknown theorem '{other}'; expected one of: {}",
                THEOREMS.join(", ")
            )))
        }
    };
    out.json("report.json", &report)?;
    println!("{report}");
    Ok(report.passed)
}

pub fn graph(delta: f64, n_max: u64, lambda: f64, seed: u64, out: &mut OutDir) -> Result<(), CliError> {
    let mut rng = RandomStream::for_domain(StreamDomain::Graph, seed, 0);
    let (graph, max_degrees) = grow_with_max_degrees(delta, n_max, &mut rng)?;
    out.table("degrees", |w| graph.write_degrees_csv(w))?;
    out.table("schedule", |w| {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(["step", "n", "max_degree", "r_n"])?;
        for (k, d) in max_degrees.iter().enumerate() {
            let n = k as u64 + 2;
            w.write_record([k.to_string(), n.to_string(), d.to_string(), hub_rate(lambda, *d, n).to_string()])?;
        }
        w.flush()?;
        Ok(())
    })?;
    println!(
        "grew {} vertices; max degree {} at vertex {}",
        graph.n_vertices(),
        graph.max_degree(),
        graph.max_degree_vertex + 1
    );
    Ok(())
}

pub fn urn(spec_path: &Path, horizon: u64, out: &mut OutDir) -> Result<(), CliError> {
    let text = std::fs::read_to_string(spec_path)
        .map_err(|e| CliError::config(format!("{}: {e}", spec_path.display())))?;
    let spec: UrnSpec =
        toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", spec_path.display())))?;
    let mapping = urn_to_schedule(&spec, horizon)?;
    let irw_core::model::StepSchedule::Explicit { values } = &mapping.schedule else {
        unreachable!("urn schedules are materialized");
    };
    let q = mapping.q.map(|q| q.to_string()).unwrap_or_default();
    out.table("urn_schedule", |w| {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(["n", "r_n", "rho", "q"])?;
        for (n, r) in values.iter().enumerate() {
            w.write_record([n.to_string(), r.to_string(), mapping.rho.to_string(), q.clone()])?;
        }
        w.flush()?;
        Ok(())
    })?;
    println!("rho = {}, q = {}, Z_0 = {}", mapping.rho, if q.is_empty() { "-" } else { &q }, mapping.z0);
    Ok(())
}

pub fn oracle(cfg: &RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let model = &cfg.model;
    let z0 = initial_vector(cfg)?;
    let exact = enumerate_distribution(model, &z0, cfg.oracle.horizon)?;
    out.table("exact_distribution", |w| exact.write_csv(w))?;
    out.table("exact_moments", |w| {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(["step", "mean_zbar", "var_zbar", "atoms"])?;
        for k in 0..=exact.horizon() {
            w.write_record([
                k.to_string(),
                exact.mean_zbar(k).to_string(),
                exact.var_zbar(k).to_string(),
                exact.at(k).len().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    })?;
    if model.rho == 1.0 {
        let horizon = cfg.oracle.recursion_horizon;
        let x0 = model.initial.mean_bernoulli_variance(model.n_walkers);
        if model.n_walkers == 1 {
            let x = variance_recursion_alpha0(x0, &model.schedule, horizon)?;
            out.table("variance_recursion", |w| irw_core::oracle::write_sequence_csv("x", &x, w))?;
        }
        let env = variance_bounds_interacting(x0, &model.schedule, model.alpha, model.n_walkers, horizon)?;
        out.table("variance_envelope", |w| {
            let mut w = csv::Writer::from_writer(w);
            w.write_record(["n", "lower", "upper"])?;
            for (n, (lo, hi)) in env.lower.iter().zip(&env.upper).enumerate() {
                w.write_record([n.to_string(), lo.to_string(), hi.to_string()])?;
            }
            w.flush()?;
            Ok(())
        })?;
    }
    println!("enumerated {} atoms at step {}", exact.at(exact.horizon()).len(), exact.horizon());
    Ok(())
}
