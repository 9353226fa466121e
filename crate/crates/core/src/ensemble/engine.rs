use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::grid::RecordingGrid;
use crate::error::{Error, Result};
use crate::model::{mean, ModelParams};
use crate::rng::RandomStream;

/// Above this many stored walker values, `Auto` keeps only reduced statistics.
pub const FULL_SNAPSHOT_LIMIT: u64 = 100_000_000;
/// Hard cap on stored values of any kind (snapshots, walker vectors, draw bits / 64).
pub const MEMORY_BUDGET: u64 = 400_000_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotMode {
    #[default]
    Auto,
    Full,
    Reduced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub replications: u64,
    pub master_seed: u64,
    /// Store the draws I_1, ..., I_T of each replication (N = 1 only).
    #[serde(default)]
    pub record_draws: bool,
    #[serde(default)]
    pub snapshot_mode: SnapshotMode,
    /// Worker threads; `None` uses the global rayon pool.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl EnsembleConfig {
    pub fn new(replications: u64, master_seed: u64) -> Self {
        Self {
            replications,
            master_seed,
            record_draws: false,
            snapshot_mode: SnapshotMode::Auto,
            threads: None,
        }
    }

    pub fn with_draws(mut self) -> Self {
        self.record_draws = true;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn with_mode(mut self, mode: SnapshotMode) -> Self {
        self.snapshot_mode = mode;
        self
    }
}

/// Reduced statistics of one replication at one grid step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub z_bar: f64,
    /// (1/N) sum_i (Z_n(i) - Z_n)^2.
    pub sync_msq: f64,
    /// Z_n(0) - Z_n, the deviation of the first walker.
    pub lead_dev: f64,
}

impl Snapshot {
    fn of(z: &[f64], z_bar: f64) -> Self {
        let sync_msq = z.iter().map(|x| (x - z_bar).powi(2)).sum::<f64>() / z.len() as f64;
        Self {
            z_bar,
            sync_msq,
            lead_dev: z[0] - z_bar,
        }
    }
}

/// Bit-packed draws I_1, ..., I_T of a single walker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrawRecord {
    len: usize,
    words: Vec<u64>,
}

impl DrawRecord {
    fn with_capacity(len: usize) -> Self {
        Self {
            len: 0,
            words: Vec::with_capacity(len.div_ceil(64)),
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut r = Self::with_capacity(bits.len());
        for b in bits {
            r.push(*b);
        }
        r
    }

    #[inline]
    fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// I_{k+1}.
    pub fn get(&self, k: usize) -> bool {
        assert!(k < self.len, "draw index {k} out of range {}", self.len);
        self.words[k / 64] >> (k % 64) & 1 == 1
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|k| self.get(k)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    /// SHA-256 of the JSON-encoded parameters and grid.
    pub params_digest: String,
    pub params: ModelParams,
    pub master_seed: u64,
    pub replications: u64,
    pub n_walkers: usize,
    pub grid: Vec<u64>,
    /// Replication-major: entry `rep * grid.len() + g`.
    pub snapshots: Vec<Snapshot>,
    /// Walker vectors, entry `(rep * grid.len() + g) * n_walkers + i`, when stored.
    pub full_z: Option<Vec<f64>>,
    pub draws: Option<Vec<DrawRecord>>,
}

struct Replication {
    snapshots: Vec<Snapshot>,
    full_z: Vec<f64>,
    draws: Option<DrawRecord>,
}

pub fn params_digest(params: &ModelParams, grid: &[u64]) -> Result<String> {
    let json = serde_json::to_vec(&(params, grid))?;
    Ok(hex::encode(Sha256::digest(&json)))
}

fn run_replication(
    params: &ModelParams,
    rates: &[f64],
    grid: &[u64],
    seed: u64,
    rep: u64,
    keep_full: bool,
    record_draws: bool,
) -> Replication {
    let mut rng = RandomStream::new(seed, rep);
    let mut z = params.initial.sample(params.n_walkers, &mut rng);
    let mut z_bar = mean(&z);
    let dynamics = params.dynamics();
    let mut snapshots = Vec::with_capacity(grid.len());
    let mut full_z = Vec::with_capacity(if keep_full { grid.len() * z.len() } else { 0 });
    let mut draws = record_draws.then(|| DrawRecord::with_capacity(rates.len()));
    let mut step = 0u64;
    for &target in grid {
        while step < target {
            let r = rates[step as usize];
            match draws.as_mut() {
                Some(rec) => {
                    let mut bit = false;
                    z_bar = dynamics.advance(&mut z, z_bar, r, &mut rng, Some(&mut bit));
                    rec.push(bit);
                }
                None => z_bar = dynamics.advance(&mut z, z_bar, r, &mut rng, None),
            }
            step += 1;
        }
        snapshots.push(Snapshot::of(&z, z_bar));
        if keep_full {
            full_z.extend_from_slice(&z);
        }
    }
    Replication {
        snapshots,
        full_z,
        draws,
    }
}

/// Runs `config.replications` independent trajectories up to the last grid
/// step. Replication j always uses stream (master_seed, j), and results are
/// gathered in replication order, so the output does not depend on threads.
pub fn run_ensemble(
    params: &ModelParams,
    grid: &RecordingGrid,
    config: &EnsembleConfig,
) -> Result<EnsembleResult> {
    params.validate()?;
    if config.replications == 0 {
        return Err(Error::InvalidInput("replications must be >= 1".into()));
    }
    if config.record_draws && params.n_walkers != 1 {
        return Err(Error::InvalidInput("draw recording requires n_walkers = 1".into()));
    }
    let steps = grid.steps()?;
    let horizon = *steps.last().expect("grid is nonempty");
    let rates = params.schedule.materialize(horizon)?;

    let m = config.replications;
    let g = steps.len() as u64;
    let full_values = m
        .saturating_mul(g)
        .saturating_mul(params.n_walkers as u64);
    let keep_full = match config.snapshot_mode {
        SnapshotMode::Full => true,
        SnapshotMode::Reduced => false,
        SnapshotMode::Auto => full_values <= FULL_SNAPSHOT_LIMIT,
    };
    let mut stored = m.saturating_mul(g).saturating_mul(3);
    if keep_full {
        stored = stored.saturating_add(full_values);
    }
    if config.record_draws {
        stored = stored.saturating_add(m.saturating_mul(horizon) / 64);
    }
    if stored > MEMORY_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "{stored} stored values exceed the budget of {MEMORY_BUDGET}; use a coarser grid, \
             fewer replications or reduced snapshots"
        )));
    }

    let run = || -> Vec<Replication> {
        (0..m)
            .into_par_iter()
            .map(|rep| {
                run_replication(
                    params,
                    &rates,
                    &steps,
                    config.master_seed,
                    rep,
                    keep_full,
                    config.record_draws,
                )
            })
            .collect()
    };
    let reps = match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    let mut snapshots = Vec::with_capacity((m * g) as usize);
    let mut full_z = keep_full.then(|| Vec::with_capacity(full_values as usize));
    let mut draws = config.record_draws.then(|| Vec::with_capacity(m as usize));
    for rep in reps {
        snapshots.extend(rep.snapshots);
        if let Some(fz) = full_z.as_mut() {
            fz.extend(rep.full_z);
        }
        if let (Some(all), Some(d)) = (draws.as_mut(), rep.draws) {
            all.push(d);
        }
    }
    Ok(EnsembleResult {
        params_digest: params_digest(params, &steps)?,
        params: params.clone(),
        master_seed: config.master_seed,
        replications: m,
        n_walkers: params.n_walkers,
        grid: steps,
        snapshots,
        full_z,
        draws,
    })
}

impl EnsembleResult {
    pub fn grid_len(&self) -> usize {
        self.grid.len()
    }

    /// Position of step `n` in the grid.
    pub fn grid_index(&self, n: u64) -> Result<usize> {
        self.grid
            .binary_search(&n)
            .map_err(|_| Error::GridMismatch(format!("step {n} is not on the recording grid")))
    }

    /// Snapshots of replication `rep`, one per grid step.
    pub fn replication(&self, rep: usize) -> &[Snapshot] {
        let g = self.grid.len();
        &self.snapshots[rep * g..(rep + 1) * g]
    }

    pub fn replication_iter(&self) -> impl Iterator<Item = &[Snapshot]> + '_ {
        self.snapshots.chunks(self.grid.len())
    }

    /// Walker vector of replication `rep` at grid position `g`, when stored.
    pub fn walker_values(&self, rep: usize, g: usize) -> Option<&[f64]> {
        let n = self.n_walkers;
        let base = (rep * self.grid.len() + g) * n;
        self.full_z.as_ref().map(|z| &z[base..base + n])
    }

    /// Z_T of each replication at the last grid step.
    pub fn terminal_zbar(&self) -> Vec<f64> {
        let last = self.grid.len() - 1;
        self.replication_iter().map(|r| r[last].z_bar).collect()
    }
}
