//! Independent replications of one dynamics, recorded on a step grid.

mod engine;
mod export;
mod grid;
mod moments;

pub use engine::{
    params_digest, run_ensemble, DrawRecord, EnsembleConfig, EnsembleResult, Snapshot,
    SnapshotMode, FULL_SNAPSHOT_LIMIT, MEMORY_BUDGET,
};
pub use export::{read_manifest, write_manifest, write_moments_csv, Manifest};
pub use grid::{fluct_index, time_window_index, RecordingGrid};
pub use moments::{moment_stream, MomentAccumulator, MomentRecord};
