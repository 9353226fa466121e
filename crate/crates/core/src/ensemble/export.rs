use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::engine::EnsembleResult;
use super::moments::MomentRecord;
use crate::error::Result;
use crate::model::ModelParams;

/// Everything needed to rerun an ensemble bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub params_digest: String,
    pub master_seed: u64,
    pub replications: u64,
    pub grid: Vec<u64>,
    pub params: ModelParams,
    /// Free-form configuration of the producing command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

impl EnsembleResult {
    pub fn manifest(&self, config: Option<serde_json::Value>) -> Manifest {
        Manifest {
            params_digest: self.params_digest.clone(),
            master_seed: self.master_seed,
            replications: self.replications,
            grid: self.grid.clone(),
            params: self.params.clone(),
            config,
        }
    }

    /// `rep,n,walker,z` rows. Falls back to reduced rows when walker vectors
    /// were not stored; returns whether the full form was written.
    pub fn write_snapshots_csv<W: Write>(&self, out: W) -> Result<bool> {
        if self.full_z.is_none() {
            self.write_reduced_csv(out)?;
            return Ok(false);
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["rep", "n", "walker", "z"])?;
        for rep in 0..self.replications as usize {
            for (g, n) in self.grid.iter().enumerate() {
                let z = self.walker_values(rep, g).expect("full snapshots present");
                for (i, zi) in z.iter().enumerate() {
                    w.write_record([rep.to_string(), n.to_string(), i.to_string(), zi.to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(true)
    }

    /// `rep,n,zbar,sync_msq` rows regardless of what was stored.
    pub fn write_reduced_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["rep", "n", "zbar", "sync_msq"])?;
        for (rep, snaps) in self.replication_iter().enumerate() {
            for (n, s) in self.grid.iter().zip(snaps) {
                w.write_record([
                    rep.to_string(),
                    n.to_string(),
                    s.z_bar.to_string(),
                    s.sync_msq.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn export_snapshots(&self, path: &Path) -> Result<bool> {
        self.write_snapshots_csv(File::create(path)?)
    }
}

pub fn write_moments_csv<W: Write>(records: &[MomentRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "mean_zbar",
        "var_zbar",
        "mean_sq_sync",
        "mean_sq_conv_proxy",
    ])?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.mean_zbar.to_string(),
            r.var_zbar.to_string(),
            r.mean_sq_sync.to_string(),
            r.mean_sq_conv_proxy.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_manifest(manifest: &Manifest, path: &Path) -> Result<()> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, manifest)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    Ok(serde_json::from_reader(File::open(path)?)?)
}
