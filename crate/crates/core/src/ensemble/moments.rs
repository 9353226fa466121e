use serde::{Deserialize, Serialize};

use super::engine::EnsembleResult;

/// Running count, mean and centred second moment, mergeable across shards.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MomentAccumulator {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &MomentAccumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        self.mean += delta * nb / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.count += other.count;
    }

    /// Unbiased sample variance; zero with fewer than two points.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Variance with divisor `count`.
    pub fn population_variance(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.m2 / self.count as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for MomentAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = MomentAccumulator::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// Cross-replication summary at one grid step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRecord {
    pub n: u64,
    pub mean_zbar: f64,
    pub var_zbar: f64,
    /// Average over walkers and replications of (Z_n(i) - Z_n)^2.
    pub mean_sq_sync: f64,
    /// Average over replications of (Z_n - Z_T)^2 with T the last grid step,
    /// an estimate of E[(Z_n - Z)^2].
    pub mean_sq_conv_proxy: f64,
    pub se_sync: f64,
    pub se_conv_proxy: f64,
}

pub fn moment_stream(result: &EnsembleResult) -> Vec<MomentRecord> {
    let last = result.grid.len() - 1;
    result
        .grid
        .iter()
        .enumerate()
        .map(|(g, &n)| {
            let zbar: MomentAccumulator = result.replication_iter().map(|r| r[g].z_bar).collect();
            let sync: MomentAccumulator =
                result.replication_iter().map(|r| r[g].sync_msq).collect();
            let conv: MomentAccumulator = result
                .replication_iter()
                .map(|r| (r[g].z_bar - r[last].z_bar).powi(2))
                .collect();
            MomentRecord {
                n,
                mean_zbar: zbar.mean,
                var_zbar: zbar.variance(),
                mean_sq_sync: sync.mean,
                mean_sq_conv_proxy: conv.mean,
                se_sync: sync.std_error(),
                se_conv_proxy: conv.std_error(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_matches_two_pass() {
        let xs = [0.1, 0.7, 0.3, 0.9, 0.25];
        let acc: MomentAccumulator = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        assert!((acc.mean - mean).abs() < 1e-15);
        assert!((acc.variance() - var).abs() < 1e-15);
    }

    #[test]
    fn merge_with_empty() {
        let mut a = MomentAccumulator::new();
        let b: MomentAccumulator = [1.0, 2.0].into_iter().collect();
        a.merge(&b);
        assert_eq!(a, b);
        a.merge(&MomentAccumulator::new());
        assert_eq!(a, b);
    }
}
