//! Reproducible random streams.
//!
//! Every replication owns a ChaCha8 stream selected by `(master_seed, replication)`.
//! The master seed and a domain tag fill the 256-bit key and the replication index
//! picks one of the 2^64 independent ChaCha streams, so replications never share
//! state and their output does not depend on how work is scheduled across threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Separates the walk dynamics from auxiliary randomness (graph growth, initial
/// laws drawn outside a trajectory, synthetic calibration data).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamDomain {
    Walk,
    Graph,
    Urn,
    Synthetic,
}

impl StreamDomain {
    fn tag(self) -> u64 {
        match self {
            StreamDomain::Walk => 0x5741_4c4b,
            StreamDomain::Graph => 0x0047_5241_5048,
            StreamDomain::Urn => 0x0055_524e,
            StreamDomain::Synthetic => 0x5359_4e54,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    /// Walk stream for replication `replication` under `master_seed`.
    pub fn new(master_seed: u64, replication: u64) -> Self {
        Self::for_domain(StreamDomain::Walk, master_seed, replication)
    }

    pub fn for_domain(domain: StreamDomain, master_seed: u64, replication: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&domain.tag().to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(replication);
        Self { rng }
    }

    /// Uniform on [0, 1) with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Bernoulli(p) using a single uniform compared as `u < p`.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Access to the underlying generator for `rand_distr` samplers.
    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}
