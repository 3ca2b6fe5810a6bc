//! Reproducible random streams.
//!
//! Every stream is a ChaCha8 keystream: the 256-bit key is derived from the
//! experiment seed and the 64-bit stream id packs the replication index with
//! the role of the stream. Streams for different `(replication, role)` pairs
//! never overlap, and each one is addressed directly by its counter, so
//! replications can run in any order or in parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// What a stream is used for; distinct roles draw disjoint variates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamRole {
    /// Standard normals fed to the joint Cholesky factor.
    Joint = 0,
    /// Increments of the independent Brownian motion `W`.
    Dw = 1,
    /// Spectral variates of the circulant-embedding sampler.
    DavisHarte = 2,
}

const ROLE_BITS: u32 = 2;

/// Identifies one replication of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReplicationKey {
    pub seed: u64,
    pub replication: u64,
}

impl ReplicationKey {
    pub fn new(seed: u64, replication: u64) -> Self {
        Self { seed, replication }
    }

    pub fn stream(&self, role: StreamRole) -> RngStream {
        RngStream::new(self.seed, self.replication, role)
    }
}

#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, replication: u64, role: StreamRole) -> Self {
        assert!(
            replication < 1 << (64 - ROLE_BITS),
            "replication index out of range"
        );
        let mut key = [0u8; 32];
        let mut state = seed;
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream((replication << ROLE_BITS) | role as u64);
        Self { inner }
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn fill_standard_normal(&mut self, out: &mut [f64]) {
        for x in out.iter_mut() {
            *x = self.inner.sample(StandardNormal);
        }
    }

    pub fn standard_normals(&mut self, len: usize) -> Vec<f64> {
        let mut v = vec![0.0; len];
        self.fill_standard_normal(&mut v);
        v
    }
}
