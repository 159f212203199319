//! Seeded randomness with named substreams.
//!
//! A substream's generator key is the SHA-256 digest of its full path of
//! names under the root seed, so draws do not depend on call order, thread
//! schedule or platform.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

use crate::linalg::{c, C64};

#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    path: String,
    rng: ChaCha20Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::at(seed, String::new())
    }

    fn at(seed: u64, path: String) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(seed.to_le_bytes());
        hasher.update(path.as_bytes());
        let key: [u8; 32] = hasher.finalize().into();
        Self {
            seed,
            path,
            rng: ChaCha20Rng::from_seed(key),
        }
    }

    /// Independent stream addressed by `name` below this one. The result is
    /// unaffected by any draws already taken from `self`.
    pub fn substream(&self, name: &str) -> Self {
        Self::at(self.seed, format!("{}/{}", self.path, name))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Standard complex Gaussian, `E|z|^2 = 1`.
    pub fn complex_normal(&mut self) -> C64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        c(self.normal() * s, self.normal() * s)
    }
}

/// Seed for item `index` of a seeded batch.
pub fn derive_seed(seed: u64, name: &str, index: u64) -> u64 {
    RandomSource::new(seed)
        .substream(name)
        .substream(&index.to_string())
        .next_u64()
}
