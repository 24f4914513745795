//! Seeded Wiener increments.
//!
//! Every sample path draws from its own ChaCha8 stream. The 256-bit key holds
//! the master seed and a row index; the 64-bit ChaCha stream id is the
//! trajectory index. Gaussian draws use the ziggurat sampler of
//! `rand_distr::StandardNormal`. Crate versions are pinned in `Cargo.toml`
//! because both the generator and the sampler define the bit stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Identifies one independent substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master_seed: u64,
    pub row: u64,
    pub trajectory: u64,
}

impl StreamKey {
    pub fn new(master_seed: u64, row: u64, trajectory: u64) -> Self {
        Self {
            master_seed,
            row,
            trajectory,
        }
    }

    /// Key of a bare seed, used by [`gaussian_increments`].
    pub fn from_seed(seed: u64) -> Self {
        Self::new(seed, 0, 0)
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.row.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.trajectory);
        rng
    }
}

/// Endless source of `N(0, dt)` increments.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
    sqrt_dt: f64,
}

impl NoiseStream {
    pub fn new(key: StreamKey, dt: f64) -> Self {
        Self {
            rng: key.rng(),
            sqrt_dt: dt.sqrt(),
        }
    }

    #[inline]
    pub fn next_increment(&mut self) -> f64 {
        let g: f64 = self.rng.sample(StandardNormal);
        g * self.sqrt_dt
    }
}

impl Iterator for NoiseStream {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        Some(self.next_increment())
    }
}

/// A materialized block of increments together with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    pub key: StreamKey,
    pub dt: f64,
    pub increments: Vec<f64>,
}

impl NoisePath {
    pub fn generate(key: StreamKey, dt: f64, n: usize) -> Self {
        Self {
            key,
            dt,
            increments: NoiseStream::new(key, dt).take(n).collect(),
        }
    }

    /// Zero increments, for deterministic runs.
    pub fn silent(dt: f64, n: usize) -> Self {
        Self {
            key: StreamKey::from_seed(0),
            dt,
            increments: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    /// Sums consecutive groups of `factor` increments: the same Brownian
    /// path seen at step `factor * dt`. A trailing partial group is dropped.
    pub fn coarsen(&self, factor: usize) -> NoisePath {
        assert!(factor > 0);
        NoisePath {
            key: self.key,
            dt: self.dt * factor as f64,
            increments: self
                .increments
                .chunks_exact(factor)
                .map(|c| c.iter().sum())
                .collect(),
        }
    }

    pub fn negated(&self) -> NoisePath {
        NoisePath {
            key: self.key,
            dt: self.dt,
            increments: self.increments.iter().map(|w| -w).collect(),
        }
    }
}

/// `n` i.i.d. `N(0, dt)` draws, fully determined by `(seed, dt, n)`.
pub fn gaussian_increments(seed: u64, dt: f64, n: usize) -> NoisePath {
    NoisePath::generate(StreamKey::from_seed(seed), dt, n)
}
