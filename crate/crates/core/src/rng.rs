//! Reproducible, splittable randomness.
//!
//! Every experiment is driven by one master seed. A [`Seed`] names a
//! (master, stream) pair; [`Seed::derive`] computes the seed of a child
//! stream directly from its index so that trial `i` never depends on
//! trials `0..i`. Streams are ChaCha8 keystreams: the master seed selects
//! the key and the stream value selects one of the 2^64 ChaCha streams, so
//! two distinct stream values never share generator state.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Result};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer. Bijective on `u64`.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub master: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(master: u64) -> Self {
        Seed { master, stream: 0 }
    }

    /// Seed drawn from OS entropy, for runs without an explicit `--seed`.
    pub fn from_entropy() -> Self {
        Seed::new(rand::rng().next_u64())
    }

    /// Child seed number `index`.
    ///
    /// The child keeps the master and replaces the stream with
    /// `splitmix64(stream + (index + 1) * GOLDEN_GAMMA)`. For a fixed parent
    /// the map `index -> stream` is injective (SplitMix64 is a bijection and
    /// the Weyl increment is odd), so sibling streams never coincide.
    pub fn derive(self, index: u64) -> Seed {
        let step = index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA);
        Seed {
            master: self.master,
            stream: splitmix64(self.stream.wrapping_add(step)),
        }
    }

    pub fn rng(self) -> RngStream {
        let mut inner = ChaCha8Rng::seed_from_u64(self.master);
        inner.set_stream(self.stream);
        RngStream { inner }
    }
}

/// The generator owned by one trial.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    /// Uniform draw on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// `true` with probability `p`; `p = 0` never fires, `p = 1` always does.
    pub fn bernoulli(&mut self, p: f64) -> Result<bool> {
        check_probability("p", p)?;
        Ok(self.uniform() < p)
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_is_pure() {
        let s = Seed::new(42);
        assert_eq!(s.derive(0), s.derive(0));
        assert_ne!(s.derive(1), s.derive(2));
        assert_ne!(s.derive(0), s);
    }

    #[test]
    fn replay_is_bit_identical() {
        let s = Seed::new(7).derive(3);
        let a: Vec<u64> = {
            let mut r = s.rng();
            (0..64).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = s.rng();
            (0..64).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn sibling_streams_differ() {
        let s = Seed::new(7);
        let mut a = s.derive(0).rng();
        let mut b = s.derive(1).rng();
        let xa: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_ne!(xa, xb);
    }

    #[test]
    fn bernoulli_extremes_and_range() {
        let mut r = Seed::new(1).rng();
        for _ in 0..10_000 {
            assert!(!r.bernoulli(0.0).unwrap());
            assert!(r.bernoulli(1.0).unwrap());
        }
        assert!(r.bernoulli(-0.1).is_err());
        assert!(r.bernoulli(1.5).is_err());
        assert!(r.bernoulli(f64::NAN).is_err());
    }

    #[test]
    fn bernoulli_half_mean() {
        // 3 sigma of the mean of 10^6 fair coins is 0.0015.
        let mut r = Seed::new(99).rng();
        let n = 1_000_000;
        let hits = (0..n).filter(|_| r.bernoulli(0.5).unwrap()).count();
        let mean = hits as f64 / n as f64;
        assert!((mean - 0.5).abs() < 0.002, "mean {mean}");
    }

    #[test]
    fn uniform_moments() {
        let mut r = Seed::new(5).derive(11).rng();
        let n = 1_000_000usize;
        let xs: Vec<f64> = (0..n).map(|_| r.uniform()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // Var(U) = 1/12, Var(mean) = 1/(12n); Var(U^2 - ...) ~ 1/180 per draw.
        let sd_mean = (1.0 / 12.0 / n as f64).sqrt();
        let sd_var = (1.0 / 180.0 / n as f64).sqrt();
        assert!((mean - 0.5).abs() < 4.0 * sd_mean, "mean {mean}");
        assert!((var - 1.0 / 12.0).abs() < 4.0 * sd_var, "var {var}");
    }
}
