//! Counter-based random substreams.
//!
//! Every pipeline node draws from its own ChaCha8 stream keyed by `(base_seed, phase, node,
//! member)`, so the values a node sees never depend on what other nodes consumed.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Identifies one substream within a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub phase: u8,
    pub index: u32,
    /// 0 for the node itself, `j + 1` for member `j` of a one-of group.
    pub member: u32,
}

impl StreamKey {
    pub fn node(phase: u8, index: usize) -> Self {
        Self { phase, index: index as u32, member: 0 }
    }

    pub fn member(phase: u8, index: usize, member: usize) -> Self {
        Self { phase, index: index as u32, member: member as u32 + 1 }
    }

    fn stream_id(&self) -> u64 {
        ((self.phase as u64 + 1) << 56) | ((self.index as u64) << 24) | (self.member as u64 & 0xFF_FFFF)
    }
}

#[derive(Debug, Clone)]
pub struct StreamRng(ChaCha8Rng);

impl StreamRng {
    pub fn new(base_seed: u64, key: StreamKey) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(base_seed);
        inner.set_stream(key.stream_id());
        Self(inner)
    }

    /// A free-standing stream, for direct effect calls outside a pipeline.
    pub fn seeded(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    /// Uniform in [lo, hi]; returns `lo` when the range is empty.
    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return lo;
        }
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in [lo, hi] inclusive.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        if hi <= lo {
            return lo;
        }
        self.0.random_range(lo..=hi)
    }

    /// Uniform index in [0, n). `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        self.0.random_range(0..n as u64) as usize
    }

    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        if sd <= 0.0 {
            return mean;
        }
        Normal::new(mean, sd).expect("finite positive sd").sample(&mut self.0)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

impl RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// SplitMix64 finalizer, used to fold path hashes and seeds together.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
