//! Seed derivation.
//!
//! Every random decision in a run is drawn from a named substream derived
//! from one root seed, so adding draws to one stream never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Substream labels used by the factorizer and the benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stream {
    /// Bit-flip masks of the asymmetric codebook.
    Perturbation,
    /// Attention noise of factor `f`.
    Noise(usize),
    /// Sign ties, initial bundling and restarts.
    Ties,
    /// Codebook generation of a trial.
    Codebooks,
    /// Planted ground-truth indices of a trial.
    GroundTruth,
    /// Root seed handed to the factorizer of a trial.
    Factorizer,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Perturbation => 0x5045_5254,
            Stream::Noise(f) => 0x4e4f_4953_0000_0000 ^ f as u64,
            Stream::Ties => 0x5449_4553,
            Stream::Codebooks => 0x434f_4445,
            Stream::GroundTruth => 0x5452_5554,
            Stream::Factorizer => 0x4641_4354,
        }
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combines a parent seed with a sequence of indices, order-sensitively.
pub fn derive_seed(parent: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(mix64(parent), |acc, &k| mix64(acc ^ mix64(k)))
}

pub fn stream_seed(root: u64, stream: Stream) -> u64 {
    derive_seed(root, &[stream.tag()])
}

pub fn substream(root: u64, stream: Stream) -> Rng {
    Rng::seed_from_u64(stream_seed(root, stream))
}

pub fn seeded(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
