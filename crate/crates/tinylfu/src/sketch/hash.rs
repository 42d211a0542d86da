//! Keyed hashing shared by the sketch structures.
//!
//! Each structure evaluates one 64-bit avalanche hash per operation and
//! derives all of its slot indexes from the two 32-bit halves by double
//! hashing. The stride is forced odd so consecutive probes cannot collapse
//! onto a short cycle.

use crate::Key;

/// splitmix64 finalizer. Full avalanche: every input bit affects every
/// output bit.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives probe indexes in `[0, range)` for a key under a fixed seed.
#[derive(Clone, Copy, Debug)]
pub(crate) struct IndexHasher {
    seed: u64,
}

impl IndexHasher {
    pub(crate) fn new(seed: u64) -> Self {
        IndexHasher { seed }
    }

    /// The j-th probe index: `(h1 + j * h2) mod range` with `h2` odd.
    #[inline]
    pub(crate) fn probe(&self, key: Key, j: u64, range: u64) -> u64 {
        let h = mix64(key.0 ^ self.seed);
        let h1 = h & 0xffff_ffff;
        let h2 = (h >> 32) | 1;
        h1.wrapping_add(j.wrapping_mul(h2)) % range
    }
}
