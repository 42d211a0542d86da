//! A dynamic workload built from a static one: every epoch the mapping from
//! popularity rank to item identity is reshuffled, so the distribution shape
//! stays constant while the hot set turns over. The epoch length plays the
//! role of the change speed.

use crate::sketch::mix64;
use crate::Key;

use super::zipf::ZipfSource;
use super::WorkloadSource;

/// A keyed bijection on `[0, domain)`: a four-round Feistel network over the
/// smallest even-width bit domain covering `domain`, cycle-walking until the
/// output lands inside. O(1) amortized, no materialized table.
#[derive(Clone, Copy, Debug)]
pub(crate) struct KeyedPermutation {
    domain: u64,
    half_bits: u32,
    seed: u64,
}

impl KeyedPermutation {
    pub fn new(domain: u64, seed: u64) -> Self {
        assert!(domain > 0);
        let bits = (64 - (domain - 1).leading_zeros()).max(2);
        let half_bits = bits.div_ceil(2);
        KeyedPermutation {
            domain,
            half_bits,
            seed,
        }
    }

    pub fn apply(&self, index: u64) -> u64 {
        debug_assert!(index < self.domain);
        let mask = (1u64 << self.half_bits) - 1;
        let mut x = index;
        loop {
            for round in 0..4u64 {
                let left = x >> self.half_bits;
                let right = x & mask;
                let f = mix64(right ^ self.seed ^ (round.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
                    & mask;
                x = (right << self.half_bits) | (left ^ f);
            }
            if x < self.domain {
                return x;
            }
        }
    }
}

/// Epoch-swapped stream: constant distribution within an epoch, a fresh
/// rank-to-item permutation at every epoch boundary.
#[derive(Clone, Debug)]
pub struct EpochSwapSource {
    base: ZipfSource,
    epoch_length: u64,
    permutation_seed: u64,
    emitted: u64,
    current_epoch: u64,
    permutation: KeyedPermutation,
}

impl EpochSwapSource {
    pub fn new(base: ZipfSource, epoch_length: u64, permutation_seed: u64) -> Self {
        assert!(epoch_length > 0, "epoch length must be positive");
        let universe = base.distribution().universe();
        EpochSwapSource {
            base,
            epoch_length,
            permutation_seed,
            emitted: 0,
            current_epoch: 0,
            permutation: KeyedPermutation::new(universe, mix64(permutation_seed)),
        }
    }

    pub fn epoch_length(&self) -> u64 {
        self.epoch_length
    }

    fn epoch_of_next_request(&self) -> u64 {
        self.emitted / self.epoch_length
    }
}

impl WorkloadSource for EpochSwapSource {
    fn next_key(&mut self) -> Option<Key> {
        let epoch = self.epoch_of_next_request();
        if epoch != self.current_epoch {
            self.current_epoch = epoch;
            self.permutation = KeyedPermutation::new(
                self.base.distribution().universe(),
                mix64(self.permutation_seed ^ epoch),
            );
        }
        self.emitted += 1;
        let rank = self.base.next_rank();
        Some(Key(self.permutation.apply(rank - 1) + 1))
    }
}
