//! Compact approximate frequency counting.
//!
//! A [`FrequencySketch`] is a packed array of small saturating counters
//! addressed in one of two layouts:
//!
//! * `SingleArrayCbf` — a counting Bloom filter: `k` probe indexes over one
//!   shared array, recording with the minimal-increment rule (only the
//!   counters currently at the minimum are bumped).
//! * `RowsCms` — a count-min sketch: `d` equal-width rows, one index per
//!   row, incrementing either all rows (plain) or only the minimal ones
//!   (conservative update).
//!
//! Estimation is the minimum over the key's counters in both layouts.
//! Counters saturate at a configurable cap and are aged by a bulk halving
//! that runs word-at-a-time over the packed storage.
//!
//! [`ExactHistogram`] is the exact reference the sketches are measured
//! against: a plain hash table with the same record/estimate/halve surface,
//! in floating-point or integer flavour.

mod doorkeeper;
mod exact;
mod hash;
mod packed;

pub use doorkeeper::Doorkeeper;
pub use exact::{ExactHistogram, ExactMode};
pub use packed::{bits_for, storage_width, PackedCounters, PERMITTED_WIDTHS};

pub(crate) use hash::mix64;

use hash::IndexHasher;
use thiserror::Error;

use crate::Key;

/// Counter array layout.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SketchLayout {
    /// One shared counter array probed `hash_count` times per key.
    SingleArrayCbf,
    /// `cms_depth` equal-width rows, one probe per row.
    RowsCms,
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum SketchConfigError {
    #[error("counter width {0} is not one of the permitted packing widths 1/2/4/8")]
    UnsupportedWidth(u8),
    #[error("cap {cap} does not fit in {bits}-bit counters")]
    CapTooLarge { cap: u64, bits: u8 },
    #[error("counter_count {count} is not divisible by cms_depth {depth}")]
    UnevenRows { count: usize, depth: usize },
    #[error("hash_count must be at least 1")]
    NoHashes,
    #[error("rows-cms requires hash_count ({hashes}) equal to cms_depth ({depth})")]
    HashDepthMismatch { hashes: usize, depth: usize },
    #[error("counter_count must be positive")]
    Empty,
}

/// Shape and behaviour of a [`FrequencySketch`].
#[derive(Clone, Debug)]
pub struct SketchConfig {
    /// Total number of counters across the whole structure.
    pub counter_count: usize,
    /// Probes per key. For `RowsCms` this must equal `cms_depth`.
    pub hash_count: usize,
    /// Bits per counter; must divide the 64-bit storage word.
    pub counter_bits: u8,
    /// Saturation value. Counters never exceed it and never wrap.
    pub cap: u64,
    /// Keys the hash; two sketches with different seeds probe differently.
    pub seed: u64,
    pub layout: SketchLayout,
    /// Row count, used only by `RowsCms`.
    pub cms_depth: usize,
    /// `RowsCms` only: increment just the minimal row counters instead of
    /// all of them.
    pub conservative_update: bool,
}

impl SketchConfig {
    /// A counting Bloom filter with the default three probes.
    pub fn cbf(counter_count: usize, counter_bits: u8, cap: u64, seed: u64) -> Self {
        SketchConfig {
            counter_count,
            hash_count: 3,
            counter_bits,
            cap,
            seed,
            layout: SketchLayout::SingleArrayCbf,
            cms_depth: 1,
            conservative_update: false,
        }
    }

    /// A count-min sketch with the default four rows.
    pub fn cms(counter_count: usize, counter_bits: u8, cap: u64, seed: u64) -> Self {
        SketchConfig {
            counter_count,
            hash_count: 4,
            counter_bits,
            cap,
            seed,
            layout: SketchLayout::RowsCms,
            cms_depth: 4,
            conservative_update: false,
        }
    }

    fn validate(&self) -> Result<(), SketchConfigError> {
        if self.counter_count == 0 {
            return Err(SketchConfigError::Empty);
        }
        if !PERMITTED_WIDTHS.contains(&self.counter_bits) {
            return Err(SketchConfigError::UnsupportedWidth(self.counter_bits));
        }
        if self.cap > (1u64 << self.counter_bits) - 1 {
            return Err(SketchConfigError::CapTooLarge {
                cap: self.cap,
                bits: self.counter_bits,
            });
        }
        if self.hash_count == 0 {
            return Err(SketchConfigError::NoHashes);
        }
        if self.layout == SketchLayout::RowsCms {
            if self.counter_count % self.cms_depth != 0 {
                return Err(SketchConfigError::UnevenRows {
                    count: self.counter_count,
                    depth: self.cms_depth,
                });
            }
            if self.hash_count != self.cms_depth {
                return Err(SketchConfigError::HashDepthMismatch {
                    hashes: self.hash_count,
                    depth: self.cms_depth,
                });
            }
        }
        Ok(())
    }
}

/// A compact approximate multiset of keys.
#[derive(Clone, Debug)]
pub struct FrequencySketch {
    config: SketchConfig,
    counters: PackedCounters,
    hasher: IndexHasher,
}

impl FrequencySketch {
    pub fn new(config: SketchConfig) -> Result<Self, SketchConfigError> {
        config.validate()?;
        let counters = PackedCounters::new(config.counter_count, config.counter_bits);
        let hasher = IndexHasher::new(config.seed);
        Ok(FrequencySketch {
            config,
            counters,
            hasher,
        })
    }

    pub fn config(&self) -> &SketchConfig {
        &self.config
    }

    /// The key's probe indexes into the flat counter array. CBF indexes may
    /// repeat; CMS indexes land in disjoint rows by construction.
    fn slots(&self, key: Key) -> impl Iterator<Item = usize> + '_ {
        let (range, row_stride) = match self.config.layout {
            SketchLayout::SingleArrayCbf => (self.config.counter_count as u64, 0),
            SketchLayout::RowsCms => {
                let width = self.config.counter_count / self.config.cms_depth;
                (width as u64, width)
            }
        };
        (0..self.config.hash_count).map(move |j| {
            let within = self.hasher.probe(key, j as u64, range);
            j * row_stride + within as usize
        })
    }

    /// Records one occurrence of the key.
    ///
    /// CBF and conservative CMS read the key's counters first and bump only
    /// those equal to the minimum; plain CMS bumps every row. Counters at
    /// the cap are never touched, so saturation is silent.
    pub fn record(&mut self, key: Key) {
        let slots: Vec<usize> = self.slots(key).collect();
        let minimal_only = match self.config.layout {
            SketchLayout::SingleArrayCbf => true,
            SketchLayout::RowsCms => self.config.conservative_update,
        };
        if minimal_only {
            let min = slots.iter().map(|&s| self.counters.get(s)).min().unwrap();
            if min >= self.config.cap {
                return;
            }
            // A duplicate probe index must only be bumped once.
            let mut done: [usize; 8] = [usize::MAX; 8];
            let mut n = 0;
            for &slot in &slots {
                if self.counters.get(slot) == min && !done[..n].contains(&slot) {
                    self.counters.increment(slot);
                    if n < done.len() {
                        done[n] = slot;
                        n += 1;
                    }
                }
            }
        } else {
            for &slot in &slots {
                if self.counters.get(slot) < self.config.cap {
                    self.counters.increment(slot);
                }
            }
        }
    }

    /// The estimated occurrence count: the minimum over the key's counters.
    pub fn estimate(&self, key: Key) -> u64 {
        self.slots(key).map(|s| self.counters.get(s)).min().unwrap()
    }

    /// Halves every counter, word-at-a-time.
    pub fn halve_all(&mut self) {
        self.counters.halve_all();
    }

    /// Exact storage used by the counters, in bits.
    pub fn counter_bits_total(&self) -> u64 {
        self.counters.counter_bits_total()
    }

    /// Storage allocated including word padding, in bits.
    pub fn allocated_bits(&self) -> u64 {
        self.counters.allocated_bits()
    }

    #[cfg(test)]
    pub(crate) fn counters_mut(&mut self) -> &mut PackedCounters {
        &mut self.counters
    }

    #[cfg(test)]
    pub(crate) fn counters(&self) -> &PackedCounters {
        &self.counters
    }

    #[cfg(test)]
    pub(crate) fn slot_indexes(&self, key: Key) -> Vec<usize> {
        self.slots(key).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cbf(count: usize, bits: u8, cap: u64) -> FrequencySketch {
        FrequencySketch::new(SketchConfig::cbf(count, bits, cap, 0x5eed)).unwrap()
    }

    fn cms(count: usize, bits: u8, cap: u64, conservative: bool) -> FrequencySketch {
        let mut cfg = SketchConfig::cms(count, bits, cap, 0x5eed);
        cfg.conservative_update = conservative;
        FrequencySketch::new(cfg).unwrap()
    }

    /// Keys whose three CBF probes are pairwise distinct, so counter values
    /// can be staged per-slot unambiguously.
    fn key_with_distinct_slots(sketch: &FrequencySketch) -> Key {
        (0..)
            .map(Key)
            .find(|&k| {
                let s = sketch.slot_indexes(k);
                s.iter().collect::<std::collections::HashSet<_>>().len() == s.len()
            })
            .unwrap()
    }

    #[test]
    fn cbf_minimal_increment_bumps_only_minimum() {
        let mut sketch = cbf(1024, 4, 15);
        let key = key_with_distinct_slots(&sketch);
        let slots = sketch.slot_indexes(key);
        for (&slot, v) in slots.iter().zip([2u64, 2, 5]) {
            sketch.counters_mut().set(slot, v);
        }
        sketch.record(key);
        let after: Vec<u64> = slots.iter().map(|&s| sketch.counters().get(s)).collect();
        assert_eq!(after, vec![3, 3, 5]);
        assert_eq!(sketch.estimate(key), 3);
    }

    #[test]
    fn saturated_counters_never_change() {
        for mut sketch in [cbf(256, 4, 15), cms(256, 4, 15, false), cms(256, 4, 15, true)] {
            let key = Key(42);
            for slot in sketch.slot_indexes(key) {
                sketch.counters_mut().set(slot, 15);
            }
            sketch.record(key);
            assert_eq!(sketch.estimate(key), 15);
            assert!(sketch.slot_indexes(key).iter().all(|&s| sketch.counters().get(s) == 15));
        }
    }

    #[test]
    fn lone_key_counts_exactly() {
        let mut sketch = cbf(1024, 4, 15);
        let key = Key(7);
        for _ in 0..5 {
            sketch.record(key);
        }
        assert_eq!(sketch.estimate(key), 5);
        assert!(sketch.slot_indexes(key).iter().all(|&s| sketch.counters().get(s) == 5));
    }

    #[test]
    fn fresh_sketch_estimates_zero() {
        let sketch = cbf(64, 2, 3);
        for raw in 0..100 {
            assert_eq!(sketch.estimate(Key(raw)), 0);
        }
    }

    #[test]
    fn estimate_does_not_mutate() {
        let mut sketch = cms(512, 4, 15, true);
        for raw in 0..50 {
            sketch.record(Key(raw));
        }
        let before = sketch.clone();
        for raw in 0..100 {
            sketch.estimate(Key(raw));
        }
        assert_eq!(before.counters(), sketch.counters());
    }

    #[test]
    fn no_underestimation_against_exact_oracle() {
        // Reset-free window, cap high enough that nothing saturates.
        let mut rng_state = 0xdead_beefu64;
        let mut next = move || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1);
            rng_state >> 33
        };
        for layout in 0..3 {
            let mut sketch = match layout {
                0 => cbf(128, 8, 255),
                1 => cms(128, 8, 255, false),
                _ => cms(128, 8, 255, true),
            };
            let mut oracle = ExactHistogram::new(ExactMode::Integer, None);
            for _ in 0..2000 {
                let key = Key(next() % 64);
                sketch.record(key);
                oracle.record(key);
            }
            for raw in 0..64 {
                let key = Key(raw);
                assert!(
                    sketch.estimate(key) >= oracle.estimate(key),
                    "underestimated key {raw}"
                );
            }
        }
    }

    #[test]
    fn conservative_estimate_never_exceeds_plain() {
        let mut plain = cms(256, 8, 255, false);
        let mut conservative = cms(256, 8, 255, true);
        let mut state = 99u64;
        for _ in 0..5000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let key = Key((state >> 40) % 96);
            plain.record(key);
            conservative.record(key);
        }
        for raw in 0..96 {
            assert!(conservative.estimate(Key(raw)) <= plain.estimate(Key(raw)));
        }
    }

    #[test]
    fn halving_matches_element_wise_reference() {
        let mut state = 0x1234_5678u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            state >> 32
        };
        let mut sketch = cbf(1024, 4, 15);
        for i in 0..1024 {
            sketch.counters_mut().set(i, next() % 16);
        }
        let reference: Vec<u64> = (0..1024).map(|i| sketch.counters().get(i) / 2).collect();
        sketch.halve_all();
        for (i, want) in reference.into_iter().enumerate() {
            assert_eq!(sketch.counters().get(i), want, "counter {i}");
        }
    }

    #[test]
    fn config_validation_rejects_bad_shapes() {
        assert_eq!(
            FrequencySketch::new(SketchConfig::cbf(64, 3, 7, 0)).unwrap_err(),
            SketchConfigError::UnsupportedWidth(3)
        );
        assert_eq!(
            FrequencySketch::new(SketchConfig::cbf(64, 4, 16, 0)).unwrap_err(),
            SketchConfigError::CapTooLarge { cap: 16, bits: 4 }
        );
        let mut uneven = SketchConfig::cms(63, 4, 15, 0);
        uneven.cms_depth = 4;
        uneven.hash_count = 4;
        assert!(matches!(
            FrequencySketch::new(uneven).unwrap_err(),
            SketchConfigError::UnevenRows { .. }
        ));
        let mut mismatched = SketchConfig::cms(64, 4, 15, 0);
        mismatched.hash_count = 3;
        assert!(matches!(
            FrequencySketch::new(mismatched).unwrap_err(),
            SketchConfigError::HashDepthMismatch { .. }
        ));
    }
}
