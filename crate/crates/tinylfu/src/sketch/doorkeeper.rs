//! A plain Bloom filter placed in front of the main sketch.
//!
//! First-time and tail items land here instead of consuming a multi-bit
//! counter; only repeat items reach the main structure. Membership
//! contributes +1 to frequency estimates, and the filter is cleared on every
//! reset so the +1 ages out together with the halved counters.

use super::hash::IndexHasher;
use crate::Key;

#[derive(Clone, Debug)]
pub struct Doorkeeper {
    bit_count: u64,
    hash_count: usize,
    hasher: IndexHasher,
    bits: Vec<u64>,
}

impl Doorkeeper {
    /// Default probe count.
    pub const DEFAULT_HASHES: usize = 3;

    pub fn new(bit_count: u64, hash_count: usize, seed: u64) -> Self {
        assert!(bit_count > 0 && hash_count > 0);
        Doorkeeper {
            bit_count,
            hash_count,
            hasher: IndexHasher::new(seed),
            bits: vec![0u64; bit_count.div_ceil(64) as usize],
        }
    }

    /// Standalone default sizing: one bit per sample event, three probes.
    pub fn with_sample_size(sample_size: u64, seed: u64) -> Self {
        Doorkeeper::new(sample_size.max(64), Self::DEFAULT_HASHES, seed)
    }

    pub fn bit_count(&self) -> u64 {
        self.bit_count
    }

    /// Sets all of the key's bits. Returns `true` iff every bit was already
    /// set before the call, i.e. the key was (apparently) present.
    pub fn insert(&mut self, key: Key) -> bool {
        let mut was_present = true;
        for j in 0..self.hash_count {
            let bit = self.hasher.probe(key, j as u64, self.bit_count);
            let word = (bit / 64) as usize;
            let mask = 1u64 << (bit % 64);
            was_present &= self.bits[word] & mask != 0;
            self.bits[word] |= mask;
        }
        was_present
    }

    /// True if every bit of the key is set. No false negatives.
    pub fn contains(&self, key: Key) -> bool {
        (0..self.hash_count).all(|j| {
            let bit = self.hasher.probe(key, j as u64, self.bit_count);
            self.bits[(bit / 64) as usize] & (1u64 << (bit % 64)) != 0
        })
    }

    /// Zeroes the whole filter.
    pub fn clear(&mut self) {
        self.bits.fill(0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_reports_prior_presence() {
        let mut dk = Doorkeeper::new(1024, 3, 1);
        assert!(!dk.insert(Key(5)));
        assert!(dk.insert(Key(5)));
        assert!(dk.contains(Key(5)));
    }

    #[test]
    fn clear_forgets_everything_and_is_idempotent() {
        let mut dk = Doorkeeper::new(1024, 3, 1);
        for raw in 0..100 {
            dk.insert(Key(raw));
        }
        dk.clear();
        assert!((0..100).all(|raw| !dk.contains(Key(raw))));
        assert!(!dk.insert(Key(7)));
        dk.clear();
        dk.clear();
        assert!(!dk.contains(Key(7)));
    }

    #[test]
    fn no_false_negatives() {
        let mut dk = Doorkeeper::new(4096, 3, 9);
        for raw in 0..2000 {
            dk.insert(Key(raw));
        }
        assert!((0..2000).all(|raw| dk.contains(Key(raw))));
    }

    #[test]
    fn false_positive_rate_near_analytic_bound() {
        let (m, k, n) = (8192u64, 3usize, 1000u64);
        let mut dk = Doorkeeper::new(m, k, 0xfeed);
        for raw in 0..n {
            dk.insert(Key(raw));
        }
        let probes = 1000u64;
        let false_positives = (n..n + probes).filter(|&raw| dk.contains(Key(raw))).count();
        let analytic = (1.0 - (-(k as f64) * n as f64 / m as f64).exp()).powi(k as i32);
        let measured = false_positives as f64 / probes as f64;
        assert!(
            measured <= 2.0 * analytic,
            "measured {measured:.4} vs analytic bound {analytic:.4}"
        );
    }
}
