//! A background distribution interleaved with sparse bursts: short runs of
//! repeated accesses to keys that have never been seen before, the pattern
//! that defeats a pure frequency filter and motivates the window cache.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::zipf::ZipfSource;
use super::WorkloadSource;
use crate::Key;

#[derive(Clone, Debug)]
pub struct BurstSource {
    background: ZipfSource,
    /// Probability that a new burst starts at any given request.
    start_probability: f64,
    /// Accesses each burst key receives.
    burst_length: u32,
    /// Requests over which those accesses are spread.
    burst_span: u64,
    rng: ChaCha8Rng,
    /// Burst keys are allocated above the background universe so they are
    /// fresh by construction.
    next_fresh: u64,
    position: u64,
    scheduled: BinaryHeap<Reverse<(u64, u64)>>,
}

impl BurstSource {
    pub fn new(
        background: ZipfSource,
        start_probability: f64,
        burst_length: u32,
        burst_span: u64,
        seed: u64,
    ) -> Self {
        assert!((0.0..=1.0).contains(&start_probability));
        assert!(burst_length > 0 && burst_span > 0);
        let next_fresh = background.distribution().universe() + 1;
        BurstSource {
            background,
            start_probability,
            burst_length,
            burst_span,
            rng: ChaCha8Rng::seed_from_u64(seed),
            next_fresh,
            position: 0,
            scheduled: BinaryHeap::new(),
        }
    }
}

impl WorkloadSource for BurstSource {
    fn next_key(&mut self) -> Option<Key> {
        self.position += 1;
        if self.rng.gen::<f64>() < self.start_probability {
            let key = self.next_fresh;
            self.next_fresh += 1;
            let stride = (self.burst_span / self.burst_length as u64).max(1);
            for i in 0..self.burst_length as u64 {
                self.scheduled.push(Reverse((self.position + i * stride, key)));
            }
        }
        if let Some(&Reverse((due, key))) = self.scheduled.peek() {
            if due <= self.position {
                self.scheduled.pop();
                return Some(Key(key));
            }
        }
        Some(Key(self.background.next_rank()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::zipf::ZipfDistribution;
    use std::collections::HashMap;
    use std::sync::Arc;

    fn source(start_probability: f64) -> BurstSource {
        let dist = Arc::new(ZipfDistribution::new(1000, 0.9).unwrap());
        BurstSource::new(ZipfSource::new(dist, 3), start_probability, 5, 40, 8)
    }

    #[test]
    fn burst_keys_are_fresh_and_repeat_burst_length_times() {
        let mut src = source(0.01);
        let mut counts: HashMap<u64, u64> = HashMap::new();
        for _ in 0..20_000 {
            let key = src.next_key().unwrap().0;
            *counts.entry(key).or_default() += 1;
        }
        let burst_keys: Vec<_> = counts.iter().filter(|(&k, _)| k > 1000).collect();
        assert!(!burst_keys.is_empty(), "no bursts fired");
        // every completed burst key is accessed exactly burst_length times
        let complete = burst_keys.iter().filter(|(_, &c)| c == 5).count();
        assert!(
            complete * 10 >= burst_keys.len() * 8,
            "most bursts should complete: {complete}/{}",
            burst_keys.len()
        );
        assert!(burst_keys.iter().all(|(_, &c)| c <= 5));
    }

    #[test]
    fn zero_rate_is_pure_background() {
        let mut src = source(0.0);
        for _ in 0..5000 {
            assert!(src.next_key().unwrap().0 <= 1000);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let stream = || {
            let mut src = source(0.02);
            (0..2000).map(|_| src.next_key().unwrap().0).collect::<Vec<_>>()
        };
        assert_eq!(stream(), stream());
    }
}
