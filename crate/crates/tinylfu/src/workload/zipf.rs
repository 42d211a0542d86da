//! Seeded Zipf sampling over a finite universe.
//!
//! Sampling goes through a precomputed CDF and binary search: exact item
//! probabilities, O(log N) per draw, no approximation error to account for
//! downstream.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{WorkloadError, WorkloadSource};
use crate::Key;

/// `p(i) ∝ i^(-skew)` over ranks `1..=universe`; emitted keys are the ranks.
#[derive(Clone, Debug)]
pub struct ZipfDistribution {
    universe: u64,
    skew: f64,
    normalizer: f64,
    cdf: Vec<f64>,
}

impl ZipfDistribution {
    pub fn new(universe: u64, skew: f64) -> Result<Self, WorkloadError> {
        if universe == 0 {
            return Err(WorkloadError::BadParameter("universe must be positive".into()));
        }
        if !skew.is_finite() || skew < 0.0 {
            return Err(WorkloadError::BadParameter(format!(
                "skew must be a finite non-negative number, got {skew}"
            )));
        }
        let mut cdf = Vec::with_capacity(universe as usize);
        let mut total = 0.0;
        for rank in 1..=universe {
            total += (rank as f64).powf(-skew);
            cdf.push(total);
        }
        let normalizer = total;
        for value in &mut cdf {
            *value /= normalizer;
        }
        // Binary search must always land inside the table.
        *cdf.last_mut().unwrap() = 1.0;
        Ok(ZipfDistribution {
            universe,
            skew,
            normalizer,
            cdf,
        })
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn skew(&self) -> f64 {
        self.skew
    }

    /// Exact probability of the 1-based rank.
    pub fn probability(&self, rank: u64) -> f64 {
        assert!(rank >= 1 && rank <= self.universe);
        (rank as f64).powf(-self.skew) / self.normalizer
    }

    /// Sum of the `count` largest item probabilities.
    pub fn top_probability_mass(&self, count: u64) -> f64 {
        assert!(count >= 1 && count <= self.universe);
        self.cdf[(count - 1) as usize]
    }

    /// Draws a 1-based rank from a uniform sample in [0, 1).
    pub fn rank_for(&self, uniform: f64) -> u64 {
        let idx = self.cdf.partition_point(|&c| c <= uniform);
        (idx as u64 + 1).min(self.universe)
    }
}

/// A seeded stream of keys drawn from a shared [`ZipfDistribution`].
#[derive(Clone, Debug)]
pub struct ZipfSource {
    dist: Arc<ZipfDistribution>,
    rng: ChaCha8Rng,
}

impl ZipfSource {
    pub fn new(dist: Arc<ZipfDistribution>, seed: u64) -> Self {
        ZipfSource {
            dist,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn distribution(&self) -> &ZipfDistribution {
        &self.dist
    }

    /// The next rank as a key in `1..=universe`.
    pub fn next_rank(&mut self) -> u64 {
        self.dist.rank_for(self.rng.gen::<f64>())
    }
}

impl WorkloadSource for ZipfSource {
    fn next_key(&mut self) -> Option<Key> {
        Some(Key(self.next_rank()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_skew_is_uniform() {
        let dist = ZipfDistribution::new(4, 0.0).unwrap();
        for rank in 1..=4 {
            assert!((dist.probability(rank) - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn skew_one_over_two_items() {
        let dist = ZipfDistribution::new(2, 1.0).unwrap();
        assert!((dist.probability(1) - 2.0 / 3.0).abs() < 1e-12);
        assert!((dist.probability(2) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one_and_decrease() {
        let dist = ZipfDistribution::new(10_000, 0.9).unwrap();
        let sum: f64 = (1..=10_000).map(|r| dist.probability(r)).sum();
        assert!((sum - 1.0).abs() < 1e-9);
        for rank in 1..10_000 {
            assert!(dist.probability(rank) > dist.probability(rank + 1));
        }
    }

    #[test]
    fn empirical_rank_one_frequency_within_three_sigma() {
        let dist = Arc::new(ZipfDistribution::new(1_000_000, 0.9).unwrap());
        let p1 = dist.probability(1);
        let draws = 1_000_000u64;
        let mut source = ZipfSource::new(Arc::clone(&dist), 99);
        let mut hits = 0u64;
        for _ in 0..draws {
            if source.next_rank() == 1 {
                hits += 1;
            }
        }
        let expected = draws as f64 * p1;
        let sigma = (draws as f64 * p1 * (1.0 - p1)).sqrt();
        assert!(
            (hits as f64 - expected).abs() <= 3.0 * sigma,
            "rank-1 count {hits} vs expected {expected:.0} (sigma {sigma:.1})"
        );
    }

    #[test]
    fn identical_seeds_yield_identical_streams() {
        let dist = Arc::new(ZipfDistribution::new(1000, 0.7).unwrap());
        let mut a = ZipfSource::new(Arc::clone(&dist), 5);
        let mut b = ZipfSource::new(Arc::clone(&dist), 5);
        let mut c = ZipfSource::new(dist, 6);
        let sa: Vec<u64> = (0..500).map(|_| a.next_rank()).collect();
        let sb: Vec<u64> = (0..500).map(|_| b.next_rank()).collect();
        let sc: Vec<u64> = (0..500).map(|_| c.next_rank()).collect();
        assert_eq!(sa, sb);
        assert_ne!(sa, sc);
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(ZipfDistribution::new(0, 0.9).is_err());
        assert!(ZipfDistribution::new(10, f64::NAN).is_err());
        assert!(ZipfDistribution::new(10, -1.0).is_err());
    }
}
