//! Analytic hit-ratio bounds and expected-population estimates.

use std::collections::HashMap;

use super::zipf::ZipfDistribution;
use super::WorkloadError;
use crate::Key;

/// Hit-ratio ceiling of any cache on a finite trace, however large: every
/// key's first occurrence is a miss, so the bound is
/// `sum(max(0, count - 1)) / sum(count)`.
pub fn infinite_cache_bound(trace: &[Key]) -> Result<f64, WorkloadError> {
    if trace.is_empty() {
        return Err(WorkloadError::EmptyTrace);
    }
    let mut counts: HashMap<Key, u64> = HashMap::new();
    for &key in trace {
        *counts.entry(key).or_default() += 1;
    }
    let repeats: u64 = counts.values().map(|&c| c - 1).sum();
    Ok(repeats as f64 / trace.len() as f64)
}

/// Steady-state hit ratio of a clairvoyant cache holding the `cache_size`
/// most probable items of a constant distribution: the sum of their
/// probabilities (first-occurrence misses vanish in the infinite-horizon
/// limit).
pub fn ideal_static_hit_ratio(
    dist: &ZipfDistribution,
    cache_size: u64,
) -> Result<f64, WorkloadError> {
    if cache_size == 0 || cache_size > dist.universe() {
        return Err(WorkloadError::BadParameter(format!(
            "cache size {cache_size} outside [1, universe {}]",
            dist.universe()
        )));
    }
    Ok(dist.top_probability_mass(cache_size))
}

/// Expected number of distinct items in `samples` independent draws.
pub fn expected_distinct_items(dist: &ZipfDistribution, samples: u64) -> f64 {
    occupancy_sum(dist, samples, 1)
}

/// Expected number of items appearing at least twice in `samples` draws.
pub fn expected_repeated_items(dist: &ZipfDistribution, samples: u64) -> f64 {
    occupancy_sum(dist, samples, 2)
}

fn occupancy_sum(dist: &ZipfDistribution, samples: u64, min_occurrences: u32) -> f64 {
    let w = samples as f64;
    (1..=dist.universe())
        .map(|rank| {
            let p = dist.probability(rank);
            // log-space keeps (1-p)^W accurate for tiny p and large W
            let miss_all = (w * (-p).ln_1p()).exp();
            match min_occurrences {
                1 => 1.0 - miss_all,
                2 => {
                    let exactly_once = w * p * ((w - 1.0) * (-p).ln_1p()).exp();
                    (1.0 - miss_all - exactly_once).max(0.0)
                }
                _ => unreachable!("only >=1 and >=2 are used"),
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::workload::zipf::ZipfSource;
    use crate::workload::WorkloadSource;

    #[test]
    fn bound_examples() {
        assert!((infinite_cache_bound(&[Key(1), Key(1), Key(2)]).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let distinct: Vec<Key> = (0..100).map(Key).collect();
        assert_eq!(infinite_cache_bound(&distinct).unwrap(), 0.0);
        let single = vec![Key(9); 50];
        assert!((infinite_cache_bound(&single).unwrap() - 49.0 / 50.0).abs() < 1e-12);
    }

    #[test]
    fn bound_rejects_empty_trace() {
        assert!(matches!(
            infinite_cache_bound(&[]),
            Err(WorkloadError::EmptyTrace)
        ));
    }

    #[test]
    fn ideal_ratio_examples() {
        // p = (0.5, 0.3, 0.2) is not Zipf; check the Zipf equivalents instead.
        let dist = ZipfDistribution::new(3, 0.0).unwrap();
        assert!((ideal_static_hit_ratio(&dist, 2).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((ideal_static_hit_ratio(&dist, 3).unwrap() - 1.0).abs() < 1e-12);
        let skewed = ZipfDistribution::new(1_000_000, 0.9).unwrap();
        let direct: f64 = (1..=1000).map(|r| skewed.probability(r)).sum();
        assert!((ideal_static_hit_ratio(&skewed, 1000).unwrap() - direct).abs() < 1e-9);
        assert!(ideal_static_hit_ratio(&skewed, 0).is_err());
        assert!(ideal_static_hit_ratio(&skewed, 2_000_000).is_err());
    }

    #[test]
    fn expected_populations_match_simulation() {
        let dist = Arc::new(ZipfDistribution::new(5000, 0.9).unwrap());
        let samples = 2000u64;
        let runs = 40;
        let (mut mean_distinct, mut mean_repeated) = (0.0, 0.0);
        for seed in 0..runs {
            let mut source = ZipfSource::new(Arc::clone(&dist), seed);
            let mut counts: HashMap<Key, u64> = HashMap::new();
            for _ in 0..samples {
                *counts.entry(source.next_key().unwrap()).or_default() += 1;
            }
            mean_distinct += counts.len() as f64 / runs as f64;
            mean_repeated +=
                counts.values().filter(|&&c| c >= 2).count() as f64 / runs as f64;
        }
        let distinct = expected_distinct_items(&dist, samples);
        let repeated = expected_repeated_items(&dist, samples);
        assert!(
            (distinct - mean_distinct).abs() / mean_distinct < 0.05,
            "distinct: analytic {distinct:.1} vs simulated {mean_distinct:.1}"
        );
        assert!(
            (repeated - mean_repeated).abs() / mean_repeated < 0.05,
            "repeated: analytic {repeated:.1} vs simulated {mean_repeated:.1}"
        );
    }
}
