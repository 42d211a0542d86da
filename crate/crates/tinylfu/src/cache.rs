//! Composed caches: eviction policies wrapped with (or without) the
//! admission gate, and the two-region W-TinyLFU cache.
//!
//! All of them speak [`CacheModel`]: one `access` call per request that
//! handles lookup, admission, and insertion, returning hit or miss. Keys
//! only — hit/miss simulation needs no payloads.

use crate::admission::{FrequencyHistogram, HistogramSizeReport};
use crate::eviction::{AccessOutcome, ArcPolicy, EvictionPolicy, LruPolicy, SlruPolicy};
use crate::Key;

/// Lifetime hit/miss counters of a cache instance.
#[derive(Clone, Copy, Default, Debug)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
}

impl CacheStats {
    fn count(&mut self, outcome: AccessOutcome) -> AccessOutcome {
        match outcome {
            AccessOutcome::Hit => self.hits += 1,
            AccessOutcome::Miss => self.misses += 1,
        }
        outcome
    }
}

/// A cache driven one request at a time.
pub trait CacheModel: Send {
    fn access(&mut self, key: Key) -> AccessOutcome;

    fn stats(&self) -> CacheStats;

    /// Snapshot of resident keys, for conservation checks.
    fn resident_keys(&self) -> Vec<Key>;

    /// Bit accounting of the admission structures, when present.
    fn size_report(&self) -> Option<HistogramSizeReport> {
        None
    }
}

/// An unaugmented policy behind the standard miss path: on a miss the victim
/// is evicted unconditionally and the new key inserted.
pub struct PlainCache<P: EvictionPolicy> {
    policy: P,
    stats: CacheStats,
}

impl<P: EvictionPolicy> PlainCache<P> {
    pub fn new(policy: P) -> Self {
        PlainCache {
            policy,
            stats: CacheStats::default(),
        }
    }

    pub fn policy(&self) -> &P {
        &self.policy
    }
}

impl<P: EvictionPolicy + Send> CacheModel for PlainCache<P> {
    fn access(&mut self, key: Key) -> AccessOutcome {
        if self.policy.access(key) == AccessOutcome::Hit {
            return self.stats.count(AccessOutcome::Hit);
        }
        if self.policy.is_full() {
            let victim = self.policy.victim_peek().expect("full cache has a victim");
            self.policy.evict(victim).expect("victim is resident");
        }
        self.policy.insert(key).expect("space was just made");
        self.stats.count(AccessOutcome::Miss)
    }

    fn stats(&self) -> CacheStats {
        self.stats
    }

    fn resident_keys(&self) -> Vec<Key> {
        self.policy.resident_keys()
    }
}

/// Any eviction policy gated by a TinyLFU admission histogram.
///
/// Every access is recorded in the histogram first (hits included), so
/// estimates reflect total access frequency. On a miss against a full cache
/// the new key is admitted only if its estimate strictly exceeds the
/// victim's; otherwise the cache is left untouched.
pub struct AugmentedCache<P: EvictionPolicy> {
    policy: P,
    histogram: FrequencyHistogram,
    stats: CacheStats,
}

impl<P: EvictionPolicy> AugmentedCache<P> {
    /// The histogram must have been sized for this policy's capacity.
    pub fn new(policy: P, histogram: FrequencyHistogram) -> Self {
        assert_eq!(
            histogram.config().cache_size,
            policy.capacity() as u64,
            "histogram cache_size must match policy capacity"
        );
        AugmentedCache {
            policy,
            histogram,
            stats: CacheStats::default(),
        }
    }

    pub fn policy(&self) -> &P {
        &self.policy
    }

    pub fn histogram(&self) -> &FrequencyHistogram {
        &self.histogram
    }
}

impl<P: EvictionPolicy + Send> CacheModel for AugmentedCache<P> {
    fn access(&mut self, key: Key) -> AccessOutcome {
        if self.histogram.record(key) {
            // Keep policy-held frequency counters in sync with the aging.
            self.policy.on_frequency_reset();
        }
        if self.policy.access(key) == AccessOutcome::Hit {
            return self.stats.count(AccessOutcome::Hit);
        }
        if !self.policy.is_full() {
            self.policy.insert(key).expect("cache not full");
        } else {
            let victim = self.policy.victim_peek().expect("full cache has a victim");
            if self.histogram.admit(key, victim) {
                self.policy.evict(victim).expect("victim is resident");
                self.policy.insert(key).expect("space was just made");
            }
        }
        self.stats.count(AccessOutcome::Miss)
    }

    fn stats(&self) -> CacheStats {
        self.stats
    }

    fn resident_keys(&self) -> Vec<Key> {
        self.policy.resident_keys()
    }

    fn size_report(&self) -> Option<HistogramSizeReport> {
        self.histogram.size_report()
    }
}

/// ARC driven through its own self-contained request operation.
pub struct ArcCache {
    policy: ArcPolicy,
    stats: CacheStats,
}

impl ArcCache {
    pub fn new(capacity: usize) -> Self {
        ArcCache {
            policy: ArcPolicy::new(capacity),
            stats: CacheStats::default(),
        }
    }
}

impl CacheModel for ArcCache {
    fn access(&mut self, key: Key) -> AccessOutcome {
        let outcome = self.policy.request(key);
        self.stats.count(outcome)
    }

    fn stats(&self) -> CacheStats {
        self.stats
    }

    fn resident_keys(&self) -> Vec<Key> {
        self.policy.resident_keys()
    }
}

/// The two-region scheme: a small admission-free LRU window in front of an
/// SLRU main region guarded by the admission filter.
///
/// Arriving items always enter the window; the window's own LRU victim then
/// competes for main-region admission against the probation LRU. A rejected
/// window victim is dropped outright — no ghosts.
pub struct WTinyLfuCache {
    window: LruPolicy,
    main: Option<SlruPolicy>,
    histogram: FrequencyHistogram,
    stats: CacheStats,
}

/// Default window share of the total capacity.
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.01;

impl WTinyLfuCache {
    /// Region sizing: `window = max(1, round(fraction * total))`, the SLRU
    /// main region takes the rest with its 80/20 protected/probation split.
    /// The histogram must have been sized for the total capacity.
    pub fn new(
        total_capacity: usize,
        window_fraction: f64,
        histogram: FrequencyHistogram,
    ) -> Self {
        assert!(total_capacity > 0, "capacity must be positive");
        assert!(
            window_fraction > 0.0 && window_fraction <= 1.0,
            "window fraction must be in (0, 1]"
        );
        assert_eq!(
            histogram.config().cache_size,
            total_capacity as u64,
            "histogram cache_size must match total capacity"
        );
        let window_capacity = ((total_capacity as f64 * window_fraction).round() as usize)
            .clamp(1, total_capacity);
        let main_capacity = total_capacity - window_capacity;
        WTinyLfuCache {
            window: LruPolicy::new(window_capacity),
            main: (main_capacity > 0).then(|| SlruPolicy::new(main_capacity)),
            histogram,
            stats: CacheStats::default(),
        }
    }

    pub fn window_capacity(&self) -> usize {
        self.window.capacity()
    }

    pub fn main_capacity(&self) -> usize {
        self.main.as_ref().map_or(0, |m| m.capacity())
    }

    pub fn histogram(&self) -> &FrequencyHistogram {
        &self.histogram
    }

    pub fn window(&self) -> &LruPolicy {
        &self.window
    }

    pub fn main_region(&self) -> Option<&SlruPolicy> {
        self.main.as_ref()
    }
}

impl CacheModel for WTinyLfuCache {
    fn access(&mut self, key: Key) -> AccessOutcome {
        self.histogram.record(key);
        if self.window.access(key) == AccessOutcome::Hit {
            return self.stats.count(AccessOutcome::Hit);
        }
        if let Some(main) = &mut self.main {
            if main.access(key) == AccessOutcome::Hit {
                return self.stats.count(AccessOutcome::Hit);
            }
        }
        // Miss: the key always enters the window; the window's LRU victim
        // (if any) becomes the candidate for the main region.
        let candidate = if self.window.is_full() {
            let victim = self.window.victim_peek().expect("full window has a victim");
            self.window.evict(victim).expect("victim is resident");
            Some(victim)
        } else {
            None
        };
        self.window.insert(key).expect("window has space");
        if let (Some(candidate), Some(main)) = (candidate, &mut self.main) {
            if !main.is_full() {
                main.insert(candidate).expect("main not full");
            } else {
                let main_victim = main.victim_peek().expect("full main has a victim");
                if self.histogram.admit(candidate, main_victim) {
                    main.evict(main_victim).expect("victim is resident");
                    main.insert(candidate).expect("space was just made");
                }
                // otherwise the candidate is dropped entirely
            }
        }
        self.stats.count(AccessOutcome::Miss)
    }

    fn stats(&self) -> CacheStats {
        self.stats
    }

    fn resident_keys(&self) -> Vec<Key> {
        let mut keys = self.window.resident_keys();
        if let Some(main) = &self.main {
            keys.extend(main.resident_keys());
        }
        keys
    }

    fn size_report(&self) -> Option<HistogramSizeReport> {
        self.histogram.size_report()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admission::HistogramConfig;
    use crate::eviction::LfuPolicy;
    use std::collections::HashSet;

    fn histogram(sample: u64, cache: u64) -> FrequencyHistogram {
        FrequencyHistogram::new(HistogramConfig::new(sample, cache).with_seed(11)).unwrap()
    }

    fn tlru(capacity: usize) -> AugmentedCache<LruPolicy> {
        AugmentedCache::new(
            LruPolicy::new(capacity),
            histogram(10 * capacity as u64, capacity as u64),
        )
    }

    #[test]
    fn empty_augmented_cache_admits_first_key() {
        let mut cache = tlru(1);
        assert_eq!(cache.access(Key(1)), AccessOutcome::Miss);
        assert!(cache.policy().contains(Key(1)));
    }

    #[test]
    fn cold_candidate_does_not_displace_warm_resident() {
        let mut cache = tlru(1);
        for _ in 0..3 {
            cache.access(Key(1)); // estimate climbs to 3
        }
        assert_eq!(cache.access(Key(2)), AccessOutcome::Miss);
        assert!(cache.policy().contains(Key(1)));
        assert!(!cache.policy().contains(Key(2)));
    }

    #[test]
    fn frequent_candidate_evicts_cold_resident() {
        // b recorded five times beforehand; the cache holds only cold a.
        let mut hist = histogram(10, 1);
        for _ in 0..5 {
            hist.record(Key(2));
        }
        let mut policy = LruPolicy::new(1);
        policy.insert(Key(1)).unwrap();
        let mut cache = AugmentedCache::new(policy, hist);
        assert_eq!(cache.access(Key(2)), AccessOutcome::Miss);
        assert!(cache.policy().contains(Key(2)));
        assert!(!cache.policy().contains(Key(1)));
    }

    #[test]
    fn rejected_admission_leaves_contents_untouched() {
        let mut cache = tlru(2);
        for _ in 0..3 {
            cache.access(Key(1));
            cache.access(Key(2));
        }
        let before: HashSet<Key> = cache.resident_keys().into_iter().collect();
        assert_eq!(cache.access(Key(99)), AccessOutcome::Miss);
        let after: HashSet<Key> = cache.resident_keys().into_iter().collect();
        assert_eq!(before, after);
    }

    #[test]
    fn lfu_counters_halve_when_histogram_resets() {
        let sample = 16u64;
        let mut cache = AugmentedCache::new(
            LfuPolicy::new(2),
            FrequencyHistogram::new(HistogramConfig::new(sample, 2).with_seed(1)).unwrap(),
        );
        for _ in 0..10 {
            cache.access(Key(1)); // counter build-up
        }
        let before = cache.policy().count(Key(1)).unwrap();
        for _ in 0..6 {
            cache.access(Key(1)); // 16th record triggers the reset
        }
        let after = cache.policy().count(Key(1)).unwrap();
        assert!(after < before, "counter {before} -> {after} did not halve");
    }

    #[test]
    fn wtinylfu_moves_window_victim_into_probation() {
        // total 3: window 1, main 2 (probation 1, protected 1)
        let mut cache = WTinyLfuCache::new(3, 0.01, histogram(30, 3));
        assert_eq!(cache.window_capacity(), 1);
        assert_eq!(cache.main_capacity(), 2);
        cache.access(Key(1));
        cache.access(Key(2));
        assert!(cache.window().contains(Key(2)));
        assert!(cache.main_region().unwrap().contains(Key(1)));
    }

    #[test]
    fn all_distinct_stream_never_hits() {
        let mut cache = WTinyLfuCache::new(8, 0.25, histogram(80, 8));
        for raw in 0..1000 {
            assert_eq!(cache.access(Key(raw)), AccessOutcome::Miss);
        }
        assert_eq!(cache.stats().hits, 0);
    }

    #[test]
    fn burst_key_hits_in_window_from_second_access() {
        let mut cache = WTinyLfuCache::new(100, 0.01, histogram(1000, 100));
        assert_eq!(cache.access(Key(7)), AccessOutcome::Miss);
        for _ in 0..5 {
            assert_eq!(cache.access(Key(7)), AccessOutcome::Hit);
        }
    }

    #[test]
    fn regions_are_disjoint_and_bounded() {
        let mut cache = WTinyLfuCache::new(10, 0.2, histogram(100, 10));
        let mut state = 5u64;
        for _ in 0..2000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            cache.access(Key(state >> 58));
            let keys = cache.resident_keys();
            let unique: HashSet<_> = keys.iter().collect();
            assert_eq!(unique.len(), keys.len(), "a key resides in two regions");
            assert!(keys.len() <= 10);
        }
    }

    #[test]
    fn full_window_fraction_degenerates_to_plain_lru() {
        let mut wtlfu = WTinyLfuCache::new(4, 1.0, histogram(40, 4));
        let mut lru = PlainCache::new(LruPolicy::new(4));
        let mut state = 123u64;
        for _ in 0..3000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let key = Key(state >> 59);
            assert_eq!(wtlfu.access(key), lru.access(key));
        }
    }

    #[test]
    fn plain_cache_follows_reference_trace() {
        // a,b,a,c,b at capacity 2: the only hit is a's second access.
        let mut cache = PlainCache::new(LruPolicy::new(2));
        let outcomes: Vec<AccessOutcome> =
            [1u64, 2, 1, 3, 2].iter().map(|&raw| cache.access(Key(raw))).collect();
        use AccessOutcome::{Hit, Miss};
        assert_eq!(outcomes, vec![Miss, Miss, Hit, Miss, Miss]);
        assert_eq!(cache.stats().hits, 1);
        assert_eq!(cache.stats().misses, 4);
    }
}
