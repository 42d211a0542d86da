//! Segmented LRU: a probation segment for new arrivals and a protected
//! segment for re-referenced items.
//!
//! New items enter probation; a probation hit promotes to protected. When
//! the protected segment overflows, its LRU item is demoted back to the
//! probation MRU position rather than forgotten, preserving its standing
//! among probation items. Only the protected segment is hard-bounded; the
//! probation share is a sizing target, with total occupancy enforced by the
//! driver. Victims come from the probation LRU end, falling back to the
//! protected LRU only when probation is empty.

use super::list::RecencyList;
use super::{AccessOutcome, EvictionPolicy, PolicyError};
use crate::Key;

/// Default protected share of the total capacity.
pub const DEFAULT_PROTECTED_SHARE: f64 = 0.8;

#[derive(Clone, Debug)]
pub struct SlruPolicy {
    probation_capacity: usize,
    protected_capacity: usize,
    probation: RecencyList,
    protected: RecencyList,
}

impl SlruPolicy {
    /// Default 20%/80% probation/protected split. The protected segment is
    /// clamped to leave at least one probation slot whenever `capacity > 1`,
    /// so tiny caches still have a victim segment.
    pub fn new(capacity: usize) -> Self {
        let protected = ((capacity as f64 * DEFAULT_PROTECTED_SHARE).round() as usize)
            .min(capacity.saturating_sub(1));
        Self::with_segments(capacity - protected, protected)
    }

    pub fn with_segments(probation_capacity: usize, protected_capacity: usize) -> Self {
        assert!(
            probation_capacity + protected_capacity > 0,
            "SLRU capacity must be positive"
        );
        SlruPolicy {
            probation_capacity,
            protected_capacity,
            probation: RecencyList::new(),
            protected: RecencyList::new(),
        }
    }

    pub fn probation_capacity(&self) -> usize {
        self.probation_capacity
    }

    pub fn protected_capacity(&self) -> usize {
        self.protected_capacity
    }

    pub fn probation_len(&self) -> usize {
        self.probation.len()
    }

    pub fn protected_len(&self) -> usize {
        self.protected.len()
    }

    fn promote(&mut self, key: Key) {
        self.probation.remove(key);
        self.protected.push_mru(key);
        while self.protected.len() > self.protected_capacity {
            let demoted = self.protected.pop_lru().expect("protected not empty");
            self.probation.push_mru(demoted);
        }
    }
}

impl EvictionPolicy for SlruPolicy {
    fn capacity(&self) -> usize {
        self.probation_capacity + self.protected_capacity
    }

    fn len(&self) -> usize {
        self.probation.len() + self.protected.len()
    }

    fn contains(&self, key: Key) -> bool {
        self.probation.contains(key) || self.protected.contains(key)
    }

    fn access(&mut self, key: Key) -> AccessOutcome {
        if self.protected.contains(key) {
            self.protected.move_to_mru(key);
            AccessOutcome::Hit
        } else if self.probation.contains(key) {
            self.promote(key);
            AccessOutcome::Hit
        } else {
            AccessOutcome::Miss
        }
    }

    fn victim_peek(&self) -> Result<Key, PolicyError> {
        if !self.is_full() {
            return Err(PolicyError::NotFull);
        }
        self.probation
            .peek_lru()
            .or_else(|| self.protected.peek_lru())
            .ok_or(PolicyError::NotFull)
    }

    fn insert(&mut self, key: Key) -> Result<(), PolicyError> {
        if self.is_full() {
            return Err(PolicyError::CacheFull);
        }
        self.probation.push_mru(key);
        Ok(())
    }

    fn evict(&mut self, key: Key) -> Result<(), PolicyError> {
        if self.probation.remove(key) || self.protected.remove(key) {
            Ok(())
        } else {
            Err(PolicyError::KeyAbsent(key))
        }
    }

    fn resident_keys(&self) -> Vec<Key> {
        let mut keys = self.probation.keys_mru_to_lru();
        keys.extend(self.protected.keys_mru_to_lru());
        keys
    }
}
