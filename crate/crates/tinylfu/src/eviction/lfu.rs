//! In-memory LFU: per-cached-item counters, victim of minimal count.
//!
//! Ties break toward the least recently used of the minimal items. Counters
//! exist only while an item is resident; nothing is remembered about evicted
//! keys. When combined with an admission histogram the counters halve in
//! lockstep with its reset, via `on_frequency_reset`.

use std::collections::{BTreeSet, HashMap};

use super::{AccessOutcome, EvictionPolicy, PolicyError};
use crate::Key;

#[derive(Clone, Copy, Debug)]
struct Entry {
    count: u64,
    touched: u64,
}

#[derive(Clone, Debug)]
pub struct LfuPolicy {
    capacity: usize,
    entries: HashMap<Key, Entry>,
    // (count, touch tick, key): the first element is always the victim.
    order: BTreeSet<(u64, u64, Key)>,
    tick: u64,
}

impl LfuPolicy {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "LFU capacity must be positive");
        LfuPolicy {
            capacity,
            entries: HashMap::with_capacity(capacity),
            order: BTreeSet::new(),
            tick: 0,
        }
    }

    /// Current counter of a resident key, for tests and diagnostics.
    pub fn count(&self, key: Key) -> Option<u64> {
        self.entries.get(&key).map(|e| e.count)
    }

    fn touch(&mut self, key: Key, bump: u64) {
        let entry = self.entries.get_mut(&key).expect("touch of resident key");
        self.order.remove(&(entry.count, entry.touched, key));
        entry.count += bump;
        entry.touched = self.tick;
        self.tick += 1;
        self.order.insert((entry.count, entry.touched, key));
    }
}

impl EvictionPolicy for LfuPolicy {
    fn capacity(&self) -> usize {
        self.capacity
    }

    fn len(&self) -> usize {
        self.entries.len()
    }

    fn contains(&self, key: Key) -> bool {
        self.entries.contains_key(&key)
    }

    fn access(&mut self, key: Key) -> AccessOutcome {
        if self.contains(key) {
            self.touch(key, 1);
            AccessOutcome::Hit
        } else {
            AccessOutcome::Miss
        }
    }

    fn victim_peek(&self) -> Result<Key, PolicyError> {
        if !self.is_full() {
            return Err(PolicyError::NotFull);
        }
        self.order
            .first()
            .map(|&(_, _, key)| key)
            .ok_or(PolicyError::NotFull)
    }

    fn insert(&mut self, key: Key) -> Result<(), PolicyError> {
        if self.is_full() {
            return Err(PolicyError::CacheFull);
        }
        let entry = Entry { count: 1, touched: self.tick };
        self.tick += 1;
        self.entries.insert(key, entry);
        self.order.insert((entry.count, entry.touched, key));
        Ok(())
    }

    fn evict(&mut self, key: Key) -> Result<(), PolicyError> {
        let entry = self.entries.remove(&key).ok_or(PolicyError::KeyAbsent(key))?;
        self.order.remove(&(entry.count, entry.touched, key));
        Ok(())
    }

    fn on_frequency_reset(&mut self) {
        // Halve every counter; recency ticks are preserved so tie-breaking
        // among newly-equal counts still follows least-recent use.
        self.order.clear();
        for (&key, entry) in &mut self.entries {
            entry.count /= 2;
            self.order.insert((entry.count, entry.touched, key));
        }
    }

    fn resident_keys(&self) -> Vec<Key> {
        self.entries.keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn victim_has_minimal_count() {
        let mut lfu = LfuPolicy::new(3);
        for raw in [1u64, 2, 3] {
            lfu.insert(Key(raw)).unwrap();
        }
        lfu.access(Key(1));
        lfu.access(Key(1));
        lfu.access(Key(2));
        let victim = lfu.victim_peek().unwrap();
        assert_eq!(victim, Key(3));
        let min = lfu.count(victim).unwrap();
        assert!(lfu.resident_keys().iter().all(|&k| lfu.count(k).unwrap() >= min));
    }

    #[test]
    fn ties_break_least_recently_used() {
        let mut lfu = LfuPolicy::new(3);
        lfu.insert(Key(1)).unwrap();
        lfu.insert(Key(2)).unwrap();
        lfu.insert(Key(3)).unwrap();
        // all counts are 1; key 1 is the stalest
        assert_eq!(lfu.victim_peek().unwrap(), Key(1));
        lfu.access(Key(1)); // now 2 is stalest among count-1 items
        assert_eq!(lfu.victim_peek().unwrap(), Key(2));
    }

    #[test]
    fn reset_hook_halves_counters() {
        let mut lfu = LfuPolicy::new(2);
        lfu.insert(Key(7)).unwrap();
        lfu.access(Key(7));
        lfu.access(Key(7));
        assert_eq!(lfu.count(Key(7)), Some(3));
        lfu.on_frequency_reset();
        assert_eq!(lfu.count(Key(7)), Some(1));
    }

    #[test]
    fn contract_violations_are_errors() {
        let mut lfu = LfuPolicy::new(1);
        assert_eq!(lfu.victim_peek(), Err(PolicyError::NotFull));
        lfu.insert(Key(1)).unwrap();
        assert_eq!(lfu.insert(Key(2)), Err(PolicyError::CacheFull));
        assert_eq!(lfu.evict(Key(3)), Err(PolicyError::KeyAbsent(Key(3))));
    }
}
