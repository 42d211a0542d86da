//! Least-recently-used eviction.

use super::list::RecencyList;
use super::{AccessOutcome, EvictionPolicy, PolicyError};
use crate::Key;

#[derive(Clone, Debug)]
pub struct LruPolicy {
    capacity: usize,
    list: RecencyList,
}

impl LruPolicy {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "LRU capacity must be positive");
        LruPolicy {
            capacity,
            list: RecencyList::new(),
        }
    }
}

impl EvictionPolicy for LruPolicy {
    fn capacity(&self) -> usize {
        self.capacity
    }

    fn len(&self) -> usize {
        self.list.len()
    }

    fn contains(&self, key: Key) -> bool {
        self.list.contains(key)
    }

    fn access(&mut self, key: Key) -> AccessOutcome {
        if self.list.contains(key) {
            self.list.move_to_mru(key);
            AccessOutcome::Hit
        } else {
            AccessOutcome::Miss
        }
    }

    fn victim_peek(&self) -> Result<Key, PolicyError> {
        if !self.is_full() {
            return Err(PolicyError::NotFull);
        }
        self.list.peek_lru().ok_or(PolicyError::NotFull)
    }

    fn insert(&mut self, key: Key) -> Result<(), PolicyError> {
        if self.is_full() {
            return Err(PolicyError::CacheFull);
        }
        self.list.push_mru(key);
        Ok(())
    }

    fn evict(&mut self, key: Key) -> Result<(), PolicyError> {
        if self.list.remove(key) {
            Ok(())
        } else {
            Err(PolicyError::KeyAbsent(key))
        }
    }

    fn resident_keys(&self) -> Vec<Key> {
        self.list.keys_mru_to_lru()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_lru_transitions() {
        let mut lru = LruPolicy::new(2);
        assert_eq!(lru.access(Key(1)), AccessOutcome::Miss);
        lru.insert(Key(1)).unwrap();
        assert_eq!(lru.access(Key(2)), AccessOutcome::Miss);
        lru.insert(Key(2)).unwrap();
        assert_eq!(lru.access(Key(1)), AccessOutcome::Hit);
        // inserting c evicts b, the least recently used
        let victim = lru.victim_peek().unwrap();
        assert_eq!(victim, Key(2));
        lru.evict(victim).unwrap();
        lru.insert(Key(3)).unwrap();
        assert!(lru.contains(Key(1)) && lru.contains(Key(3)) && !lru.contains(Key(2)));
    }

    #[test]
    fn victim_is_least_recent_of_three() {
        let mut lru = LruPolicy::new(3);
        for raw in [1u64, 2, 3] {
            lru.access(Key(raw));
            lru.insert(Key(raw)).unwrap();
        }
        assert_eq!(lru.victim_peek().unwrap(), Key(1));
    }

    #[test]
    fn contract_violations_are_errors() {
        let mut lru = LruPolicy::new(1);
        assert_eq!(lru.victim_peek(), Err(PolicyError::NotFull));
        lru.insert(Key(1)).unwrap();
        assert_eq!(lru.insert(Key(2)), Err(PolicyError::CacheFull));
        assert_eq!(lru.evict(Key(9)), Err(PolicyError::KeyAbsent(Key(9))));
    }
}
