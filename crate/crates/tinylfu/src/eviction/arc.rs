//! Adaptive Replacement Cache.
//!
//! Four lists: T1/T2 hold resident keys (seen once / seen at least twice
//! recently), B1/B2 hold ghost entries for keys evicted from T1/T2. The
//! adaptation target `p` divides the resident capacity between recency (T1)
//! and frequency (T2) and moves toward whichever ghost list is being re-hit.
//!
//! [`ArcPolicy::request`] is the complete self-contained cache operation,
//! following the published pseudocode case by case; the simulator drives ARC
//! through it. The decomposed [`EvictionPolicy`] transitions expose the same
//! state for the uniform interface, with the one caveat that a context-free
//! `victim_peek` cannot see whether the incoming key is a B2 ghost, so it
//! uses the `|T1| > p` branch of the replacement rule alone.
//!
//! ARC is a comparator here. It is never combined with the admission gate:
//! its ghost lists are exactly the metadata the admission-filter design
//! avoids.

use super::list::RecencyList;
use super::{AccessOutcome, EvictionPolicy, PolicyError};
use crate::Key;

#[derive(Clone, Debug)]
pub struct ArcPolicy {
    capacity: usize,
    t1: RecencyList,
    b1: RecencyList,
    t2: RecencyList,
    b2: RecencyList,
    /// Target size of T1, in [0, capacity].
    p: usize,
}

impl ArcPolicy {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "ARC capacity must be positive");
        ArcPolicy {
            capacity,
            t1: RecencyList::new(),
            b1: RecencyList::new(),
            t2: RecencyList::new(),
            b2: RecencyList::new(),
            p: 0,
        }
    }

    pub fn adaptation_target(&self) -> usize {
        self.p
    }

    pub fn ghost_recent_len(&self) -> usize {
        self.b1.len()
    }

    pub fn ghost_frequent_len(&self) -> usize {
        self.b2.len()
    }

    /// REPLACE: demote the LRU of T1 to B1 when T1 exceeds its target (or
    /// exactly meets it on a B2 ghost hit); otherwise demote the LRU of T2
    /// to B2.
    fn replace(&mut self, requested_in_b2: bool) {
        let from_t1 = !self.t1.is_empty()
            && (self.t1.len() > self.p || (requested_in_b2 && self.t1.len() == self.p));
        if from_t1 {
            let victim = self.t1.pop_lru().expect("t1 checked non-empty");
            self.b1.push_mru(victim);
        } else {
            let victim = self
                .t2
                .pop_lru()
                .expect("replace invoked with resident items in t2");
            self.b2.push_mru(victim);
        }
    }

    /// One full cache request, hit or miss with insertion, per the
    /// published algorithm.
    pub fn request(&mut self, key: Key) -> AccessOutcome {
        // Case I: hit in T1 or T2.
        if self.t1.contains(key) {
            self.t1.remove(key);
            self.t2.push_mru(key);
            return AccessOutcome::Hit;
        }
        if self.t2.contains(key) {
            self.t2.move_to_mru(key);
            return AccessOutcome::Hit;
        }
        // Case II: ghost hit in B1 — grow the recency side.
        if self.b1.contains(key) {
            let delta = (self.b2.len() / self.b1.len()).max(1);
            self.p = (self.p + delta).min(self.capacity);
            self.replace(false);
            self.b1.remove(key);
            self.t2.push_mru(key);
            return AccessOutcome::Miss;
        }
        // Case III: ghost hit in B2 — grow the frequency side.
        if self.b2.contains(key) {
            let delta = (self.b1.len() / self.b2.len()).max(1);
            self.p = self.p.saturating_sub(delta);
            self.replace(true);
            self.b2.remove(key);
            self.t2.push_mru(key);
            return AccessOutcome::Miss;
        }
        // Case IV: a completely new key.
        let l1 = self.t1.len() + self.b1.len();
        if l1 == self.capacity {
            if self.t1.len() < self.capacity {
                self.b1.pop_lru();
                self.replace(false);
            } else {
                // B1 is empty and T1 fills the cache: discard outright.
                self.t1.pop_lru();
            }
        } else {
            let total = l1 + self.t2.len() + self.b2.len();
            if total >= self.capacity {
                if total == 2 * self.capacity {
                    self.b2.pop_lru();
                }
                self.replace(false);
            }
        }
        self.t1.push_mru(key);
        AccessOutcome::Miss
    }

    #[cfg(test)]
    fn check_bounds(&self) {
        let c = self.capacity;
        assert!(self.t1.len() + self.t2.len() <= c);
        assert!(self.t1.len() + self.b1.len() <= c);
        assert!(self.t1.len() + self.t2.len() + self.b1.len() + self.b2.len() <= 2 * c);
        assert!(self.p <= c);
    }
}

impl EvictionPolicy for ArcPolicy {
    fn capacity(&self) -> usize {
        self.capacity
    }

    fn len(&self) -> usize {
        self.t1.len() + self.t2.len()
    }

    fn contains(&self, key: Key) -> bool {
        self.t1.contains(key) || self.t2.contains(key)
    }

    fn access(&mut self, key: Key) -> AccessOutcome {
        if self.t1.contains(key) {
            self.t1.remove(key);
            self.t2.push_mru(key);
            AccessOutcome::Hit
        } else if self.t2.contains(key) {
            self.t2.move_to_mru(key);
            AccessOutcome::Hit
        } else {
            AccessOutcome::Miss
        }
    }

    fn victim_peek(&self) -> Result<Key, PolicyError> {
        if !self.is_full() {
            return Err(PolicyError::NotFull);
        }
        let from_t1 = !self.t1.is_empty() && (self.t1.len() > self.p || self.t2.is_empty());
        let list = if from_t1 { &self.t1 } else { &self.t2 };
        list.peek_lru().ok_or(PolicyError::NotFull)
    }

    fn insert(&mut self, key: Key) -> Result<(), PolicyError> {
        if self.is_full() {
            return Err(PolicyError::CacheFull);
        }
        if self.b1.contains(key) {
            let delta = (self.b2.len() / self.b1.len()).max(1);
            self.p = (self.p + delta).min(self.capacity);
            self.b1.remove(key);
            self.t2.push_mru(key);
        } else if self.b2.contains(key) {
            let delta = (self.b1.len() / self.b2.len()).max(1);
            self.p = self.p.saturating_sub(delta);
            self.b2.remove(key);
            self.t2.push_mru(key);
        } else {
            // Ghost maintenance mirroring Case IV.
            if self.t1.len() + self.b1.len() == self.capacity {
                self.b1.pop_lru();
            } else if self.t1.len() + self.b1.len() + self.t2.len() + self.b2.len()
                >= 2 * self.capacity
            {
                self.b2.pop_lru();
            }
            self.t1.push_mru(key);
        }
        Ok(())
    }

    fn evict(&mut self, key: Key) -> Result<(), PolicyError> {
        if self.t1.remove(key) {
            self.b1.push_mru(key);
            Ok(())
        } else if self.t2.remove(key) {
            self.b2.push_mru(key);
            Ok(())
        } else {
            Err(PolicyError::KeyAbsent(key))
        }
    }

    fn resident_keys(&self) -> Vec<Key> {
        let mut keys = self.t1.keys_mru_to_lru();
        keys.extend(self.t2.keys_mru_to_lru());
        keys
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Hand-traced run of the published pseudocode on a,b,a,c,b at
    /// capacity 2: after `c` demotes `b` to B1, the `b` ghost hit raises
    /// `p` to 1 and pushes `a` out of T2.
    #[test]
    fn matches_hand_traced_pseudocode() {
        let mut arc = ArcPolicy::new(2);
        let stream = [1u64, 2, 1, 3, 2];
        let outcomes: Vec<AccessOutcome> = stream.iter().map(|&raw| arc.request(Key(raw))).collect();
        use AccessOutcome::{Hit, Miss};
        assert_eq!(outcomes, vec![Miss, Miss, Hit, Miss, Miss]);
        assert!(arc.contains(Key(3)) && arc.contains(Key(2)));
        assert!(!arc.contains(Key(1)));
        assert_eq!(arc.adaptation_target(), 1);
        assert_eq!(arc.ghost_frequent_len(), 1); // a lives on as a B2 ghost
    }

    #[test]
    fn bounds_hold_on_random_streams() {
        let mut state = 11u64;
        for capacity in [1usize, 2, 3, 5, 8] {
            let mut arc = ArcPolicy::new(capacity);
            for _ in 0..2000 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                arc.request(Key(state >> 59));
                arc.check_bounds();
            }
        }
    }

    #[test]
    fn scan_does_not_flush_frequent_items() {
        let mut arc = ArcPolicy::new(4);
        for _ in 0..3 {
            arc.request(Key(1));
            arc.request(Key(2));
        }
        // a long scan of one-timers
        for raw in 100..140 {
            arc.request(Key(raw));
        }
        assert!(arc.contains(Key(1)) && arc.contains(Key(2)));
    }

    #[test]
    fn decomposed_transitions_agree_with_contract() {
        let mut arc = ArcPolicy::new(2);
        assert_eq!(arc.victim_peek(), Err(PolicyError::NotFull));
        arc.insert(Key(1)).unwrap();
        arc.insert(Key(2)).unwrap();
        assert_eq!(arc.insert(Key(3)), Err(PolicyError::CacheFull));
        assert_eq!(arc.access(Key(1)), AccessOutcome::Hit); // 1 moves to T2
        let victim = arc.victim_peek().unwrap();
        assert_eq!(victim, Key(2));
        arc.evict(victim).unwrap();
        assert_eq!(arc.ghost_recent_len(), 1);
        assert_eq!(arc.evict(Key(2)), Err(PolicyError::KeyAbsent(Key(2))));
        arc.insert(Key(2)).unwrap(); // B1 ghost hit path
        assert_eq!(arc.adaptation_target(), 1);
    }
}
