//! Victim-selection policies behind one interface.
//!
//! Every policy is a key-only state machine with separated transitions:
//! `access` records a touch and reports hit/miss but never inserts,
//! `victim_peek` proposes the item that would be evicted, and
//! `insert`/`evict` perform the mutations. The split is what lets an
//! admission gate sit between the miss and the insertion.
//!
//! All policies are deterministic functions of the access stream (the
//! Random policy is seeded), and instances are plain owned values that can
//! move between threads.

mod arc;
mod lfu;
mod list;
mod lru;
mod random;
mod slru;

pub use arc::ArcPolicy;
pub use lfu::LfuPolicy;
pub use lru::LruPolicy;
pub use random::RandomPolicy;
pub use slru::SlruPolicy;

use thiserror::Error;

use crate::Key;

/// Outcome of a cache lookup.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AccessOutcome {
    Hit,
    Miss,
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum PolicyError {
    #[error("cache is not full; there is no victim to peek")]
    NotFull,
    #[error("cache is full; evict before inserting")]
    CacheFull,
    #[error("key {0} is not cached")]
    KeyAbsent(Key),
}

/// The uniform victim-selection contract.
pub trait EvictionPolicy {
    /// Maximum resident items.
    fn capacity(&self) -> usize;

    /// Current resident items. Never exceeds the capacity.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn is_full(&self) -> bool {
        self.len() >= self.capacity()
    }

    fn contains(&self, key: Key) -> bool;

    /// Touches the key: updates recency/frequency state on a hit. On a miss
    /// nothing is inserted — insertion is the driver's call.
    fn access(&mut self, key: Key) -> AccessOutcome;

    /// The item that would be evicted next. Defined only on a full cache;
    /// stable between mutations.
    fn victim_peek(&self) -> Result<Key, PolicyError>;

    /// Inserts a new key. The cache must not be full and the key must not
    /// be resident.
    fn insert(&mut self, key: Key) -> Result<(), PolicyError>;

    /// Removes a resident key.
    fn evict(&mut self, key: Key) -> Result<(), PolicyError>;

    /// Hook invoked when the admission histogram performs its reset, so
    /// frequency-carrying policies can age their own counters in sync.
    fn on_frequency_reset(&mut self) {}

    /// Snapshot of resident keys, for conservation checks and tests.
    fn resident_keys(&self) -> Vec<Key>;
}
