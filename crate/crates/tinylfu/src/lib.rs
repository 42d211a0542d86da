//! A cache-policy toolkit built around frequency-based admission.
//!
//! The crate has three layers:
//!
//! * [`sketch`] — compact approximate frequency counting: a packed counter
//!   array addressed either as a minimal-increment counting Bloom filter or
//!   as a count-min sketch, a plain Bloom-filter doorkeeper, and exact
//!   (hash-table) reference histograms used as oracles.
//! * [`admission`] + [`eviction`] + [`cache`] — the TinyLFU frequency
//!   histogram with its reset aging, classic eviction policies (LRU, Random,
//!   in-memory LFU, SLRU, ARC) behind one interface, and composed caches:
//!   any policy gated by TinyLFU admission, plus the two-region W-TinyLFU
//!   cache.
//! * [`workload`] + [`sim`] — deterministic workload sources (Zipf,
//!   epoch-swapped, bursty, file-backed traces), analytic hit-ratio bounds,
//!   and the simulation driver that produces CSV reports, error
//!   decompositions, and memory accounting.
//!
//! Everything is deterministic under a seed: a run is a pure function of its
//! configuration.

pub mod admission;
pub mod cache;
pub mod eviction;
pub mod sim;
pub mod sketch;
pub mod workload;

/// An item identity in a request stream.
///
/// Keys carry no payload; hit/miss simulation needs only identity. Trace
/// files with string tokens are mapped onto keys through a collision-checked
/// interning table (see [`workload::trace`]).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Key(pub u64);

impl From<u64> for Key {
    fn from(raw: u64) -> Self {
        Key(raw)
    }
}

impl std::fmt::Display for Key {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}
