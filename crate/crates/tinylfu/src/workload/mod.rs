//! Deterministic workload sources and analytic bounds.
//!
//! Synthetic sources never end; traces do. Identical seeds and parameters
//! yield identical key streams.

mod analysis;
mod burst;
mod epoch;
pub mod trace;
mod zipf;

pub use analysis::{
    expected_distinct_items, expected_repeated_items, ideal_static_hit_ratio,
    infinite_cache_bound,
};
pub use burst::BurstSource;
pub use epoch::EpochSwapSource;
pub use trace::{load_trace, KeyInterner, TraceError, TraceFormat, TraceReplay, DEFAULT_PAGE_SIZE};
pub use zipf::{ZipfDistribution, ZipfSource};

use thiserror::Error;

use crate::Key;

#[derive(Error, Debug)]
pub enum WorkloadError {
    #[error("trace is empty")]
    EmptyTrace,
    #[error("{0}")]
    BadParameter(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// A single-consumer stream of item keys.
pub trait WorkloadSource: Send {
    /// The next key, or `None` at end of stream.
    fn next_key(&mut self) -> Option<Key>;
}
