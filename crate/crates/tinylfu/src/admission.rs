//! The TinyLFU admission brain.
//!
//! A [`FrequencyHistogram`] tracks approximate access frequencies over a
//! rolling sample of `W` events. Every recorded event bumps an event
//! counter; when it reaches `W` the histogram *resets*: all counters are
//! halved, the doorkeeper is cleared, and the event counter itself is halved
//! so the steady-state reset period is `W / 2` events.
//!
//! Estimates combine the main sketch with the doorkeeper: a key currently in
//! the doorkeeper gets +1. The admission decision is a pure comparison — a
//! candidate displaces the cache victim only if its estimate is strictly
//! higher.
//!
//! The main structure is pluggable: the production backends are the CBF and
//! CMS sketches; exact hash-table backends (float or integer halving, no
//! doorkeeper) exist for error decomposition, where the gap between them
//! isolates truncation error and the gap to the sketch isolates
//! approximation error.

use std::fmt;

use thiserror::Error;

use crate::sketch::{
    bits_for, mix64, storage_width, Doorkeeper, ExactHistogram, ExactMode, FrequencySketch,
    SketchConfig, SketchConfigError, SketchLayout,
};
use crate::Key;

/// Production sketch backends selectable in configuration.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SketchBackend {
    Cbf,
    Cms,
}

impl fmt::Display for SketchBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SketchBackend::Cbf => "cbf",
            SketchBackend::Cms => "cms",
        })
    }
}

/// Backend choice for [`FrequencyHistogram::with_backend`], including the
/// exact oracle flavours.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HistogramBackend {
    Cbf,
    Cms,
    /// Exact hash-table counting, no doorkeeper, no false positives.
    /// `capped: false` lifts the counter cap entirely.
    Exact { mode: ExactMode, capped: bool },
}

#[derive(Error, Debug, PartialEq)]
pub enum AdmissionError {
    #[error("sample_size ({sample}) must be at least cache_size ({cache}), both positive")]
    SampleSmallerThanCache { sample: u64, cache: u64 },
    #[error("counter cap must be at least 1")]
    ZeroCap,
    #[error("counter cap {0} exceeds the widest packed counter (8 bits, 255)")]
    CapTooLarge(u64),
    #[error("doorkeeper_share must lie strictly between 0 and 1, got {0}")]
    BadDoorkeeperShare(f64),
    #[error("budget_bits_per_sample_item must be positive, got {0}")]
    BadBudget(f64),
    #[error("reset listener {0:?} is already registered")]
    DuplicateListener(String),
    #[error(transparent)]
    Sketch(#[from] SketchConfigError),
}

/// Sizing and behaviour of a [`FrequencyHistogram`].
#[derive(Clone, Debug)]
pub struct HistogramConfig {
    /// Events per reset period (`W`).
    pub sample_size: u64,
    /// Size of the cache the histogram advises (`C`); used to derive the cap.
    pub cache_size: u64,
    /// Estimate saturation value, default `ceil(W / C)`. With a doorkeeper
    /// the main sketch caps at `counter_cap - 1` and the doorkeeper's +1
    /// covers the rest.
    pub counter_cap: u64,
    pub doorkeeper_enabled: bool,
    /// Total sketch budget, in bits per sample event.
    pub budget_bits_per_sample_item: f64,
    /// Fraction of the budget given to the doorkeeper.
    pub doorkeeper_share: f64,
    pub sketch_backend: SketchBackend,
    pub seed: u64,
}

impl HistogramConfig {
    pub const DEFAULT_BUDGET_BITS: f64 = 10.0;
    pub const DEFAULT_DOORKEEPER_SHARE: f64 = 0.3;

    pub fn new(sample_size: u64, cache_size: u64) -> Self {
        HistogramConfig {
            sample_size,
            cache_size,
            counter_cap: sample_size.div_ceil(cache_size.max(1)),
            doorkeeper_enabled: true,
            budget_bits_per_sample_item: Self::DEFAULT_BUDGET_BITS,
            doorkeeper_share: Self::DEFAULT_DOORKEEPER_SHARE,
            sketch_backend: SketchBackend::Cbf,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, bits_per_sample_item: f64) -> Self {
        self.budget_bits_per_sample_item = bits_per_sample_item;
        self
    }

    pub fn with_backend(mut self, backend: SketchBackend) -> Self {
        self.sketch_backend = backend;
        self
    }

    pub fn with_counter_cap(mut self, cap: u64) -> Self {
        self.counter_cap = cap;
        self
    }

    pub fn without_doorkeeper(mut self) -> Self {
        self.doorkeeper_enabled = false;
        self
    }

    fn validate(&self) -> Result<(), AdmissionError> {
        if self.cache_size == 0 || self.sample_size < self.cache_size {
            return Err(AdmissionError::SampleSmallerThanCache {
                sample: self.sample_size,
                cache: self.cache_size,
            });
        }
        if self.counter_cap == 0 {
            return Err(AdmissionError::ZeroCap);
        }
        if self.main_cap() > 255 {
            return Err(AdmissionError::CapTooLarge(self.counter_cap));
        }
        if !(self.doorkeeper_share > 0.0 && self.doorkeeper_share < 1.0) {
            return Err(AdmissionError::BadDoorkeeperShare(self.doorkeeper_share));
        }
        if !(self.budget_bits_per_sample_item > 0.0) {
            return Err(AdmissionError::BadBudget(self.budget_bits_per_sample_item));
        }
        Ok(())
    }

    /// Saturation value of the main sketch. The doorkeeper's +1 brings the
    /// total estimate reach back to `counter_cap`.
    pub fn main_cap(&self) -> u64 {
        if self.doorkeeper_enabled {
            self.counter_cap - 1
        } else {
            self.counter_cap
        }
    }

    /// Packed width of a main-sketch counter cell.
    pub fn main_counter_bits(&self) -> u8 {
        storage_width(bits_for(self.main_cap().max(1))).expect("cap validated to fit 8 bits")
    }

    /// Width the counters logically need to tell `main_cap` occurrence
    /// levels apart; this is what memory accounting reports (a cap of 8
    /// counts with 3 logical bits even though it is stored in a 4-bit cell).
    pub fn logical_counter_bits(&self) -> u8 {
        let cap = self.main_cap();
        if cap <= 1 {
            1
        } else {
            bits_for(cap - 1)
        }
    }

    fn total_budget_bits(&self) -> u64 {
        (self.budget_bits_per_sample_item * self.sample_size as f64).round() as u64
    }

    /// Doorkeeper size under the budget split.
    pub fn doorkeeper_bits(&self) -> u64 {
        if !self.doorkeeper_enabled {
            return 0;
        }
        ((self.total_budget_bits() as f64 * self.doorkeeper_share).round() as u64).max(64)
    }

    /// Counters in the main sketch under the budget split.
    pub fn main_counter_count(&self) -> usize {
        let main_bits = self.total_budget_bits().saturating_sub(self.doorkeeper_bits());
        let count = (main_bits / self.main_counter_bits() as u64).max(1) as usize;
        match self.sketch_backend {
            SketchBackend::Cbf => count,
            // Equal-width rows.
            SketchBackend::Cms => (count - count % 4).max(4),
        }
    }

    fn build_sketch(&self, layout: SketchLayout) -> Result<FrequencySketch, AdmissionError> {
        let base = match layout {
            SketchLayout::SingleArrayCbf => SketchConfig::cbf(
                self.main_counter_count(),
                self.main_counter_bits(),
                self.main_cap(),
                mix64(self.seed ^ 0xa5a5_a5a5_a5a5_a5a5),
            ),
            SketchLayout::RowsCms => SketchConfig::cms(
                self.main_counter_count(),
                self.main_counter_bits(),
                self.main_cap(),
                mix64(self.seed ^ 0xa5a5_a5a5_a5a5_a5a5),
            ),
        };
        Ok(FrequencySketch::new(base)?)
    }

    fn build_doorkeeper(&self) -> Option<Doorkeeper> {
        self.doorkeeper_enabled.then(|| {
            Doorkeeper::new(
                self.doorkeeper_bits(),
                Doorkeeper::DEFAULT_HASHES,
                mix64(self.seed ^ 0x5a5a_5a5a_5a5a_5a5a),
            )
        })
    }
}

enum MainCounter {
    Sketch(FrequencySketch),
    Exact(ExactHistogram),
}

/// Exact bit counts of the histogram's structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HistogramSizeReport {
    pub doorkeeper_bits: u64,
    pub main_counter_bits: u64,
    pub event_counter_bits: u64,
    pub total_bits: u64,
}

type ResetHook = Box<dyn FnMut(&FrequencyHistogram) + Send>;

/// Doorkeeper + main sketch + event counter: the TinyLFU frequency
/// histogram.
pub struct FrequencyHistogram {
    config: HistogramConfig,
    doorkeeper: Option<Doorkeeper>,
    main: MainCounter,
    /// Events since the last reset (`S`). Stays below `sample_size` outside
    /// the reset itself.
    events: u64,
    listeners: Vec<(String, ResetHook)>,
}

impl fmt::Debug for FrequencyHistogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrequencyHistogram")
            .field("config", &self.config)
            .field("events", &self.events)
            .field("listeners", &self.listeners.len())
            .finish_non_exhaustive()
    }
}

impl FrequencyHistogram {
    /// Builds with the production backend named in the config.
    pub fn new(config: HistogramConfig) -> Result<Self, AdmissionError> {
        let backend = match config.sketch_backend {
            SketchBackend::Cbf => HistogramBackend::Cbf,
            SketchBackend::Cms => HistogramBackend::Cms,
        };
        Self::with_backend(config, backend)
    }

    /// Builds with an explicit backend. Exact backends never get a
    /// doorkeeper: they count every occurrence directly.
    pub fn with_backend(
        config: HistogramConfig,
        backend: HistogramBackend,
    ) -> Result<Self, AdmissionError> {
        config.validate()?;
        let (main, doorkeeper) = match backend {
            HistogramBackend::Cbf => (
                MainCounter::Sketch(config.build_sketch(SketchLayout::SingleArrayCbf)?),
                config.build_doorkeeper(),
            ),
            HistogramBackend::Cms => (
                MainCounter::Sketch(config.build_sketch(SketchLayout::RowsCms)?),
                config.build_doorkeeper(),
            ),
            HistogramBackend::Exact { mode, capped } => (
                MainCounter::Exact(ExactHistogram::new(
                    mode,
                    capped.then_some(config.counter_cap),
                )),
                None,
            ),
        };
        Ok(FrequencyHistogram {
            config,
            doorkeeper,
            main,
            events: 0,
            listeners: Vec::new(),
        })
    }

    pub fn config(&self) -> &HistogramConfig {
        &self.config
    }

    pub fn sample_size(&self) -> u64 {
        self.config.sample_size
    }

    /// Events recorded since the last reset.
    pub fn events_since_reset(&self) -> u64 {
        self.events
    }

    /// Records one access. First-timers land in the doorkeeper only;
    /// repeat items reach the main structure. Returns `true` when this
    /// event filled the sample and triggered a reset.
    pub fn record(&mut self, key: Key) -> bool {
        match &mut self.main {
            MainCounter::Sketch(sketch) => {
                let first_time = match &mut self.doorkeeper {
                    Some(dk) => !dk.insert(key),
                    None => false,
                };
                if !first_time {
                    sketch.record(key);
                }
            }
            MainCounter::Exact(table) => table.record(key),
        }
        self.events += 1;
        if self.events >= self.config.sample_size {
            self.reset();
            true
        } else {
            false
        }
    }

    /// The frequency estimate as the admission comparison sees it. The
    /// exact-float backend keeps fractional counter values so that real
    /// and integer halving remain distinguishable.
    pub fn estimate_f64(&self, key: Key) -> f64 {
        match &self.main {
            MainCounter::Sketch(sketch) => {
                let mut estimate = sketch.estimate(key) as f64;
                if let Some(dk) = &self.doorkeeper {
                    if dk.contains(key) {
                        estimate += 1.0;
                    }
                }
                estimate.min(self.config.counter_cap as f64)
            }
            MainCounter::Exact(table) => table.value(key),
        }
    }

    /// The integer frequency estimate, in `[0, counter_cap]`.
    pub fn estimate(&self, key: Key) -> u64 {
        self.estimate_f64(key) as u64
    }

    /// Should `candidate` displace `victim`? True iff the candidate's
    /// estimate is strictly higher; ties keep the resident item. Pure.
    pub fn admit(&self, candidate: Key, victim: Key) -> bool {
        self.estimate_f64(candidate) > self.estimate_f64(victim)
    }

    /// Ages the histogram: halves every main counter (and the event
    /// counter), clears the doorkeeper, then runs each registered reset
    /// hook exactly once. Runs automatically from [`record`](Self::record)
    /// when the sample fills; exposed for tests and for callers that manage
    /// their own schedule.
    pub fn reset(&mut self) {
        match &mut self.main {
            MainCounter::Sketch(sketch) => sketch.halve_all(),
            MainCounter::Exact(table) => table.halve_all(),
        }
        if let Some(dk) = &mut self.doorkeeper {
            dk.clear();
        }
        self.events /= 2;
        // Hooks observe the post-reset state; they are detached for the
        // duration of the calls so they can be handed `&self`.
        let mut hooks = std::mem::take(&mut self.listeners);
        for (_, hook) in hooks.iter_mut() {
            hook(self);
        }
        self.listeners = hooks;
    }

    /// Registers a hook to run at the end of every reset. Names must be
    /// unique; re-registering one is an error.
    pub fn register_reset_listener(
        &mut self,
        name: impl Into<String>,
        hook: impl FnMut(&FrequencyHistogram) + Send + 'static,
    ) -> Result<(), AdmissionError> {
        let name = name.into();
        if self.listeners.iter().any(|(existing, _)| *existing == name) {
            return Err(AdmissionError::DuplicateListener(name));
        }
        self.listeners.push((name, Box::new(hook)));
        Ok(())
    }

    pub fn listener_count(&self) -> usize {
        self.listeners.len()
    }

    /// Exact bit counts, for sketch backends. Exact-table backends have no
    /// meaningful fixed footprint and report `None`.
    pub fn size_report(&self) -> Option<HistogramSizeReport> {
        let MainCounter::Sketch(sketch) = &self.main else {
            return None;
        };
        let doorkeeper_bits = self.doorkeeper.as_ref().map_or(0, Doorkeeper::bit_count);
        let main_counter_bits = sketch.counter_bits_total();
        let event_counter_bits = bits_for(self.config.sample_size.saturating_sub(1)) as u64;
        Some(HistogramSizeReport {
            doorkeeper_bits,
            main_counter_bits,
            event_counter_bits,
            total_bits: doorkeeper_bits + main_counter_bits + event_counter_bits,
        })
    }

    #[cfg(test)]
    pub(crate) fn doorkeeper(&self) -> Option<&Doorkeeper> {
        self.doorkeeper.as_ref()
    }

    #[cfg(test)]
    pub(crate) fn doorkeeper_mut(&mut self) -> Option<&mut Doorkeeper> {
        self.doorkeeper.as_mut()
    }

    #[cfg(test)]
    pub(crate) fn main_sketch(&self) -> Option<&FrequencySketch> {
        match &self.main {
            MainCounter::Sketch(s) => Some(s),
            MainCounter::Exact(_) => None,
        }
    }

    #[cfg(test)]
    pub(crate) fn main_sketch_mut(&mut self) -> Option<&mut FrequencySketch> {
        match &mut self.main {
            MainCounter::Sketch(s) => Some(s),
            MainCounter::Exact(_) => None,
        }
    }
}
