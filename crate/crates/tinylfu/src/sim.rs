//! The experiment driver: single runs, grids, error decomposition, and
//! memory accounting.
//!
//! A run is a pure function of its configuration: the workload stream, the
//! cache's internal seeds, and therefore the CSV output are all derived from
//! the config seed. Grid rows are embarrassingly parallel — each row owns
//! all of its state — and are reported in input order.

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::admission::{
    AdmissionError, FrequencyHistogram, HistogramBackend, HistogramConfig, SketchBackend,
};
use crate::cache::{ArcCache, AugmentedCache, CacheModel, PlainCache, WTinyLfuCache};
use crate::eviction::{AccessOutcome, LfuPolicy, LruPolicy, RandomPolicy, SlruPolicy};
use crate::sketch::{bits_for, mix64, ExactMode};
use crate::workload::{
    expected_distinct_items, expected_repeated_items, ideal_static_hit_ratio, load_trace,
    BurstSource, EpochSwapSource, TraceFormat, TraceReplay, WorkloadError, WorkloadSource,
    ZipfDistribution, ZipfSource, DEFAULT_PAGE_SIZE,
};
use crate::Key;

/// Cache management schemes the driver can run. `T`-prefixed names are the
/// corresponding plain policies augmented with the admission filter.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PolicyKind {
    Lru,
    Random,
    Lfu,
    Slru,
    Arc,
    Tlru,
    Trandom,
    Tlfu,
    Wtinylfu,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 9] = [
        PolicyKind::Lru,
        PolicyKind::Random,
        PolicyKind::Lfu,
        PolicyKind::Slru,
        PolicyKind::Arc,
        PolicyKind::Tlru,
        PolicyKind::Trandom,
        PolicyKind::Tlfu,
        PolicyKind::Wtinylfu,
    ];

    pub fn is_augmented(self) -> bool {
        matches!(
            self,
            PolicyKind::Tlru | PolicyKind::Trandom | PolicyKind::Tlfu | PolicyKind::Wtinylfu
        )
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::Lru => "lru",
            PolicyKind::Random => "random",
            PolicyKind::Lfu => "lfu",
            PolicyKind::Slru => "slru",
            PolicyKind::Arc => "arc",
            PolicyKind::Tlru => "tlru",
            PolicyKind::Trandom => "trandom",
            PolicyKind::Tlfu => "tlfu",
            PolicyKind::Wtinylfu => "wtinylfu",
        })
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PolicyKind::ALL
            .into_iter()
            .find(|kind| kind.to_string() == s)
            .ok_or_else(|| format!("unknown policy {s:?}"))
    }
}

/// What generates the request stream.
#[derive(Clone, Debug)]
pub enum WorkloadSpec {
    Zipf {
        universe: u64,
        skew: f64,
    },
    EpochSwap {
        universe: u64,
        skew: f64,
        epoch_length: u64,
    },
    Burst {
        universe: u64,
        skew: f64,
        start_probability: f64,
        burst_length: u32,
        burst_span: u64,
    },
    Trace {
        path: PathBuf,
        format: TraceFormat,
        page_size: u32,
    },
}

impl WorkloadSpec {
    /// Static synthetic workloads get the long warm-up; dynamic ones and
    /// traces are measured cold.
    fn is_static_synthetic(&self) -> bool {
        matches!(self, WorkloadSpec::Zipf { .. })
    }

    fn zipf_parameters(&self) -> Option<(u64, f64)> {
        match *self {
            WorkloadSpec::Zipf { universe, skew }
            | WorkloadSpec::EpochSwap { universe, skew, .. }
            | WorkloadSpec::Burst { universe, skew, .. } => Some((universe, skew)),
            WorkloadSpec::Trace { .. } => None,
        }
    }
}

impl fmt::Display for WorkloadSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorkloadSpec::Zipf { universe, skew } => write!(f, "zipf({universe};{skew})"),
            WorkloadSpec::EpochSwap {
                universe,
                skew,
                epoch_length,
            } => write!(f, "epoch-swap({universe};{skew};{epoch_length})"),
            WorkloadSpec::Burst {
                universe,
                skew,
                start_probability,
                burst_length,
                burst_span,
            } => write!(
                f,
                "burst({universe};{skew};{start_probability};{burst_length};{burst_span})"
            ),
            WorkloadSpec::Trace { path, format, .. } => {
                write!(f, "trace({};{format})", path.display())
            }
        }
    }
}

/// One simulation run, fully specified.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub policy: PolicyKind,
    pub capacity: u64,
    /// Histogram sample size as a multiple of the capacity: `W = factor * C`.
    pub sample_factor: u64,
    /// Window share for `wtinylfu`.
    pub window_fraction: f64,
    pub workload: WorkloadSpec,
    /// Requests excluded from statistics before counting starts.
    /// `None` applies the default: `min(20 * W, 10^6)` for static synthetic
    /// workloads, 0 otherwise.
    pub warmup: Option<u64>,
    /// Counted request budget.
    pub requests: u64,
    pub seed: u64,
    /// Sketch budget in bits per sample event.
    pub budget_bits_per_sample_item: f64,
    pub backend: SketchBackend,
}

/// Warm-up is capped so huge samples stay runnable in CI.
pub const WARMUP_CAP: u64 = 1_000_000;

impl RunConfig {
    pub fn new(policy: PolicyKind, capacity: u64, workload: WorkloadSpec) -> Self {
        RunConfig {
            policy,
            capacity,
            sample_factor: 10,
            window_fraction: crate::cache::DEFAULT_WINDOW_FRACTION,
            workload,
            warmup: None,
            requests: 2_000_000,
            seed: 42,
            budget_bits_per_sample_item: HistogramConfig::DEFAULT_BUDGET_BITS,
            backend: SketchBackend::Cbf,
        }
    }

    pub fn sample_size(&self) -> u64 {
        self.sample_factor * self.capacity
    }

    /// The warm-up actually applied, and whether the default was capped.
    pub fn effective_warmup(&self) -> (u64, bool) {
        match self.warmup {
            Some(explicit) => (explicit, false),
            None if self.workload.is_static_synthetic() => {
                let full = 20 * self.sample_size();
                (full.min(WARMUP_CAP), full > WARMUP_CAP)
            }
            None => (0, false),
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.capacity == 0 {
            return Err(SimError::InvalidConfig("capacity must be positive".into()));
        }
        if self.requests == 0 {
            return Err(SimError::InvalidConfig("request budget must be positive".into()));
        }
        if self.policy.is_augmented() && self.sample_factor == 0 {
            return Err(SimError::InvalidConfig("sample factor must be positive".into()));
        }
        if self.policy == PolicyKind::Wtinylfu
            && !(self.window_fraction > 0.0 && self.window_fraction <= 1.0)
        {
            return Err(SimError::InvalidConfig(format!(
                "window fraction must be in (0, 1], got {}",
                self.window_fraction
            )));
        }
        match &self.workload {
            WorkloadSpec::Zipf { universe, skew }
            | WorkloadSpec::EpochSwap { universe, skew, .. }
            | WorkloadSpec::Burst { universe, skew, .. } => {
                ZipfDistribution::new(*universe, *skew).map_err(SimError::Workload)?;
            }
            WorkloadSpec::Trace { page_size, .. } => {
                if *page_size == 0 {
                    return Err(SimError::InvalidConfig("page size must be positive".into()));
                }
            }
        }
        if let WorkloadSpec::EpochSwap { epoch_length, .. } = self.workload {
            if epoch_length == 0 {
                return Err(SimError::InvalidConfig("epoch length must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Error, Debug)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error(transparent)]
    Admission(#[from] AdmissionError),
    #[error("workload produced no countable requests")]
    EmptyStream,
    #[error("error decomposition requires a static distribution workload, got {0}")]
    NonStaticWorkload(String),
    #[error("memory accounting requires a distribution-backed workload, got {0}")]
    NoDistribution(String),
}

/// Outcome of one run.
#[derive(Clone, Debug)]
pub struct RunReport {
    /// Counted (post-warm-up) requests actually replayed.
    pub requests: u64,
    pub hits: u64,
    pub misses: u64,
    pub hit_ratio: f64,
    /// Warm-up requests actually consumed.
    pub warmup: u64,
    /// True when the default warm-up rule hit [`WARMUP_CAP`].
    pub warmup_capped: bool,
    /// Total admission-structure bits (0 for plain policies).
    pub sketch_bits: u64,
    pub bits_per_sample_item: f64,
    pub wall_time: Duration,
}

// Seed-stream tags so each consumer of randomness is independent.
const SEED_WORKLOAD: u64 = 1;
const SEED_HISTOGRAM: u64 = 2;
const SEED_POLICY: u64 = 3;
const SEED_BURST: u64 = 4;
const SEED_EPOCH: u64 = 5;

fn derived_seed(root: u64, tag: u64) -> u64 {
    mix64(root.wrapping_add(mix64(tag)))
}

fn build_workload(cfg: &RunConfig) -> Result<Box<dyn WorkloadSource>, SimError> {
    let seed = derived_seed(cfg.seed, SEED_WORKLOAD);
    match &cfg.workload {
        WorkloadSpec::Zipf { universe, skew } => {
            let dist = Arc::new(ZipfDistribution::new(*universe, *skew)?);
            Ok(Box::new(ZipfSource::new(dist, seed)))
        }
        WorkloadSpec::EpochSwap {
            universe,
            skew,
            epoch_length,
        } => {
            let dist = Arc::new(ZipfDistribution::new(*universe, *skew)?);
            let base = ZipfSource::new(dist, seed);
            Ok(Box::new(EpochSwapSource::new(
                base,
                *epoch_length,
                derived_seed(cfg.seed, SEED_EPOCH),
            )))
        }
        WorkloadSpec::Burst {
            universe,
            skew,
            start_probability,
            burst_length,
            burst_span,
        } => {
            let dist = Arc::new(ZipfDistribution::new(*universe, *skew)?);
            let base = ZipfSource::new(dist, seed);
            Ok(Box::new(BurstSource::new(
                base,
                *start_probability,
                *burst_length,
                *burst_span,
                derived_seed(cfg.seed, SEED_BURST),
            )))
        }
        WorkloadSpec::Trace {
            path,
            format,
            page_size,
        } => {
            let keys = load_trace(path, *format, *page_size).map_err(WorkloadError::Trace)?;
            Ok(Box::new(TraceReplay::new(keys)))
        }
    }
}

fn histogram_config(cfg: &RunConfig, cache_size: u64) -> HistogramConfig {
    HistogramConfig::new(cfg.sample_factor * cache_size, cache_size)
        .with_seed(derived_seed(cfg.seed, SEED_HISTOGRAM))
        .with_budget(cfg.budget_bits_per_sample_item)
        .with_backend(cfg.backend)
}

fn build_cache(cfg: &RunConfig) -> Result<Box<dyn CacheModel>, SimError> {
    let capacity = cfg.capacity as usize;
    let policy_seed = derived_seed(cfg.seed, SEED_POLICY);
    let histogram = |cache_size: u64| -> Result<FrequencyHistogram, SimError> {
        Ok(FrequencyHistogram::new(histogram_config(cfg, cache_size))?)
    };
    Ok(match cfg.policy {
        PolicyKind::Lru => Box::new(PlainCache::new(LruPolicy::new(capacity))),
        PolicyKind::Random => Box::new(PlainCache::new(RandomPolicy::new(capacity, policy_seed))),
        PolicyKind::Lfu => Box::new(PlainCache::new(LfuPolicy::new(capacity))),
        PolicyKind::Slru => Box::new(PlainCache::new(SlruPolicy::new(capacity))),
        PolicyKind::Arc => Box::new(ArcCache::new(capacity)),
        PolicyKind::Tlru => Box::new(AugmentedCache::new(
            LruPolicy::new(capacity),
            histogram(cfg.capacity)?,
        )),
        PolicyKind::Trandom => Box::new(AugmentedCache::new(
            RandomPolicy::new(capacity, policy_seed),
            histogram(cfg.capacity)?,
        )),
        PolicyKind::Tlfu => Box::new(AugmentedCache::new(
            LfuPolicy::new(capacity),
            histogram(cfg.capacity)?,
        )),
        PolicyKind::Wtinylfu => Box::new(WTinyLfuCache::new(
            capacity,
            cfg.window_fraction,
            histogram(cfg.capacity)?,
        )),
    })
}

fn replay(
    cache: &mut dyn CacheModel,
    source: &mut dyn WorkloadSource,
    warmup: u64,
    budget: u64,
) -> (u64, u64, u64) {
    let mut warmed = 0u64;
    while warmed < warmup {
        match source.next_key() {
            Some(key) => {
                cache.access(key);
                warmed += 1;
            }
            None => break,
        }
    }
    let (mut counted, mut hits) = (0u64, 0u64);
    while counted < budget {
        match source.next_key() {
            Some(key) => {
                counted += 1;
                if cache.access(key) == AccessOutcome::Hit {
                    hits += 1;
                }
            }
            None => break,
        }
    }
    (warmed, counted, hits)
}

/// Runs one configuration to completion.
pub fn run_simulation(cfg: &RunConfig) -> Result<RunReport, SimError> {
    cfg.validate()?;
    let started = Instant::now();
    let mut source = build_workload(cfg)?;
    let mut cache = build_cache(cfg)?;
    let (warmup, warmup_capped) = cfg.effective_warmup();
    let (warmed, counted, hits) = replay(cache.as_mut(), source.as_mut(), warmup, cfg.requests);
    if counted == 0 {
        return Err(SimError::EmptyStream);
    }
    let sketch_bits = cache.size_report().map_or(0, |r| r.total_bits);
    Ok(RunReport {
        requests: counted,
        hits,
        misses: counted - hits,
        hit_ratio: hits as f64 / counted as f64,
        warmup: warmed,
        warmup_capped,
        sketch_bits,
        bits_per_sample_item: if cfg.policy.is_augmented() {
            sketch_bits as f64 / cfg.sample_size() as f64
        } else {
            0.0
        },
        wall_time: started.elapsed(),
    })
}

pub const CSV_HEADER: &str = "policy,capacity,sample_factor,window_fraction,workload,requests,\
warmup,hits,hit_ratio,sketch_bits,bits_per_sample_item,seed,error";

/// One CSV row per the fixed schema; the error column carries a failure
/// message and the metric columns stay empty.
pub fn csv_row(cfg: &RunConfig, outcome: &Result<RunReport, SimError>) -> String {
    let window = if cfg.policy == PolicyKind::Wtinylfu {
        format!("{}", cfg.window_fraction)
    } else {
        String::new()
    };
    match outcome {
        Ok(report) => format!(
            "{},{},{},{},{},{},{},{},{:.6},{},{:.3},{},",
            cfg.policy,
            cfg.capacity,
            cfg.sample_factor,
            window,
            cfg.workload,
            report.requests,
            report.warmup,
            report.hits,
            report.hit_ratio,
            report.sketch_bits,
            report.bits_per_sample_item,
            cfg.seed,
        ),
        Err(error) => format!(
            "{},{},{},{},{},,,,,,,{},{}",
            cfg.policy,
            cfg.capacity,
            cfg.sample_factor,
            window,
            cfg.workload,
            cfg.seed,
            error.to_string().replace(',', ";"),
        ),
    }
}

/// Runs a grid of configurations in parallel, preserving input order.
pub fn run_grid(configs: &[RunConfig]) -> Vec<Result<RunReport, SimError>> {
    configs.par_iter().map(run_simulation).collect()
}

/// The grid as a complete CSV document.
pub fn run_grid_csv(configs: &[RunConfig]) -> String {
    let outcomes = run_grid(configs);
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for (cfg, outcome) in configs.iter().zip(&outcomes) {
        csv.push_str(&csv_row(cfg, outcome));
        csv.push('\n');
    }
    csv
}

/// Hit-ratio error decomposition against the clairvoyant ideal.
///
/// Four views of one identical key stream, all over LRU eviction:
/// the analytic ideal, an exact histogram with real-valued halving, an
/// exact histogram with integer halving, and the approximate sketch.
/// The three error components telescope: their sum is exactly
/// `ideal - hr_approx`.
#[derive(Clone, Copy, Debug)]
pub struct ErrorReport {
    pub ideal: f64,
    pub hr_float: f64,
    pub hr_int: f64,
    pub hr_approx: f64,
    /// `ideal - hr_float`: cost of estimating from a finite sample.
    pub sampling_error: f64,
    /// `hr_float - hr_int`: cost of integer (floor) halving at reset.
    pub truncation_error: f64,
    /// `hr_int - hr_approx`: cost of sketch false positives.
    pub approximation_error: f64,
}

fn run_lru_with_backend(cfg: &RunConfig, backend: HistogramBackend) -> Result<f64, SimError> {
    let mut source = build_workload(cfg)?;
    let histogram = FrequencyHistogram::with_backend(histogram_config(cfg, cfg.capacity), backend)?;
    let mut cache = AugmentedCache::new(LruPolicy::new(cfg.capacity as usize), histogram);
    let (warmup, _) = cfg.effective_warmup();
    let (_, counted, hits) = replay(&mut cache, source.as_mut(), warmup, cfg.requests);
    if counted == 0 {
        return Err(SimError::EmptyStream);
    }
    Ok(hits as f64 / counted as f64)
}

/// Runs the full decomposition. Rejected for non-static workloads — the
/// ideal is only defined under a constant distribution.
pub fn run_error_decomposition(cfg: &RunConfig) -> Result<ErrorReport, SimError> {
    cfg.validate()?;
    let WorkloadSpec::Zipf { universe, skew } = cfg.workload else {
        return Err(SimError::NonStaticWorkload(cfg.workload.to_string()));
    };
    let dist = ZipfDistribution::new(universe, skew)?;
    let ideal = ideal_static_hit_ratio(&dist, cfg.capacity)?;
    let hr_float = run_lru_with_backend(
        cfg,
        HistogramBackend::Exact {
            mode: ExactMode::Float,
            capped: true,
        },
    )?;
    let hr_int = run_lru_with_backend(
        cfg,
        HistogramBackend::Exact {
            mode: ExactMode::Integer,
            capped: true,
        },
    )?;
    let approx_backend = match cfg.backend {
        SketchBackend::Cbf => HistogramBackend::Cbf,
        SketchBackend::Cms => HistogramBackend::Cms,
    };
    let hr_approx = run_lru_with_backend(cfg, approx_backend)?;
    Ok(ErrorReport {
        ideal,
        hr_float,
        hr_int,
        hr_approx,
        sampling_error: ideal - hr_float,
        truncation_error: hr_float - hr_int,
        approximation_error: hr_int - hr_approx,
    })
}

/// Number of sub-sketches the sliding-sample strawman rotates through.
pub const STRAWMAN_SUB_SKETCHES: u64 = 10;

/// Bit accounting of the configured histogram against the multi-sketch
/// strawman baseline.
#[derive(Clone, Copy, Debug)]
pub struct MemoryReport {
    pub sample_size: u64,
    /// Physical structure sizes.
    pub doorkeeper_bits: u64,
    pub main_counter_bits: u64,
    pub main_counter_count: u64,
    /// Packed cell width of a main counter.
    pub counter_storage_bits: u8,
    /// Width the counters logically need for the cap (what the accounting
    /// comparison charges per counter).
    pub counter_logical_bits: u8,
    pub total_bits: u64,
    pub bits_per_sample_item: f64,
    /// Expected-population accounting under the configured distribution.
    pub expected_unique_items: f64,
    pub expected_repeated_items: f64,
    /// Logical bits charged per tracked item: one doorkeeper bit per unique
    /// item plus a logical-width counter per repeated item.
    pub tinylfu_logical_bits: f64,
    /// The strawman rotates sub-sketches over the same sample, with no cap
    /// and no doorkeeper: every unique item in every sub-window is charged
    /// a full-width counter sized to count that sub-window.
    pub strawman_counter_bits: u8,
    pub strawman_expected_unique_items: f64,
    pub strawman_logical_bits: f64,
    pub reduction_percent: f64,
}

/// Analytic memory accounting for the run's histogram configuration.
/// Requires a distribution-backed workload (the expected unique/repeat
/// populations come from it).
pub fn memory_accounting(cfg: &RunConfig) -> Result<MemoryReport, SimError> {
    cfg.validate()?;
    let Some((universe, skew)) = cfg.workload.zipf_parameters() else {
        return Err(SimError::NoDistribution(cfg.workload.to_string()));
    };
    let dist = ZipfDistribution::new(universe, skew)?;
    let hist_config = histogram_config(cfg, cfg.capacity);
    let sample = hist_config.sample_size;

    let doorkeeper_bits = hist_config.doorkeeper_bits();
    let main_counter_count = hist_config.main_counter_count() as u64;
    let counter_storage_bits = hist_config.main_counter_bits();
    let main_counter_bits = main_counter_count * counter_storage_bits as u64;
    let total_bits = doorkeeper_bits + main_counter_bits + bits_for(sample.saturating_sub(1)) as u64;

    let unique = expected_distinct_items(&dist, sample);
    let repeated = expected_repeated_items(&dist, sample);
    let logical = hist_config.logical_counter_bits();
    let tinylfu_logical_bits = unique + repeated * logical as f64;

    let sub_window = (sample / STRAWMAN_SUB_SKETCHES).max(1);
    let strawman_counter_bits = bits_for(sub_window.saturating_sub(1)).max(1);
    let strawman_unique = STRAWMAN_SUB_SKETCHES as f64 * expected_distinct_items(&dist, sub_window);
    let strawman_logical_bits = strawman_unique * strawman_counter_bits as f64;

    Ok(MemoryReport {
        sample_size: sample,
        doorkeeper_bits,
        main_counter_bits,
        main_counter_count,
        counter_storage_bits,
        counter_logical_bits: logical,
        total_bits,
        bits_per_sample_item: total_bits as f64 / sample as f64,
        expected_unique_items: unique,
        expected_repeated_items: repeated,
        tinylfu_logical_bits,
        strawman_counter_bits,
        strawman_expected_unique_items: strawman_unique,
        strawman_logical_bits,
        reduction_percent: 100.0 * (1.0 - tinylfu_logical_bits / strawman_logical_bits),
    })
}

/// Convenience constructor for the infinite-cache bound of a config's
/// counted stream: replays the same seeded workload, skipping warm-up.
pub fn counted_stream(cfg: &RunConfig) -> Result<Vec<Key>, SimError> {
    cfg.validate()?;
    let mut source = build_workload(cfg)?;
    let (warmup, _) = cfg.effective_warmup();
    let mut keys = Vec::new();
    for _ in 0..warmup {
        if source.next_key().is_none() {
            break;
        }
    }
    for _ in 0..cfg.requests {
        match source.next_key() {
            Some(key) => keys.push(key),
            None => break,
        }
    }
    Ok(keys)
}
