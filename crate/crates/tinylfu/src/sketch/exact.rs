//! Exact reference histograms.
//!
//! A plain hash table with the same record/estimate/halve surface as the
//! sketch. Used as the oracle in error decompositions: the floating-point
//! flavour halves by a real division, the integer flavour by floor
//! division, and the gap between the two on an identical stream is the
//! truncation error introduced by integer aging.

use std::collections::HashMap;

use crate::Key;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExactMode {
    /// Values halve to `v / 2.0` exactly.
    Float,
    /// Values halve to `floor(v / 2)`.
    Integer,
}

/// Values this small can never influence an admission comparison against
/// anything that was seen in the last dozens of reset periods; dropping them
/// keeps the table bounded by the active key set.
const PRUNE_BELOW: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ExactHistogram {
    mode: ExactMode,
    cap: Option<f64>,
    table: HashMap<Key, f64>,
}

impl ExactHistogram {
    /// `cap = None` means unbounded counters.
    pub fn new(mode: ExactMode, cap: Option<u64>) -> Self {
        ExactHistogram {
            mode,
            cap: cap.map(|c| c as f64),
            table: HashMap::new(),
        }
    }

    pub fn mode(&self) -> ExactMode {
        self.mode
    }

    /// Adds one occurrence, saturating at the cap.
    pub fn record(&mut self, key: Key) {
        let slot = self.table.entry(key).or_insert(0.0);
        *slot += 1.0;
        if let Some(cap) = self.cap {
            if *slot > cap {
                *slot = cap;
            }
        }
    }

    /// The raw counter value; 0.0 for a never-recorded key.
    pub fn value(&self, key: Key) -> f64 {
        self.table.get(&key).copied().unwrap_or(0.0)
    }

    /// The counter floored to an integer, mirroring the sketch estimate.
    pub fn estimate(&self, key: Key) -> u64 {
        self.value(key) as u64
    }

    /// Halves every counter according to the mode.
    pub fn halve_all(&mut self) {
        match self.mode {
            ExactMode::Float => {
                self.table.retain(|_, v| {
                    *v /= 2.0;
                    *v >= PRUNE_BELOW
                });
            }
            ExactMode::Integer => {
                self.table.retain(|_, v| {
                    *v = (*v / 2.0).floor();
                    *v >= 1.0
                });
            }
        }
    }

    /// Overwrites a counter. Oracle affordance for convergence studies that
    /// need to start from a known error.
    pub fn set_value(&mut self, key: Key, value: f64) {
        self.table.insert(key, value);
    }

    pub fn distinct_keys(&self) -> usize {
        self.table.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_halving_floors() {
        let mut h = ExactHistogram::new(ExactMode::Integer, None);
        for _ in 0..7 {
            h.record(Key(1));
        }
        h.halve_all();
        assert_eq!(h.estimate(Key(1)), 3);
    }

    #[test]
    fn float_halving_is_exact() {
        let mut h = ExactHistogram::new(ExactMode::Float, None);
        for _ in 0..7 {
            h.record(Key(1));
        }
        h.halve_all();
        assert_eq!(h.value(Key(1)), 3.5);
    }

    #[test]
    fn unknown_key_is_zero() {
        let h = ExactHistogram::new(ExactMode::Float, Some(8));
        assert_eq!(h.estimate(Key(99)), 0);
        assert_eq!(h.value(Key(99)), 0.0);
    }

    #[test]
    fn cap_saturates_both_modes() {
        for mode in [ExactMode::Float, ExactMode::Integer] {
            let mut h = ExactHistogram::new(mode, Some(4));
            for _ in 0..10 {
                h.record(Key(3));
            }
            assert_eq!(h.value(Key(3)), 4.0);
        }
    }

    #[test]
    fn truncation_gap_stays_below_one() {
        // Identical stream into both modes: 0 <= float - int < 1 for every
        // key after every event and every halving.
        let mut float = ExactHistogram::new(ExactMode::Float, None);
        let mut int = ExactHistogram::new(ExactMode::Integer, None);
        let mut state = 7u64;
        for step in 0..20_000u64 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let key = Key(state >> 58);
            float.record(key);
            int.record(key);
            if step % 512 == 511 {
                float.halve_all();
                int.halve_all();
            }
            if step % 97 == 0 {
                for raw in 0..64 {
                    let gap = float.value(Key(raw)) - int.value(Key(raw));
                    assert!((0.0..1.0).contains(&gap), "gap {gap} at step {step}");
                }
            }
        }
    }
}
