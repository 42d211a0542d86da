//! Bit-packed counter storage.
//!
//! Counters are packed little-endian into 64-bit words. The cell width must
//! divide the word width so that a whole word always holds an integral
//! number of counters; that is what makes the bulk halving a two-instruction
//! word loop instead of a per-counter unpack/repack.

/// Counter widths that divide the 64-bit storage word.
pub const PERMITTED_WIDTHS: [u8; 4] = [1, 2, 4, 8];

/// Rounds a logical width (bits needed to represent the largest value) up to
/// the next permitted packing width. A 3-bit request is stored in 4-bit
/// cells.
pub fn storage_width(logical_bits: u8) -> Option<u8> {
    PERMITTED_WIDTHS.iter().copied().find(|&w| w >= logical_bits)
}

/// Bits required to represent values in `[0, max_value]`.
pub fn bits_for(max_value: u64) -> u8 {
    if max_value == 0 {
        1
    } else {
        (64 - max_value.leading_zeros()) as u8
    }
}

/// A fixed-length array of `len` unsigned counters of `bits` bits each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackedCounters {
    bits: u8,
    len: usize,
    words: Vec<u64>,
}

impl PackedCounters {
    /// Creates an all-zero array. `bits` must be one of [`PERMITTED_WIDTHS`].
    pub fn new(len: usize, bits: u8) -> Self {
        assert!(
            PERMITTED_WIDTHS.contains(&bits),
            "counter width {bits} does not divide the storage word"
        );
        assert!(len > 0, "empty counter array");
        let per_word = 64 / bits as usize;
        let words = vec![0u64; len.div_ceil(per_word)];
        PackedCounters { bits, len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits_per_counter(&self) -> u8 {
        self.bits
    }

    /// Largest value a cell can hold.
    pub fn cell_max(&self) -> u64 {
        (1u64 << self.bits) - 1
    }

    /// Storage actually used by counters, excluding word padding.
    pub fn counter_bits_total(&self) -> u64 {
        self.len as u64 * self.bits as u64
    }

    /// Storage allocated, including padding up to a whole word.
    pub fn allocated_bits(&self) -> u64 {
        self.words.len() as u64 * 64
    }

    #[inline]
    fn locate(&self, index: usize) -> (usize, u32) {
        debug_assert!(index < self.len);
        let per_word = 64 / self.bits as usize;
        (index / per_word, ((index % per_word) as u32) * self.bits as u32)
    }

    #[inline]
    pub fn get(&self, index: usize) -> u64 {
        let (word, shift) = self.locate(index);
        (self.words[word] >> shift) & self.cell_max()
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: u64) {
        debug_assert!(value <= self.cell_max());
        let (word, shift) = self.locate(index);
        let mask = self.cell_max() << shift;
        self.words[word] = (self.words[word] & !mask) | (value << shift);
    }

    #[inline]
    pub fn increment(&mut self, index: usize) {
        let v = self.get(index);
        self.set(index, v + 1);
    }

    /// Halves every counter in place, one word at a time.
    ///
    /// Shifting a whole word right by one moves each cell's low bits into
    /// place; the mask then clears each cell's top bit, which after the
    /// shift holds the bit that crossed over from the neighbouring cell.
    /// The result is bit-identical to `set(i, get(i) / 2)` for every `i`.
    pub fn halve_all(&mut self) {
        let mask = self.halve_mask();
        for word in &mut self.words {
            *word = (*word >> 1) & mask;
        }
    }

    fn halve_mask(&self) -> u64 {
        // Replicate (cell_max >> 1) into every cell of the word. For 4-bit
        // cells this is 0x7777...; for 1-bit cells it is zero, since
        // floor(c / 2) of a 1-bit counter is always zero.
        let spread = u64::MAX / self.cell_max();
        spread * (self.cell_max() >> 1)
    }
}
