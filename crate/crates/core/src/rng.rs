//! Seedable 64-bit generator used everywhere randomness is needed.
//!
//! This is SplitMix64 (Steele, Lea & Flood's `splitmix64` finalizer run
//! as a counter-based stream). It is deliberately tiny and has a fixed,
//! documented bitstream, so identical seeds reproduce identical texts,
//! pattern picks and replicate statistics on every platform. Experiments
//! are reproducible across reimplementations at the level of statistics,
//! not bitstreams.

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[0, n)`. `n` must be nonzero; the modulo bias is
    /// negligible for the small ranges used here.
    pub fn next_below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// A decorrelated child generator, for per-replicate streams.
    pub fn fork(&mut self) -> SplitMix64 {
        SplitMix64::new(self.next_u64())
    }
}
