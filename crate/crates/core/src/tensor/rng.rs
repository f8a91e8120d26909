/// SplitMix64 generator.
///
/// Constants are the published ones (Steele, Lea & Flood 2014): golden-ratio
/// increment `0x9E3779B97F4A7C15`, mixing multipliers `0xBF58476D1CE4E5B9` and
/// `0x94D049BB133111EB`. Uniform doubles take the top 53 bits, so the stream
/// is identical on every platform and trivially portable to other languages.
#[derive(Clone, Debug)]
pub struct SeededRng {
    state: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-1, 1)`.
    pub fn next_uniform(&mut self) -> f64 {
        2.0 * self.next_unit() - 1.0
    }

    /// Uniform integer in `lo..=hi`.
    pub fn next_range(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }

    pub fn vec_uniform(&mut self, len: usize, scale: f64) -> Vec<f64> {
        (0..len).map(|_| scale * self.next_uniform()).collect()
    }
}
