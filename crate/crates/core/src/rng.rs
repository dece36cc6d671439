//! SplitMix64 streams and the per-robot seeding rule.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Finalizer of SplitMix64 (Stafford variant 13).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub const fn new(state: u64) -> Self {
        SplitMix64 { state }
    }

    /// Stream owned by robot `id` under `master_seed`. Does not depend on
    /// how many robots exist.
    pub fn for_robot(master_seed: u64, id: u32) -> Self {
        let salt = (id as u64).wrapping_add(1).wrapping_mul(GOLDEN_GAMMA);
        SplitMix64::new(master_seed ^ salt)
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` built from the top 53 bits of one draw.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`, one draw.
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = self.next_f64();
        let v = lo + (hi - lo) * u;
        // lo + span*u can round up to hi for u close to 1.
        if v < hi {
            v
        } else {
            lo
        }
    }
}
