//! Seeded random source with a fixed, language-independent definition.
//!
//! Every random decision the generator makes goes through [`SplitMix64`], so
//! a documentary is reproducible from its seed by any implementation that
//! follows the three rules below.
//!
//! * `next_u64`: `state += 0x9E3779B97F4A7C15` (wrapping), then
//!   `z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//!   z = (z ^ (z >> 27)) * 0x94D049BB133111EB; return z ^ (z >> 31)`.
//! * `below(n)`: draw `x = next_u64()` until `x >= (2^64 mod n)`, return
//!   `x mod n`. Rejection keeps the draw unbiased.
//! * `shuffle`: Fisher-Yates from the last index down, `j = below(i + 1)`.
//!
//! Restart attempt `k >= 1` reseeds with [`sub_seed`]`(seed, k)`;
//! attempt 0 uses the seed as is.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform integer in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let n = n as u64;
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return (x % n) as usize;
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    pub fn choose<'a, T>(&mut self, items: &'a [T]) -> Option<&'a T> {
        if items.is_empty() {
            None
        } else {
            Some(&items[self.below(items.len())])
        }
    }
}

/// Seed for restart attempt `attempt` of a generation seeded with `seed`.
pub fn sub_seed(seed: u64, attempt: u32) -> u64 {
    if attempt == 0 {
        return seed;
    }
    mix64(seed ^ mix64(u64::from(attempt).wrapping_mul(GOLDEN_GAMMA)))
}
