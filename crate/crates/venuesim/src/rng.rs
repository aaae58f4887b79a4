//! Deterministic RNG for the simulation.
//!
//! splitmix64 core with labelled sub-stream derivation. Every consumer derives
//! its own stream from the master seed plus a purpose label (and usually a pid),
//! so adding or removing one consumer never shifts the draws of another.
//! Not cryptographic; stable across platforms.

/// 64-bit deterministic stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimRng {
    state: u64,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed.wrapping_add(GOLDEN),
        }
    }

    /// Derive an independent stream for `label`.
    pub fn derive(seed: u64, label: &str) -> Self {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in label.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
        Self::new(splitmix(seed ^ h))
    }

    /// Derive an independent stream for `label` keyed by an id (e.g. a pid),
    /// so per-entity draws do not depend on roster composition.
    pub fn derive_keyed(seed: u64, label: &str, key: u64) -> Self {
        let mut rng = Self::derive(seed, label);
        let k = splitmix(key.wrapping_mul(GOLDEN) ^ rng.next_u64());
        Self::new(k)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        splitmix(self.state)
    }

    /// Uniform in `[0, n)`. `n` must be nonzero.
    #[inline]
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        // Multiply-shift; bias is negligible for the ranges used here.
        ((u128::from(self.next_u64()) * u128::from(n)) >> 64) as u64
    }

    /// Uniform integer in `[lo, hi]` inclusive.
    #[inline]
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        lo + self.next_below((hi - lo + 1) as u64) as i64
    }

    /// Uniform float in `[0, 1)`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform float in `[lo, hi)`.
    #[inline]
    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.next_f64() * (hi - lo)
    }

    #[inline]
    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Deterministic Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// Pick `k` distinct elements, preserving no particular order.
    pub fn sample<T: Copy>(&mut self, items: &[T], k: usize) -> Vec<T> {
        let mut pool: Vec<T> = items.to_vec();
        self.shuffle(&mut pool);
        pool.truncate(k.min(pool.len()));
        pool
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic() {
        let mut a = SimRng::derive_keyed(42, "energy", 10123);
        let mut b = SimRng::derive_keyed(42, "energy", 10123);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn keyed_streams_do_not_collide() {
        let mut a = SimRng::derive_keyed(42, "energy", 10123);
        let mut b = SimRng::derive_keyed(42, "energy", 10124);
        let matches = (0..64).filter(|_| a.next_u64() == b.next_u64()).count();
        assert_eq!(matches, 0);
    }

    #[test]
    fn range_bounds_hold() {
        let mut rng = SimRng::new(7);
        for _ in 0..10_000 {
            let v = rng.range_i64(-3, 9);
            assert!((-3..=9).contains(&v));
            let f = rng.range_f64(0.25, 0.75);
            assert!((0.25..0.75).contains(&f));
        }
    }
}
