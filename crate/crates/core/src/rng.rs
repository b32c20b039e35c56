//! Seeded, platform-independent random number stream.
//!
//! `RngStream` is a counter-based generator built on the SplitMix64 output
//! function: draw `i` of seed `s` is `mix64(s + (i+1)*GOLDEN_GAMMA)`, so the
//! pair `(seed, position)` fully determines the next value on every platform.
//! The generator is versioned by this definition; changing it would
//! invalidate golden mask files and recorded training runs.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed. Children of distinct indices and the
/// parent's own draw sequence do not overlap.
pub fn child_seed(parent: u64, index: u64) -> u64 {
    mix64(parent ^ mix64(index.wrapping_add(GOLDEN_GAMMA)))
}

/// Deterministic stream of random draws identified by `(seed, position)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    position: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream { seed, position: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of draws consumed so far.
    pub fn position(&self) -> u64 {
        self.position
    }

    /// Independent stream for parallel work; see [`child_seed`].
    pub fn child(&self, index: u64) -> RngStream {
        RngStream::new(child_seed(self.seed, index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.position = self.position.wrapping_add(1);
        mix64(self.seed.wrapping_add(self.position.wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Unbiased uniform integer in `[0, n)`. `n` must be nonzero.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        // Rejection sampling removes the modulo bias.
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Two independent standard normal draws (Box-Muller).
    pub fn normal_pair(&mut self) -> (f64, f64) {
        // u1 in (0, 1] so the log is finite.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        (r * theta.cos(), r * theta.sin())
    }

    /// Fills `out` with i.i.d. standard normal samples.
    pub fn fill_normal(&mut self, out: &mut [f64]) {
        let mut chunks = out.chunks_exact_mut(2);
        for pair in &mut chunks {
            let (a, b) = self.normal_pair();
            pair[0] = a;
            pair[1] = b;
        }
        if let [last] = chunks.into_remainder() {
            *last = self.normal_pair().0;
        }
    }

    /// Partial Fisher-Yates draw of `k` distinct indices from `[0, n)`.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n, "sample_indices: k > n");
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below((n - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_seeds_agree_for_a_million_draws() {
        let mut a = RngStream::new(0xDEAD_BEEF);
        let mut b = RngStream::new(0xDEAD_BEEF);
        for _ in 0..1_000_000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn draw_depends_only_on_seed_and_position() {
        let mut a = RngStream::new(42);
        a.next_u64();
        a.next_u64();
        let third = a.next_u64();

        let mut b = RngStream::new(42);
        b.next_u64();
        b.next_u64();
        assert_eq!(b.next_u64(), third);
        assert_eq!(b.position(), 3);
    }

    #[test]
    fn known_stream_values_are_stable() {
        // Frozen so a silent generator change cannot slip through a release.
        let mut s = RngStream::new(0);
        let first: Vec<u64> = (0..4).map(|_| s.next_u64()).collect();
        assert_eq!(
            first,
            vec![
                0xE220_A839_7B1D_CDAF,
                0x6E78_9E6A_A1B9_65F4,
                0x06C4_5D18_8009_454F,
                0xF88B_B8A8_724C_81EC
            ]
        );
    }

    #[test]
    fn child_streams_differ_from_parent_and_each_other() {
        let parent = RngStream::new(7);
        let mut c0 = parent.child(0);
        let mut c1 = parent.child(1);
        let mut p = parent.clone();
        let (a, b, c) = (c0.next_u64(), c1.next_u64(), p.next_u64());
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(b, c);
    }

    #[test]
    fn next_f64_is_in_unit_interval() {
        let mut s = RngStream::new(99);
        for _ in 0..10_000 {
            let v = s.next_f64();
            assert!((0.0..1.0).contains(&v));
        }
    }

    #[test]
    fn below_is_unbiased_over_small_range() {
        let mut s = RngStream::new(5);
        let mut counts = [0u32; 3];
        for _ in 0..30_000 {
            counts[s.below(3) as usize] += 1;
        }
        for &c in &counts {
            assert!((9_000..11_000).contains(&c), "counts {counts:?}");
        }
    }

    #[test]
    fn normal_moments_are_plausible() {
        let mut s = RngStream::new(11);
        let mut buf = vec![0.0; 100_001];
        s.fill_normal(&mut buf);
        let n = buf.len() as f64;
        let mean = buf.iter().sum::<f64>() / n;
        let var = buf.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.03, "var {var}");
    }

    #[test]
    fn sample_indices_are_distinct_and_in_range() {
        let mut s = RngStream::new(3);
        let picks = s.sample_indices(100, 15);
        assert_eq!(picks.len(), 15);
        let mut sorted = picks.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 15);
        assert!(picks.iter().all(|&i| i < 100));
    }
}
