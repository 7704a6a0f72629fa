//! Deterministic, splittable random streams.
//!
//! Every stochastic choice in the crate — game dice, evolutionary operators,
//! rollout policies — draws from a [`SeededRng`]. A stream is identified by a
//! `(seed, stream)` pair, so any draw sequence can be re-created from those
//! two numbers alone, on any platform. The generator is a SplitMix64 counter:
//! the output function is the 64-bit finalizer `mix64`, the state advances by
//! a fixed odd constant, and child streams are derived by bijectively mixing
//! the child id into the stream id. Keeping the generator in-repo (rather than
//! pulling a crate) pins the exact bit sequence the benchmark results depend
//! on.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a bijective 64-bit mixer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A seeded, splittable PRNG stream.
///
/// `split(child_id)` is a pure derivation: it never consumes draws from the
/// parent, and distinct child ids always yield distinct streams (the child id
/// enters through bijective mixing). `fork` is the draw-consuming variant used
/// when a fresh stream is needed per evaluation without bookkeeping ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    state: u64,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        SeededRng {
            seed,
            stream,
            state: mix64(seed.wrapping_add(mix64(stream))),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Derive the child stream `child_id` without consuming any draws.
    /// Injective in `child_id` for a fixed parent stream.
    pub fn split(&self, child_id: u64) -> Self {
        let child_stream = mix64(self.stream ^ mix64(child_id.wrapping_add(GAMMA)));
        SeededRng::new(self.seed, child_stream)
    }

    /// Derive a fresh child stream keyed by the next draw of this stream.
    pub fn fork(&mut self) -> Self {
        let id = self.next_u64();
        self.split(id)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform in `[0, n)`. Lemire multiply-shift reduction; `n` must be > 0.
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0, "next_below(0)");
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    pub fn gen_bool(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    pub fn choose<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.next_below(items.len() as u64) as usize]
    }

    /// First `k` entries of a partial Fisher-Yates shuffle of `0..n`:
    /// a uniform sample of `k` distinct indices, order included.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        debug_assert!(k <= n);
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.next_below((n - i) as u64) as usize;
            idx.swap(i, j);
        }
        idx.truncate(k);
        idx
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        let n = items.len();
        for i in 0..n.saturating_sub(1) {
            let j = i + self.next_below((n - i) as u64) as usize;
            items.swap(i, j);
        }
    }
}
