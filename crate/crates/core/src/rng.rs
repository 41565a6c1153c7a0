//! Deterministic random number generation.
//!
//! Simulation outputs must be reproducible bit-for-bit from a 64-bit seed, so
//! the generator and every draw path are fixed here rather than delegated to
//! a library whose stream might change between versions:
//!
//! * state generator: xoshiro256++, seeded by four consecutive outputs of a
//!   splitmix64 stream started at the seed,
//! * uniforms: the top 53 bits of `next_u64`, mapped to `[0, 1)`,
//! * normals: Box-Muller on pairs of uniforms; the second variate of each
//!   pair is cached and returned by the following call,
//! * bounded integers: 128-bit widening multiply of `next_u64` by the bound.

const SPLITMIX_GAMMA: u64 = 0x9E3779B97F4A7C15;

/// splitmix64 output function applied to a raw state value.
#[inline]
pub fn splitmix64_mix(state: u64) -> u64 {
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Advance a splitmix64 stream and return its next output.
#[inline]
pub fn splitmix64_next(state: &mut u64) -> u64 {
    *state = state.wrapping_add(SPLITMIX_GAMMA);
    splitmix64_mix(*state)
}

/// Seed for run `k` of a batch started at `base`: the k-th output of the
/// splitmix64 stream seeded with `base`. Extending a batch never changes the
/// seeds of earlier runs.
pub fn derive_run_seed(base: u64, run_index: u64) -> u64 {
    splitmix64_mix(base.wrapping_add((run_index.wrapping_add(1)).wrapping_mul(SPLITMIX_GAMMA)))
}

/// xoshiro256++ generator with the draw helpers used by the simulators.
#[derive(Debug, Clone)]
pub struct SimRng {
    s: [u64; 4],
    spare_normal: Option<f64>,
}

impl SimRng {
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = seed;
        let s = [
            splitmix64_next(&mut sm),
            splitmix64_next(&mut sm),
            splitmix64_next(&mut sm),
            splitmix64_next(&mut sm),
        ];
        Self {
            s,
            spare_normal: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform draw in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform integer in `[0, bound)`; `bound` must be nonzero.
    #[inline]
    pub fn uniform_index(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as usize
    }

    /// Standard normal variate. Consumes two uniforms on every other call.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.uniform_f64();
        let u2 = self.uniform_f64();
        // 1 - u1 keeps the logarithm argument in (0, 1].
        let mag = (-2.0 * (1.0 - u1).ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(mag * angle.sin());
        mag * angle.cos()
    }
}
