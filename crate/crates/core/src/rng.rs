//! Deterministic random streams.
//!
//! Everything random in this crate is drawn from a splitmix64 stream so that
//! results are reproducible bit-for-bit across platforms and languages:
//!
//! * the generator state is the raw 64-bit seed; each draw adds
//!   `0x9E3779B97F4A7C15` to the state and returns the mixed state;
//! * uniforms in `[0, 1)` use the top 53 bits: `(x >> 11) * 2^-53`;
//! * standard normals come in pairs from Box–Muller, consuming two draws
//!   `a, b`: `u1 = ((a >> 11) + 1) * 2^-53` (in `(0, 1]`), `u2 = (b >> 11) * 2^-53`,
//!   `r = sqrt(-2 ln u1)`, giving `r cos(2π u2)` then `r sin(2π u2)`;
//! * per-sample seeds of an ensemble are `derive_seed(master, k) = mix(mix(master) + (k + 1) γ)`,
//!   i.e. the `k`-th output of a splitmix64 stream seeded with `mix(master)`, so that
//!   neighbouring master seeds do not share samples.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

/// The splitmix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th member of a seeded family (ensemble sample, replica, restart).
#[inline]
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    let base = mix64(master_seed);
    mix64(base.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    spare_normal: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 {
            state: seed,
            spare_normal: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_M53
    }

    /// Uniform integer in `0..bound` (Lemire's multiply-shift; bias < bound/2^64).
    #[inline]
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as usize
    }

    /// Standard normal deviate via Box–Muller.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let a = self.next_u64();
        let b = self.next_u64();
        let u1 = ((a >> 11) + 1) as f64 * TWO_POW_M53;
        let u2 = (b >> 11) as f64 * TWO_POW_M53;
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_values() {
        // Reference outputs of splitmix64 seeded with 0 (as in Vigna's splitmix64.c).
        let mut g = SplitMix64::new(0);
        assert_eq!(g.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(g.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(g.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn uniforms_in_range() {
        let mut g = SplitMix64::new(17);
        for _ in 0..10_000 {
            let u = g.next_f64();
            assert!((0.0..1.0).contains(&u));
            assert!(g.below(7) < 7);
        }
    }

    #[test]
    fn normals_are_standard() {
        let mut g = SplitMix64::new(99);
        let k = 200_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..k {
            let z = g.next_normal();
            assert!(z.is_finite());
            s += z;
            s2 += z * z;
        }
        let mean = s / k as f64;
        let var = s2 / k as f64 - mean * mean;
        assert!(mean.abs() < 4.0 / (k as f64).sqrt());
        assert!((var - 1.0).abs() < 0.02);
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(5, 0);
        let b = derive_seed(5, 1);
        let c = derive_seed(6, 0);
        assert_ne!(a, b);
        assert_ne!(b, c);
        let mut stream = SplitMix64::new(mix64(5));
        assert_eq!(stream.next_u64(), a);
        assert_eq!(stream.next_u64(), b);
    }
}
